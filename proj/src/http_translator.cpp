#include <httplib.h>

#include <json.hpp>
#include <regex>

#include "gilp/invention.hpp"

namespace gilp {

HttpTranslator::HttpTranslator(std::string url, std::string model, std::string token, double timeout_seconds)
    : url_(std::move(url)), model_(std::move(model)), token_(std::move(token)), timeout_(timeout_seconds) {
    if (!(timeout_ > 0.0)) throw ConfigError("translator timeout must be positive");
}

TranslationReply HttpTranslator::translate(const TranslationRequest& request) {
    static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(url_, m, url_re)) throw ConfigError("translator URL must look like http://host[:port]/path");
    std::string path = m[2].matched ? m[2].str() : "/";

    nlohmann::json body;
    body["model"] = model_;
    body["placeholder"] = request.placeholder;
    body["prompt"] = request.prompt;
    auto& evidence = body["evidence"] = nlohmann::json::array();
    for (const auto& set : request.evidence) {
        auto arr = nlohmann::json::array();
        for (const auto& o : set) arr.push_back({{"shape", to_string(o.shape)}, {"color", to_string(o.color)}});
        evidence.push_back(std::move(arr));
    }

    httplib::Client client(m[1].str());
    auto secs = static_cast<time_t>(timeout_);
    auto usecs = static_cast<time_t>((timeout_ - static_cast<double>(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    httplib::Headers headers;
    if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res) throw DataError("translator request failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw DataError("translator returned HTTP " + std::to_string(res->status));

    std::string text = res->body;
    auto parsed = nlohmann::json::parse(res->body, nullptr, false);
    if (!parsed.is_discarded() && parsed.is_object() && parsed.contains("text") && parsed["text"].is_string())
        text = parsed["text"].get<std::string>();
    auto name = parse_reply_name(text);
    if (!name) throw DataError("translator reply has no predicate name line");
    // Description: the reply without its final name line.
    std::string description = text;
    if (auto pos = description.rfind(*name); pos != std::string::npos) description.erase(pos);
    while (!description.empty() && std::isspace(static_cast<unsigned char>(description.back()))) description.pop_back();
    return {*name, description};
}

}  // namespace gilp
