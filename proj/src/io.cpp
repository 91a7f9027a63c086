#include "gilp/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace gilp {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + path.string());
        out << text;
        if (!out) throw DataError("write failed for " + path.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string content_hash(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

template <typename F>
void for_each_line(const std::string& text, F&& f) {
    std::istringstream in(text);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        f(line, n);
    }
}

Json parse_line(const std::string& line, int n) {
    try {
        return Json::parse(line);
    } catch (const Json::exception& e) {
        throw DataError("line " + std::to_string(n) + ": " + e.what());
    }
}

}  // namespace

std::string write_kandinsky_jsonl(const std::vector<KandinskyInstance>& instances) {
    std::string out;
    for (const auto& inst : instances) {
        Json objs = Json::array();
        for (const auto& o : inst.objects)
            objs.push_back({{"shape", to_string(o.shape)}, {"color", to_string(o.color)}, {"jitter", o.jitter}});
        out += Json{{"label", inst.label}, {"objects", objs}}.dump() + "\n";
    }
    return out;
}

std::vector<KandinskyInstance> read_kandinsky_jsonl(const std::string& text) {
    std::vector<KandinskyInstance> out;
    for_each_line(text, [&](const std::string& line, int n) {
        Json j = parse_line(line, n);
        try {
            KandinskyInstance inst;
            const auto& label = j.at("label");
            inst.label = label.is_boolean() ? label.get<bool>() : label.get<int>() != 0;
            for (const auto& o : j.at("objects")) {
                ObjectRecord r;
                r.shape = parse_shape(o.at("shape").get<std::string>());
                r.color = parse_color(o.at("color").get<std::string>());
                if (o.contains("jitter")) r.jitter = o.at("jitter").get<std::array<double, 2>>();
                inst.objects.push_back(r);
            }
            if (inst.objects.empty()) throw DataError("instance without objects");
            out.push_back(std::move(inst));
        } catch (const Json::exception& e) {
            throw DataError("line " + std::to_string(n) + ": " + e.what());
        } catch (const Error& e) {
            throw DataError("line " + std::to_string(n) + ": " + e.what());
        }
    });
    return out;
}

std::string write_embeddings_jsonl(const std::vector<EmbeddingRecord>& records) {
    std::string out;
    for (const auto& r : records) out += Json{{"id", r.id}, {"vector", r.vector}}.dump() + "\n";
    return out;
}

std::vector<EmbeddingRecord> read_embeddings_jsonl(const std::string& text) {
    std::vector<EmbeddingRecord> out;
    std::set<std::string> seen;
    for_each_line(text, [&](const std::string& line, int n) {
        Json j = parse_line(line, n);
        EmbeddingRecord r;
        try {
            r.id = j.at("id").get<std::string>();
            for (const auto& v : j.at("vector")) {
                if (!v.is_number()) throw DataError("vector entries must be numbers");
                r.vector.push_back(v.get<double>());
            }
        } catch (const Json::exception& e) {
            throw DataError("line " + std::to_string(n) + ": " + e.what());
        }
        auto where = "line " + std::to_string(n) + ": ";
        if (r.vector.empty()) throw DataError(where + "empty vector");
        for (double v : r.vector)
            if (!std::isfinite(v)) throw DataError(where + "non-finite vector entry");
        if (!out.empty() && out.front().vector.size() != r.vector.size())
            throw DataError(where + "vector length differs from the first record");
        if (!seen.insert(r.id).second) throw DataError(where + "duplicate id " + r.id);
        out.push_back(std::move(r));
    });
    return out;
}

std::vector<std::vector<double>> embeddings_for(const std::vector<EmbeddingRecord>& records,
                                                const std::vector<std::string>& ids) {
    std::map<std::string, const EmbeddingRecord*> by_id;
    for (const auto& r : records) by_id[r.id] = &r;
    std::vector<std::vector<double>> out;
    for (const auto& id : ids) {
        auto it = by_id.find(id);
        if (it == by_id.end()) throw DataError("no embedding for constant " + id);
        out.push_back(it->second->vector);
    }
    return out;
}

std::vector<std::string> object_ids(const std::vector<KandinskyInstance>& instances, const std::string& split) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < instances.size(); ++i)
        for (std::size_t j = 0; j < instances[i].objects.size(); ++j)
            out.push_back(split + "/" + std::to_string(i) + "/" + std::to_string(j));
    return out;
}

Json semantics_to_json(const SemanticsBundle& bundle) {
    Json out = Json::array();
    for (const auto& e : bundle.entries)
        out.push_back({{"placeholder", e.placeholder},
                       {"evidence", e.evidence},
                       {"prompt", e.prompt},
                       {"name", e.name},
                       {"description", e.description}});
    return out;
}

SemanticsBundle semantics_from_json(const Json& j) {
    SemanticsBundle b;
    try {
        for (const auto& e : j) {
            Semantics s;
            s.placeholder = e.at("placeholder").get<std::string>();
            s.evidence = e.at("evidence").get<std::vector<std::vector<int>>>();
            s.prompt = e.at("prompt").get<std::string>();
            s.name = e.at("name").get<std::string>();
            s.description = e.at("description").get<std::string>();
            if (!is_snake_case(s.name)) throw DataError("semantics name is not snake_case: " + s.name);
            s.translated = s.name != s.placeholder;
            b.entries.push_back(std::move(s));
        }
    } catch (const Json::exception& e) {
        throw DataError(std::string("semantics bundle: ") + e.what());
    }
    return b;
}

Json metrics_to_json(const Metrics& m) {
    Json j;
    j["precision"] = m.precision ? Json(*m.precision) : Json(nullptr);
    j["recall"] = m.recall;
    j["derived"] = m.derived_count;
    j["body_matches"] = m.body_matches;
    j["correct_matches"] = m.correct_matches;
    return j;
}

std::string history_csv(const std::vector<HistoryRow>& rows) {
    std::ostringstream out;
    out << "epoch,h,mse,cluster,acc\n" << std::setprecision(10);
    for (const auto& r : rows) out << r.epoch << "," << r.h << "," << r.mse << "," << r.cluster << "," << r.acc << "\n";
    return out.str();
}

const char* to_string(LearningMode mode) {
    switch (mode) {
        case LearningMode::symbolic: return "symbolic";
        case LearningMode::relational_embedded: return "embedded";
        case LearningMode::instance: return "instance";
    }
    return "symbolic";
}

Task load_task(const RunConfig& cfg) {
    Task task = gen_task(cfg.spec);
    if (cfg.embeddings.empty()) return task;
    auto records = read_embeddings_jsonl(read_file(cfg.embeddings));
    if (auto* k = std::get_if<KandinskyTask>(&task)) {
        k->train_embeddings = embeddings_for(records, object_ids(k->train, "train"));
        k->test_embeddings = embeddings_for(records, object_ids(k->test, "test"));
    } else {
        auto& s = std::get<SymbolicTask>(task);
        s.embeddings = embeddings_for(records, s.train.constants.names());
    }
    return task;
}

namespace {

LearningMode parse_mode(const std::string& s) {
    if (s == "symbolic") return LearningMode::symbolic;
    if (s == "embedded") return LearningMode::relational_embedded;
    if (s == "instance") return LearningMode::instance;
    throw ConfigError("unknown mode: " + s);
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
    std::istringstream in(v);
    T out{};
    in >> out;
    if (in.fail() || !(in >> std::ws).eof()) throw ConfigError("bad value for " + key + ": " + v);
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("bad value for " + key + ": " + v);
}

std::vector<int> parse_widths(const std::string& v) {
    std::vector<int> out;
    std::istringstream in(v);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(parse_number<int>("widths", item));
    if (out.empty()) throw ConfigError("widths need at least one value");
    return out;
}

void apply(RunConfig& c, const std::string& key, const std::string& v) {
    auto& t = c.train;
    if (key == "mode") t.mode = parse_mode(v);
    else if (key == "d") t.d = parse_number<int>(key, v);
    else if (key == "k") t.k = parse_number<int>(key, v);
    else if (key == "m") {
        int m = parse_number<int>(key, v);
        if (m < 1) throw ConfigError("m must be at least 1");
        t.net.m = m;
        t.net.widths.resize(static_cast<std::size_t>(m), t.net.widths.empty() ? 1 : t.net.widths.back());
    } else if (key == "widths") {
        t.net.widths = parse_widths(v);
        t.net.m = static_cast<int>(t.net.widths.size());
    } else if (key == "d_bias") t.net.d_bias = parse_number<double>(key, v);
    else if (key == "rule_lr") t.net.rule_lr = parse_number<double>(key, v);
    else if (key == "init_scale") t.net.init_scale = parse_number<double>(key, v);
    else if (key == "threshold") t.net.extract_threshold = parse_number<double>(key, v);
    else if (key == "weight_decay") t.net.weight_decay = parse_number<double>(key, v);
    else if (key == "centroid_lr") t.centroid_lr = parse_number<double>(key, v);
    else if (key == "alpha") t.alpha = parse_number<double>(key, v);
    else if (key == "lambda") t.lambda = parse_number<double>(key, v);
    else if (key == "noise") t.noise_scale = parse_number<double>(key, v);
    else if (key == "epochs") t.epochs = parse_number<int>(key, v);
    else if (key == "batch") t.batch = parse_number<int>(key, v);
    else if (key == "runs") t.runs = parse_number<int>(key, v);
    else if (key == "seed") {
        t.seed = parse_number<std::uint64_t>(key, v);
        c.spec.seed = t.seed;
    } else if (key == "budget") t.budget_seconds = parse_number<double>(key, v);
    else if (key == "keep_all") t.keep_all = parse_bool(key, v);
    else if (key == "chain_bias") t.sampler.chain_bias = parse_number<double>(key, v);
    else if (key == "early_stop") t.early_stop_patience = parse_number<int>(key, v);
    else if (key == "revive") t.revive_patience = parse_number<int>(key, v);
    else if (key == "size") c.spec.size = parse_number<int>(key, v);
    else if (key == "train_instances") c.spec.train_instances = parse_number<int>(key, v);
    else if (key == "test_instances") c.spec.test_instances = parse_number<int>(key, v);
    else if (key == "parity") {
        if (v == "odd") c.spec.parity = SequenceTarget::odd_index;
        else if (v == "even") c.spec.parity = SequenceTarget::even_index;
        else throw ConfigError("parity must be odd or even");
    } else if (key == "embeddings") c.embeddings = v;
    else throw ConfigError("unknown config key: " + key);
}

std::string fmt(double v) {
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream in(text);
    std::string line;
    int n = 0;
    auto trim = [](std::string s) {
        auto b = s.find_first_not_of(" \t\r");
        auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++n;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(n) + ": expected key = value");
        out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return out;
}

RunConfig make_run_config(const std::string& task, const std::vector<std::pair<std::string, std::string>>& overrides) {
    RunConfig c;
    std::string name = task;
    for (const auto& [k, v] : overrides)
        if (k == "task") name = v;
    if (name.empty()) throw ConfigError("no task given");
    const auto& names = task_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) throw ConfigError("unknown task: " + name);
    c.task = name;
    c.spec.name = name;
    c.train = default_config(name);
    for (const auto& [k, v] : overrides)
        if (k != "task") apply(c, k, v);
    c.train.validate();
    return c;
}

std::string config_to_key_values(const RunConfig& c) {
    const auto& t = c.train;
    std::ostringstream out;
    std::string widths;
    for (std::size_t i = 0; i < t.net.widths.size(); ++i) widths += (i ? "," : "") + std::to_string(t.net.widths[i]);
    out << "task = " << c.task << "\n"
        << "mode = " << to_string(t.mode) << "\n"
        << "d = " << t.d << "\n"
        << "k = " << t.k << "\n"
        << "widths = " << widths << "\n"
        << "d_bias = " << fmt(t.net.d_bias) << "\n"
        << "rule_lr = " << fmt(t.net.rule_lr) << "\n"
        << "init_scale = " << fmt(t.net.init_scale) << "\n"
        << "threshold = " << fmt(t.net.extract_threshold) << "\n"
        << "weight_decay = " << fmt(t.net.weight_decay) << "\n"
        << "centroid_lr = " << fmt(t.centroid_lr) << "\n"
        << "alpha = " << fmt(t.alpha) << "\n"
        << "lambda = " << fmt(t.lambda) << "\n"
        << "noise = " << fmt(t.noise_scale) << "\n"
        << "epochs = " << t.epochs << "\n"
        << "batch = " << t.batch << "\n"
        << "runs = " << t.runs << "\n"
        << "seed = " << t.seed << "\n"
        << "budget = " << fmt(t.budget_seconds) << "\n"
        << "keep_all = " << (t.keep_all ? "true" : "false") << "\n"
        << "chain_bias = " << fmt(t.sampler.chain_bias) << "\n"
        << "early_stop = " << t.early_stop_patience << "\n"
        << "revive = " << t.revive_patience << "\n"
        << "size = " << c.spec.size << "\n"
        << "train_instances = " << c.spec.train_instances << "\n"
        << "test_instances = " << c.spec.test_instances << "\n"
        << "parity = " << (c.spec.parity == SequenceTarget::odd_index ? "odd" : "even") << "\n";
    if (!c.embeddings.empty()) out << "embeddings = " << c.embeddings << "\n";
    return out.str();
}

Json config_to_json(const RunConfig& c) {
    Json j = Json::object();
    for (const auto& [k, v] : parse_key_values(config_to_key_values(c))) j[k] = v;
    return j;
}

RunConfig config_from_json(const Json& j) {
    std::vector<std::pair<std::string, std::string>> kv;
    try {
        for (const auto& [k, v] : j.items()) kv.emplace_back(k, v.is_string() ? v.get<std::string>() : v.dump());
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return make_run_config("", kv);
}

namespace {

constexpr int kCheckpointVersion = 1;

Json matrix_json(const Matrix& m) { return {{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}}; }

Matrix matrix_from(const Json& j) {
    Matrix m(j.at("rows").get<int>(), j.at("cols").get<int>());
    m.data = j.at("data").get<std::vector<double>>();
    if (m.data.size() != static_cast<std::size_t>(m.rows) * static_cast<std::size_t>(m.cols))
        throw DataError("checkpoint matrix has the wrong size");
    return m;
}

Json matrices_json(const std::vector<Matrix>& ms) {
    Json a = Json::array();
    for (const auto& m : ms) a.push_back(matrix_json(m));
    return a;
}

std::vector<Matrix> matrices_from(const Json& j) {
    std::vector<Matrix> out;
    for (const auto& m : j) out.push_back(matrix_from(m));
    return out;
}

}  // namespace

Json checkpoint_to_json(const Checkpoint& c) {
    Json j;
    j["version"] = kCheckpointVersion;
    j["config_hash"] = content_hash(config_to_key_values(c.config));
    j["config"] = config_to_json(c.config);
    j["run_seed"] = std::to_string(c.run_seed);
    j["raw"] = matrices_json(c.params.raw);
    j["adam"] = {{"m", matrices_json(c.params.adam.m)}, {"v", matrices_json(c.params.adam.v)}, {"step", c.params.adam.step}};
    j["centroids"] = c.centroids;
    j["alpha"] = c.alpha;
    j["rules"] = c.rules;
    j["extracted"] = c.extracted;
    return j;
}

Checkpoint checkpoint_from_json(const Json& j) {
    Checkpoint c;
    try {
        if (j.at("version").get<int>() != kCheckpointVersion) throw DataError("unsupported checkpoint version");
        c.config = config_from_json(j.at("config"));
        c.run_seed = std::stoull(j.at("run_seed").get<std::string>());
        c.params.raw = matrices_from(j.at("raw"));
        c.params.adam.m = matrices_from(j.at("adam").at("m"));
        c.params.adam.v = matrices_from(j.at("adam").at("v"));
        c.params.adam.step = j.at("adam").at("step").get<long>();
        c.centroids = j.at("centroids").get<std::vector<std::vector<double>>>();
        c.alpha = j.at("alpha").get<double>();
        c.rules = j.at("rules").get<std::string>();
        c.extracted = j.at("extracted").get<std::string>();
        if (j.at("config_hash").get<std::string>() != content_hash(config_to_key_values(c.config)))
            throw DataError("checkpoint config hash does not match its config");
    } catch (const Json::exception& e) {
        throw DataError(std::string("checkpoint: ") + e.what());
    } catch (const std::logic_error& e) {
        throw DataError(std::string("checkpoint: ") + e.what());
    }
    if (c.params.raw.empty()) throw DataError("checkpoint has no network layers");
    return c;
}

}  // namespace gilp
