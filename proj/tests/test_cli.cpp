#include <cstdio>
#include <filesystem>
#include <map>
#include <random>

#include "doctest.h"
#include "gilp/io.hpp"

using namespace gilp;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

/// Runs the CLI with `args` from `dir`, capturing stdout.
Result run(const fs::path& dir, const std::string& args) {
    std::string cmd = "cd '" + dir.string() + "' && '" GILP_CLI "' " + args + " 2>/dev/null";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("gilp_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) out[e.path().string()] = read_file(e.path());
    return out;
}

}  // namespace

TEST_CASE("gen is deterministic under the seed") {
    TempDir t;
    auto a = run(t.path, "gen --task kandinsky_one_red --seed 7 --out a --json");
    auto b = run(t.path, "gen --task kandinsky_one_red --seed 7 --out b --json");
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    auto ha = Json::parse(a.out)["dataset_hash"];
    CHECK(ha == Json::parse(b.out)["dataset_hash"]);
    CHECK(read_file(t.path / "a" / "train.jsonl") == read_file(t.path / "b" / "train.jsonl"));
    auto c = run(t.path, "gen --task kandinsky_one_red --seed 8 --out c --json");
    CHECK(Json::parse(c.out)["dataset_hash"] != ha);
    CHECK(read_kandinsky_jsonl(read_file(t.path / "a" / "test.jsonl")).size() == 30);
}

TEST_CASE("exit codes follow the failure class") {
    TempDir t;
    CHECK(run(t.path, "gen --task no_such_task").code == 2);
    CHECK(run(t.path, "train --task even --set epochs=zero").code == 2);
    CHECK(run(t.path, "train --task even --set nonsense=1").code == 2);
    CHECK(run(t.path, "frobnicate").code == 2);
    CHECK(run(t.path, "gen --config missing.txt").code == 3);

    write_file(t.path / "bad.jsonl", "{\"id\": \"x\", \"vector\": [1, 2]}\n{oops\n");
    CHECK(run(t.path, "train --task kandinsky_one_red --embeddings bad.jsonl").code == 3);

    // Huge steps overflow the weights.
    CHECK(run(t.path, "train --task predecessor --runs 1 --epochs 5 --set rule_lr=1e308 --set early_stop=0").code == 4);

    write_file(t.path / "r.rules", "even(X) :- zero(X).\n");
    write_file(t.path / "no_pos.facts", "#background\nzero(0).\n");
    CHECK(run(t.path, "eval --rules r.rules --data no_pos.facts").code == 5);
}

TEST_CASE("train writes every run artifact and reports recall 1.00 on predecessor") {
    TempDir t;
    auto r = run(t.path, "train --task predecessor --runs 10 --out run");
    REQUIRE(r.code == 0);
    for (const char* f : {"config.txt", "config.json", "dataset.hash", "checkpoint.json", "rules.txt", "extracted.txt",
                          "metrics.json", "history.csv", "report.txt"})
        CHECK(fs::exists(t.path / "run" / f));
    auto report = read_file(t.path / "run" / "report.txt");
    CHECK(report.find("predecessor") != std::string::npos);
    CHECK(report.find("1.00       1.00") != std::string::npos);
    auto metrics = Json::parse(read_file(t.path / "run" / "metrics.json"));
    CHECK(metrics["recall"] == 1.0);
    CHECK(metrics["precision"] == 1.0);
    CHECK(metrics["runs"].size() == 10);
    CHECK(read_file(t.path / "run" / "history.csv").rfind("epoch,h,mse,cluster,acc\n", 0) == 0);
}

TEST_CASE("a run is reproducible from its config snapshot") {
    TempDir t;
    REQUIRE(run(t.path, "train --task son --runs 2 --seed 5 --out first").code == 0);
    REQUIRE(run(t.path, "train --config first/config.txt --out second").code == 0);
    REQUIRE(run(t.path, "train --config first/config.json --out third").code == 0);
    auto rules = read_file(t.path / "first" / "rules.txt");
    CHECK(read_file(t.path / "second" / "rules.txt") == rules);
    CHECK(read_file(t.path / "third" / "rules.txt") == rules);
    CHECK(read_file(t.path / "second" / "checkpoint.json") == read_file(t.path / "first" / "checkpoint.json"));
    // Flags override the file.
    REQUIRE(run(t.path, "train --config first/config.txt --runs 1 --out fourth").code == 0);
    CHECK(read_file(t.path / "fourth" / "config.txt").find("runs = 1\n") != std::string::npos);
}

TEST_CASE("eval of the member gold rules gives precision 1 and recall 1") {
    TempDir t;
    REQUIRE(run(t.path, "gen --task member --out data").code == 0);
    auto r = run(t.path, "eval --rules data/gold.rules --task member --out data --json");
    REQUIRE(r.code == 0);
    auto j = Json::parse(r.out);
    CHECK(j["precision"] == 1.0);
    CHECK(j["recall"] == 1.0);
    CHECK(fs::exists(t.path / "data" / "eval_metrics.json"));
}

TEST_CASE("extract and eval work from a checkpoint") {
    TempDir t;
    REQUIRE(run(t.path, "train --task even --runs 2 --out run").code == 0);
    auto e = run(t.path, "extract --run run --json");
    REQUIRE(e.code == 0);
    CHECK(Json::parse(e.out)["rule_text"] == read_file(t.path / "run" / "rules.txt"));
    auto loose = run(t.path, "extract --run run --threshold 0.05 --keep-all --out loose --json");
    REQUIRE(loose.code == 0);
    CHECK(Json::parse(loose.out)["extracted"] >= Json::parse(e.out)["extracted"]);
    auto v = run(t.path, "eval --rules run/rules.txt --run run --json");
    REQUIRE(v.code == 0);
    CHECK(Json::parse(v.out)["recall"] == Json::parse(read_file(t.path / "run" / "metrics.json"))["recall"]);
    CHECK(run(t.path, "extract --run run --threshold 1.5").code == 2);
    CHECK(run(t.path, "extract --run nowhere").code == 3);
}

TEST_CASE("report never mutates run artifacts") {
    TempDir t;
    REQUIRE(run(t.path, "train --task predecessor --runs 1 --out runs/a").code == 0);
    REQUIRE(run(t.path, "train --task odd --runs 1 --out runs/b").code == 0);
    auto before = snapshot(t.path / "runs");
    auto r = run(t.path, "report runs");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("predecessor") != std::string::npos);
    CHECK(r.out.find("odd") != std::string::npos);
    CHECK(snapshot(t.path / "runs") == before);
    auto j = run(t.path, "report runs --json");
    CHECK(Json::parse(j.out).size() == 2);
    CHECK(run(t.path, "report empty_dir").code == 3);
}

TEST_CASE("invent names the one-red placeholders with the mock translator") {
    TempDir t;
    REQUIRE(run(t.path, "train --task kandinsky_one_red --runs 3 --out run").code == 0);
    auto r = run(t.path, "invent --run run --json");
    REQUIRE(r.code == 0);
    auto j = Json::parse(r.out);
    bool found = false;
    for (const auto& rule : j["rules"])
        found = found || (rule["rule"] == "positive :- color_in_red(X)." && rule["precision"] == 1.0 && rule["recall"] == 1.0);
    CHECK(found);
    auto bundle = semantics_from_json(Json::parse(read_file(t.path / "run" / "semantics.json")));
    CHECK(!bundle.entries.empty());
    // A saved bundle replays without a translator.
    auto replay = run(t.path, "invent --run run --semantics run/semantics.json --out replay --json");
    REQUIRE(replay.code == 0);
    CHECK(Json::parse(replay.out)["rules"] == j["rules"]);
    CHECK(run(t.path, "invent --run run --translator carrier_pigeon").code == 2);
    REQUIRE(run(t.path, "train --task even --runs 1 --out sym").code == 0);
    CHECK(run(t.path, "invent --run sym").code == 2);
}

TEST_CASE("debug dump writes the propositionalized batch") {
    TempDir t;
    REQUIRE(run(t.path, "train --task predecessor --runs 1 --out run --dump-xy xy.csv").code == 0);
    auto csv = read_file(t.path / "xy.csv");
    auto header = csv.substr(0, csv.find('\n'));
    CHECK(header.find("\"succ(X,Y)\"") != std::string::npos);
    CHECK(header.substr(header.size() - 2) == ",y");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 64);
}
