#include <cmath>
#include <random>

#include "doctest.h"
#include "gilp/io.hpp"

using namespace gilp;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() / ("gilp_io_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("content hash is 64-bit FNV-1a") {
    CHECK(content_hash("") == "cbf29ce484222325");
    CHECK(content_hash("a") == "af63dc4c8601ec8c");
    CHECK(content_hash("foobar") == "85944171f73967e8");
}

TEST_CASE("write_file replaces atomically and creates parents") {
    TempDir dir;
    auto file = dir.path / "nested" / "out.txt";
    write_file(file, "one");
    write_file(file, "two");
    CHECK(read_file(file) == "two");
    CHECK(!std::filesystem::exists(dir.path / "nested" / "out.txt.tmp"));
    CHECK_THROWS_AS(read_file(dir.path / "missing"), DataError);
}

TEST_CASE("kandinsky JSON lines round-trip") {
    auto task = gen_kandinsky_task({"kandinsky_two_pair", 0, 4});
    auto text = write_kandinsky_jsonl(task.train);
    CHECK(read_kandinsky_jsonl(text) == task.train);
    CHECK(write_kandinsky_jsonl(read_kandinsky_jsonl(text)) == text);
}

TEST_CASE("kandinsky reader accepts integer labels and rejects bad records") {
    auto inst = read_kandinsky_jsonl(
        R"({"label":1,"objects":[{"shape":"triangle","color":"blue","jitter":[0.1,-0.2]}]})"
        "\n\n"
        R"({"label":false,"objects":[{"shape":"circle","color":"red"}]})");
    REQUIRE(inst.size() == 2);
    CHECK(inst[0].label);
    CHECK(inst[0].objects[0].shape == Shape::triangle);
    CHECK(inst[0].objects[0].jitter[1] == -0.2);
    CHECK(!inst[1].label);
    CHECK_THROWS_AS(read_kandinsky_jsonl(R"({"label":1,"objects":[{"shape":"hexagon","color":"red"}]})"), DataError);
    CHECK_THROWS_AS(read_kandinsky_jsonl(R"({"label":1,"objects":[]})"), DataError);
    CHECK_THROWS_AS(read_kandinsky_jsonl(R"({"objects":[{"shape":"circle","color":"red"}]})"), DataError);
    CHECK_THROWS_AS(read_kandinsky_jsonl("{not json"), DataError);
}

TEST_CASE("embedding sidecar round-trips and is validated") {
    std::vector<EmbeddingRecord> recs{{"img1", {0.5, -1.0, 2.0}}, {"img2", {0.0, 0.25, 1e-3}}};
    auto text = write_embeddings_jsonl(recs);
    auto back = read_embeddings_jsonl(text);
    REQUIRE(back.size() == 2);
    CHECK(back[0].id == "img1");
    CHECK(back[1].vector == recs[1].vector);
    auto rows = embeddings_for(back, {"img2", "img1"});
    CHECK(rows[0] == recs[1].vector);
    CHECK_THROWS_AS(embeddings_for(back, {"img3"}), DataError);

    CHECK_THROWS_AS(read_embeddings_jsonl(R"({"id":"a","vector":[1]})"
                                          "\n"
                                          R"({"id":"a","vector":[2]})"),
                    DataError);
    CHECK_THROWS_AS(read_embeddings_jsonl(R"({"id":"a","vector":[1,2]})"
                                          "\n"
                                          R"({"id":"b","vector":[2]})"),
                    DataError);
    CHECK_THROWS_AS(read_embeddings_jsonl(R"({"id":"a","vector":[]})"), DataError);
    CHECK_THROWS_AS(read_embeddings_jsonl(R"({"id":"a","vector":["x"]})"), DataError);
    CHECK_THROWS_AS(read_embeddings_jsonl(R"({"id":"a"})"), DataError);
    CHECK_THROWS_AS(read_embeddings_jsonl("[1,2"), DataError);
    // JSON has no literal for infinity, so overflowing numbers are the only way in.
    CHECK_THROWS_AS(read_embeddings_jsonl(R"({"id":"a","vector":[1e999]})"), DataError);
}

TEST_CASE("object ids follow split, instance and object order") {
    std::vector<KandinskyInstance> inst(2);
    inst[0].objects.resize(2);
    inst[1].objects.resize(1);
    CHECK(object_ids(inst, "train") == std::vector<std::string>{"train/0/0", "train/0/1", "train/1/0"});
}

TEST_CASE("sidecar embeddings reach the task") {
    TempDir dir;
    RunConfig cfg = make_run_config("kandinsky_one_red", {{"train_instances", "3"}, {"test_instances", "2"}});
    auto plain = std::get<KandinskyTask>(gen_task(cfg.spec));
    std::vector<EmbeddingRecord> recs;
    int i = 0;
    for (const auto& id : object_ids(plain.train, "train")) recs.push_back({id, {double(i++), 1.0}});
    for (const auto& id : object_ids(plain.test, "test")) recs.push_back({id, {double(i++), 2.0}});
    write_file(dir.path / "emb.jsonl", write_embeddings_jsonl(recs));
    cfg.embeddings = (dir.path / "emb.jsonl").string();
    auto task = std::get<KandinskyTask>(load_task(cfg));
    CHECK(task.train_embeddings.size() == object_ids(plain.train, "train").size());
    CHECK(task.train_embeddings[1] == std::vector<double>{1.0, 1.0});
    CHECK(task.test_embeddings.front()[1] == 2.0);
    CHECK(instance_embeddings(task, cfg.train, true).rows == static_cast<int>(task.test_embeddings.size()));

    recs.pop_back();
    write_file(dir.path / "emb.jsonl", write_embeddings_jsonl(recs));
    CHECK_THROWS_AS(load_task(cfg), DataError);
}

TEST_CASE("sidecar embeddings replace digit encodings in embedded mode") {
    TempDir dir;
    RunConfig cfg = make_run_config("mnist_sequence", {});
    auto plain = std::get<SymbolicTask>(gen_task(cfg.spec));
    std::vector<EmbeddingRecord> recs;
    for (const auto& name : plain.train.constants.names()) recs.push_back({name, {1.0, double(name.size())}});
    write_file(dir.path / "emb.jsonl", write_embeddings_jsonl(recs));
    cfg.embeddings = (dir.path / "emb.jsonl").string();
    auto task = std::get<SymbolicTask>(load_task(cfg));
    Matrix m = constant_embeddings(task, cfg.train);
    CHECK(m.rows == plain.train.constants.size());
    CHECK(m.cols == 2);
}

TEST_CASE("semantics bundle round-trips") {
    SemanticsBundle b;
    b.entries.push_back({"p_2", {{1, 4, 9}}, "What is the common property?", "color_in_red", "color in red", true});
    b.entries.push_back({"p_1_3", {{0}, {5}}, "What is the relation?", "p_1_3", "untranslated: timeout", false});
    auto back = semantics_from_json(Json::parse(semantics_to_json(b).dump()));
    REQUIRE(back.entries.size() == 2);
    CHECK(back.entries[0].evidence == b.entries[0].evidence);
    CHECK(back.entries[0].translated);
    CHECK(back.entries[1].evidence.size() == 2);
    CHECK(!back.entries[1].translated);
    CHECK(back.find("p_1_3")->description == "untranslated: timeout");
    CHECK_THROWS_AS(semantics_from_json(Json::parse(R"([{"placeholder":"p_1"}])")), DataError);
    auto bad = semantics_to_json(b);
    bad[0]["name"] = "Not Snake";
    CHECK_THROWS_AS(semantics_from_json(bad), DataError);
}

TEST_CASE("run configuration round-trips through both formats") {
    RunConfig cfg = make_run_config("predecessor", {{"seed", "42"}, {"widths", "8,4,2"}, {"rule_lr", "0.125"}});
    CHECK(cfg.train.net.m == 3);
    CHECK(cfg.train.seed == 42);
    CHECK(cfg.spec.seed == 42);
    auto text = config_to_key_values(cfg);
    RunConfig again = make_run_config("", parse_key_values(text));
    CHECK(config_to_key_values(again) == text);
    RunConfig mirrored = config_from_json(config_to_json(cfg));
    CHECK(config_to_key_values(mirrored) == text);
    CHECK(mirrored.train.net.rule_lr == 0.125);
}

TEST_CASE("configuration errors are reported as config errors") {
    CHECK_THROWS_AS(make_run_config("", {}), ConfigError);
    CHECK_THROWS_AS(make_run_config("no_such_task", {}), ConfigError);
    CHECK_THROWS_AS(make_run_config("even", {{"colour", "red"}}), ConfigError);
    CHECK_THROWS_AS(make_run_config("even", {{"epochs", "ten"}}), ConfigError);
    CHECK_THROWS_AS(make_run_config("even", {{"epochs", "0"}}), ConfigError);
    CHECK_THROWS_AS(make_run_config("even", {{"mode", "quantum"}}), ConfigError);
    CHECK_THROWS_AS(make_run_config("even", {{"threshold", "1.5"}}), ConfigError);
    CHECK_THROWS_AS(parse_key_values("no equals sign"), ConfigError);
    auto kv = parse_key_values("# comment\n task = even  # trailing\n\nm=1\n");
    REQUIRE(kv.size() == 2);
    CHECK(kv[0] == std::pair<std::string, std::string>{"task", "even"});
    RunConfig c = make_run_config("", kv);
    CHECK(c.train.net.widths.size() == 1);
}

TEST_CASE("later overrides win") {
    RunConfig cfg = make_run_config("even", {{"epochs", "5"}, {"task", "odd"}, {"epochs", "7"}});
    CHECK(cfg.task == "odd");
    CHECK(cfg.train.epochs == 7);
}

TEST_CASE("checkpoint round-trips and detects tampering") {
    Checkpoint c;
    c.config = make_run_config("kandinsky_one_red", {{"seed", "3"}});
    c.run_seed = 0xFFFFFFFFFFFFFFF0ULL;
    std::mt19937_64 rng(1);
    c.params = init_network(7, c.config.train.net, rng);
    c.params.adam.step = 12;
    c.centroids = {{0.5, 1.5}, {2.0, -1.0}};
    c.alpha = 20.0;
    c.rules = "positive :- p_1(X).\n";
    c.extracted = c.rules;
    Json j = checkpoint_to_json(c);
    Checkpoint back = checkpoint_from_json(Json::parse(j.dump()));
    CHECK(back.run_seed == c.run_seed);
    CHECK(back.params.raw == c.params.raw);
    CHECK(back.params.adam.step == 12);
    CHECK(back.centroids == c.centroids);
    CHECK(back.rules == c.rules);
    CHECK(config_to_key_values(back.config) == config_to_key_values(c.config));

    Json tampered = j;
    tampered["config"]["epochs"] = "5";
    CHECK_THROWS_AS(checkpoint_from_json(tampered), DataError);
    Json future = j;
    future["version"] = 99;
    CHECK_THROWS_AS(checkpoint_from_json(future), DataError);
    Json broken = j;
    broken["raw"][0]["data"].erase(0);
    CHECK_THROWS_AS(checkpoint_from_json(broken), DataError);
}

TEST_CASE("metrics JSON and history CSV") {
    Metrics m;
    m.recall = 0.5;
    auto j = metrics_to_json(m);
    CHECK(j["precision"].is_null());
    CHECK(j["recall"] == 0.5);
    m.precision = 1.0;
    CHECK(metrics_to_json(m)["precision"] == 1.0);
    auto csv = history_csv({{1, 0.5, 0.25, 0.1, 0.75}});
    CHECK(csv == "epoch,h,mse,cluster,acc\n1,0.5,0.25,0.1,0.75\n");
}
