// Batch front end: gen, train, extract, eval, invent, report.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "gilp/invention.hpp"
#include "gilp/io.hpp"
#include "gilp/trainer.hpp"

namespace fs = std::filesystem;
using namespace gilp;

namespace {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Options shared by commands that build a run configuration.
struct ConfigFlags {
    std::string file;
    KeyValues flags;  // in command-line order, applied after the file

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", file, "Config file (key = value lines, or a .json mirror)");
        auto add = [&](const std::string& flag, const std::string& key, const std::string& help) {
            cmd->add_option_function<std::string>(flag, [this, key](const std::string& v) { flags.emplace_back(key, v); },
                                                  help);
        };
        add("--task", "task", "Benchmark name");
        add("--seed", "seed", "Base seed");
        add("--size", "size", "Task size (0 = default)");
        add("--runs", "runs", "Seeded runs; the best one is kept");
        add("--epochs", "epochs", "Epochs per run");
        add("--mode", "mode", "symbolic, embedded or instance");
        add("--budget", "budget", "Wall-clock seconds for all runs of the task");
        add("--threshold", "threshold", "Extraction threshold");
        add("--embeddings", "embeddings", "Embedding sidecar (JSON lines of {id, vector})");
        cmd->add_flag_callback("--keep-all", [this] { flags.emplace_back("keep_all", "true"); },
                               "Keep every extracted rule (skip the training-precision filter)");
        cmd->add_option_function<std::vector<std::string>>(
            "--set",
            [this](const std::vector<std::string>& items) {
                for (const auto& item : items) {
                    auto eq = item.find('=');
                    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got " + item);
                    flags.emplace_back(item.substr(0, eq), item.substr(eq + 1));
                }
            },
            "Override any config key (key=value)");
    }

    RunConfig resolve() const {
        KeyValues kv;
        if (!file.empty()) {
            std::string text = read_file(file);
            if (fs::path(file).extension() == ".json") {
                auto j = Json::parse(text, nullptr, false);
                if (j.is_discarded() || !j.is_object()) throw ConfigError("config JSON must be an object");
                for (const auto& [k, v] : j.items()) kv.emplace_back(k, v.is_string() ? v.get<std::string>() : v.dump());
            } else {
                kv = parse_key_values(text);
            }
        }
        kv.insert(kv.end(), flags.begin(), flags.end());
        return make_run_config("", kv);
    }
};

struct Output {
    bool json = false;
    void emit(const Json& j, const std::string& text) const {
        if (json) std::cout << j.dump(2) << "\n";
        else std::cout << text;
    }
};

std::string fixed(double v, int digits = 2) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(digits) << v;
    return out.str();
}

std::string opt_fixed(const std::optional<double>& v) { return v ? fixed(*v) : std::string("-"); }

// ---------------------------------------------------------------------------
// Datasets

using Files = std::vector<std::pair<std::string, std::string>>;

Files dataset_files(const Task& task) {
    if (const auto* k = std::get_if<KandinskyTask>(&task))
        return {{"train.jsonl", write_kandinsky_jsonl(k->train)}, {"test.jsonl", write_kandinsky_jsonl(k->test)}};
    const auto& s = std::get<SymbolicTask>(task);
    std::string held_out;
    for (const auto& f : s.test_positives) held_out += format_fact(f, s.test.preds, s.test.constants) + ".\n";
    Files files{{"train.facts", serialize_facts(s.train)},
                {"test.facts", serialize_facts(s.test)},
                {"test_positives.facts", held_out}};
    if (!s.gold_rules.empty()) files.emplace_back("gold.rules", s.gold_rules + "\n");
    return files;
}

std::string dataset_hash(const Files& files, const RunConfig& cfg) {
    std::string all;
    for (const auto& [name, text] : files) all += name + "\n" + text;
    if (!cfg.embeddings.empty()) all += "embeddings\n" + read_file(cfg.embeddings);
    return content_hash(all);
}

void write_config(const fs::path& dir, const RunConfig& cfg) {
    write_file(dir / "config.txt", config_to_key_values(cfg));
    write_file(dir / "config.json", config_to_json(cfg).dump(2) + "\n");
}

fs::path default_out(const RunConfig& cfg) { return fs::path("runs") / (cfg.task + "-s" + std::to_string(cfg.train.seed)); }

int cmd_gen(const RunConfig& cfg, fs::path out, const Output& o) {
    if (out.empty()) out = default_out(cfg);
    Task task = gen_task(cfg.spec);
    Files files = dataset_files(task);
    for (const auto& [name, text] : files) write_file(out / name, text);
    std::string hash = dataset_hash(files, cfg);
    write_file(out / "dataset.hash", hash + "\n");
    write_config(out, cfg);
    o.emit({{"task", cfg.task}, {"dataset_hash", hash}, {"dir", out.string()}},
           cfg.task + " dataset " + hash + " -> " + out.string() + "\n");
    return 0;
}

// ---------------------------------------------------------------------------
// Restoring a trained run

struct Restored {
    RunConfig cfg;
    Task task;
    BodyAtomSpace space;
    NetworkParams params;
    std::optional<Clustering> clustering;
};

int rule_variables(const SymbolicTask& s, const TrainConfig& cfg) { return cfg.d > 0 ? cfg.d : s.variables; }

BodyAtomSpace make_space(const Task& task, const TrainConfig& cfg) {
    if (std::holds_alternative<KandinskyTask>(task)) return enumerate_placeholder_atoms(cfg.k);
    const auto& s = std::get<SymbolicTask>(task);
    return enumerate_body_atoms(s.train.preds, rule_variables(s, cfg), s.train.preds.id(s.target));
}

Restored restore(const fs::path& run) {
    auto ckpt = checkpoint_from_json(Json::parse(read_file(run / "checkpoint.json")));
    Restored r{ckpt.config, load_task(ckpt.config), {}, std::move(ckpt.params), std::nullopt};
    r.space = make_space(r.task, r.cfg.train);
    if (r.params.inputs() != r.space.size()) throw DataError("checkpoint does not match the task's atom space");
    if (!ckpt.centroids.empty()) r.clustering = Clustering(Matrix::from_rows(ckpt.centroids), ckpt.alpha);
    return r;
}

std::vector<int> symbolic_assignment(const Restored& r) {
    const auto& s = std::get<SymbolicTask>(r.task);
    if (!r.clustering) throw DataError("embedded checkpoint has no centroids");
    return r.clustering->assign_all(constant_embeddings(s, r.cfg.train));
}

ObjectPool pool_for(const Restored& r, bool test_split) {
    const auto& k = std::get<KandinskyTask>(r.task);
    if (!r.clustering) throw DataError("instance checkpoint has no centroids");
    Matrix emb = instance_embeddings(k, r.cfg.train, test_split);
    return ObjectPool::build(test_split ? k.test : k.train, r.clustering->assign_all(emb));
}

/// Rules whose training precision is 1, matching the trainer's filter per mode.
LogicProgram filter_rules(const Restored& r, const LogicProgram& extracted) {
    if (r.cfg.train.keep_all) return extracted;
    LogicProgram kept;
    if (std::holds_alternative<KandinskyTask>(r.task)) {
        auto pool = pool_for(r, false);
        for (const auto& rule : extracted.rules) {
            auto m = evaluate_constrained({{rule}}, r.space, std::get<KandinskyTask>(r.task).train, pool);
            if (m.precision && *m.precision == 1.0) kept.rules.push_back(rule);
        }
        return kept;
    }
    const auto& s = std::get<SymbolicTask>(r.task);
    FactBase fb = r.cfg.train.mode == LearningMode::relational_embedded
                      ? latent_fact_base(s.train, symbolic_assignment(r), r.cfg.train.k)
                      : s.train;
    for (const auto& rule : extracted.rules) {
        auto p = rule_precision(rule, fb);
        if (p && *p == 1.0) kept.rules.push_back(rule);
    }
    return kept;
}

/// Held-out metrics of `rules` under the run's mode.
Json evaluate_json(const Restored& r, const LogicProgram& rules) {
    if (const auto* k = std::get_if<KandinskyTask>(&r.task)) {
        auto pool = pool_for(r, true);
        return metrics_to_json(evaluate_constrained(rules, r.space, k->test, pool));
    }
    const auto& s = std::get<SymbolicTask>(r.task);
    if (r.cfg.train.mode == LearningMode::relational_embedded) {
        FactBase latent = latent_fact_base(s.train, symbolic_assignment(r), r.cfg.train.k);
        if (latent.positives.empty()) throw EvaluationError("no latent positives after clustering");
        return metrics_to_json(evaluate_rules(rules, latent, latent.positives.items(), {true}));
    }
    return metrics_to_json(evaluate_rules(rules, s.test, s.test_positives));
}

// ---------------------------------------------------------------------------
// Training

/// CSV of one training batch drawn as the trainer draws it, for debugging the
/// propositionalization.
std::string dump_xy(const Task& task, const RunConfig& cfg, const RunResult& run) {
    TrainingBatch batch;
    std::mt19937_64 rng(mix_seed(cfg.train.seed, 7));
    if (const auto* k = std::get_if<KandinskyTask>(&task)) {
        auto assignment = run.clustering->assign_all(instance_embeddings(*k, cfg.train, false));
        auto sets = instance_clusters(k->train, assignment, cfg.train.k);
        batch.x = Matrix(static_cast<int>(sets.size()), run.space.size());
        for (std::size_t i = 0; i < sets.size(); ++i) {
            auto row = lookup_instance_row(sets[i], run.space);
            std::copy(row.begin(), row.end(), batch.x.row(static_cast<int>(i)));
            batch.y.push_back(k->train[i].label ? 1.0 : 0.0);
        }
    } else {
        const auto& s = std::get<SymbolicTask>(task);
        int n = s.train.constants.size();
        bool embedded = cfg.train.mode == LearningMode::relational_embedded;
        auto g = embedded ? run.clustering->assign_all(constant_embeddings(s, cfg.train)) : identity_assignment(n);
        auto kb = build_latent_kb(s.train, g, embedded ? cfg.train.k : n, true);
        SubstitutionSampler sampler(s.train, run.space.target, run.space.d, cfg.train.sampler);
        batch = make_training_batch(sampler.sample(cfg.train.batch, rng), run.space, kb, g);
    }
    std::ostringstream out;
    for (const auto& a : run.space.atoms) out << '"' << format_atom(a, run.space.preds) << "\",";
    out << "y\n";
    for (int i = 0; i < batch.x.rows; ++i) {
        for (int j = 0; j < batch.x.cols; ++j) out << batch.x(i, j) << ",";
        out << batch.y[static_cast<std::size_t>(i)] << "\n";
    }
    return out.str();
}

std::string render_report(const fs::path& dir);

int cmd_train(const RunConfig& cfg, fs::path out, const std::string& xy_path, const Output& o) {
    if (out.empty()) out = default_out(cfg);
    Task task = load_task(cfg);
    std::string hash = dataset_hash(dataset_files(task), cfg);
    write_config(out, cfg);
    write_file(out / "dataset.hash", hash + "\n");
    // Artifacts derived from an earlier checkpoint in this directory are stale now.
    for (const char* name : {"extract_rules.txt", "extract_metrics.json", "eval_metrics.json", "semantics.json",
                             "invented.txt", "invent_metrics.json"})
        fs::remove(out / name);

    BestOfRuns best = train_best_of(task, cfg.train);
    const RunResult& run = best.best_run();
    const Signature& sig = run.space.preds;
    bool instance = cfg.train.mode == LearningMode::instance;

    Checkpoint ckpt;
    ckpt.config = cfg;
    ckpt.run_seed = run.seed;
    ckpt.params = run.params;
    if (run.clustering) {
        const Matrix& c = run.clustering->centroids();
        for (int i = 0; i < c.rows; ++i) ckpt.centroids.push_back(c.row_vector(i));
        ckpt.alpha = run.clustering->alpha();
    }
    ckpt.rules = format_program(run.rules, sig);
    ckpt.extracted = format_program(run.extracted, sig);
    write_file(out / "checkpoint.json", checkpoint_to_json(ckpt).dump() + "\n");
    write_file(out / "rules.txt", ckpt.rules);
    write_file(out / "extracted.txt", ckpt.extracted);
    write_file(out / "history.csv", history_csv(run.history));
    if (!xy_path.empty()) write_file(xy_path, dump_xy(task, cfg, run));

    double total = 0.0;
    Json runs = Json::array();
    for (std::size_t i = 0; i < best.runs.size(); ++i) {
        const auto& r = best.runs[i];
        total += r.seconds;
        Json j = metrics_to_json(r.metrics);
        j["run"] = i;
        j["seed"] = std::to_string(r.seed);
        j["seconds"] = r.seconds;
        j["budget_hit"] = r.budget_hit;
        j["rules"] = r.rules.rules.size();
        j["extracted"] = r.extracted.rules.size();
        if (instance) j["accuracy"] = r.accuracy;
        runs.push_back(std::move(j));
    }
    Json metrics = metrics_to_json(run.metrics);
    metrics["task"] = cfg.task;
    metrics["mode"] = to_string(cfg.train.mode);
    metrics["best_run"] = best.best;
    metrics["dataset_hash"] = hash;
    metrics["seconds"] = total;
    metrics["rules"] = run.rules.rules.size();
    metrics["extracted"] = run.extracted.rules.size();
    if (instance) metrics["accuracy"] = run.accuracy;
    metrics["runs"] = runs;
    write_file(out / "metrics.json", metrics.dump(2) + "\n");
    write_file(out / "report.txt", render_report(out));

    std::string text = cfg.task + ": best run " + std::to_string(best.best) + " of " + std::to_string(best.runs.size());
    if (instance) text += ", accuracy " + fixed(run.accuracy);
    else text += ", precision " + opt_fixed(run.metrics.precision) + ", recall " + fixed(run.metrics.recall);
    text += " (" + fixed(total, 1) + " s)\n";
    if (run.extracted.rules.empty()) text += "no atom exceeded the extraction threshold\n";
    text += ckpt.rules;
    Json j = metrics;
    j["dir"] = out.string();
    j["rule_text"] = ckpt.rules;
    o.emit(j, text);
    return 0;
}

// ---------------------------------------------------------------------------
// Extract / eval / invent

int cmd_extract(const fs::path& run_dir, const std::optional<double>& threshold, bool keep_all, fs::path out,
                const Output& o) {
    Restored r = restore(run_dir);
    if (threshold) r.cfg.train.net.extract_threshold = *threshold;
    if (keep_all) r.cfg.train.keep_all = true;
    r.cfg.train.validate();
    if (out.empty()) out = run_dir;
    LogicProgram extracted = extract_rules(r.params, r.space, r.cfg.train.net.extract_threshold);
    LogicProgram kept = filter_rules(r, extracted);
    std::string text = format_program(kept, r.space.preds);
    Json metrics = evaluate_json(r, kept);
    metrics["threshold"] = r.cfg.train.net.extract_threshold;
    metrics["extracted"] = extracted.rules.size();
    metrics["rules"] = kept.rules.size();
    write_file(out / "extract_rules.txt", text);
    write_file(out / "extract_metrics.json", metrics.dump(2) + "\n");
    Json j = metrics;
    j["rule_text"] = text;
    o.emit(j, (extracted.rules.empty() ? std::string("no atom exceeded the extraction threshold\n") : "") + text);
    return 0;
}

int cmd_eval(const std::string& rules_path, const fs::path& run_dir, const std::string& data_path,
             const ConfigFlags& flags, fs::path out, const Output& o) {
    std::string rules_text = read_file(rules_path);
    Metrics m;
    std::string label;
    if (!data_path.empty()) {
        FactBase fb = parse_facts(read_file(data_path));
        LogicProgram p = parse_program(rules_text, fb.preds, &fb.constants);
        m = evaluate_rules(p, fb, fb.positives.items());
        label = data_path;
    } else if (!run_dir.empty()) {
        Restored r = restore(run_dir);
        Signature sig = r.space.preds;
        LogicProgram p = parse_program(rules_text, sig);
        if (sig.size() != r.space.preds.size()) throw DataError("rules use predicates unknown to the task");
        Json j = evaluate_json(r, p);
        if (out.empty()) out = run_dir;
        write_file(out / "eval_metrics.json", j.dump(2) + "\n");
        o.emit(j, r.cfg.task + ": precision " + (j["precision"].is_null() ? "-" : fixed(j["precision"])) +
                      ", recall " + fixed(j["recall"]) + "\n");
        return 0;
    } else {
        RunConfig cfg = flags.resolve();
        if (is_kandinsky_task(cfg.task)) throw ConfigError("eval of instance rules needs --run");
        SymbolicTask s = std::get<SymbolicTask>(load_task(cfg));
        FactBase fb = s.test;
        LogicProgram p = parse_program(rules_text, fb.preds, &fb.constants);
        m = evaluate_rules(p, fb, s.test_positives);
        label = cfg.task;
        if (out.empty()) out = default_out(cfg);
    }
    Json j = metrics_to_json(m);
    if (!out.empty()) write_file(out / "eval_metrics.json", j.dump(2) + "\n");
    o.emit(j, label + ": precision " + opt_fixed(m.precision) + ", recall " + fixed(m.recall) + "\n");
    return 0;
}

struct InventFlags {
    std::string translator = "mock";
    std::string url;
    std::string model = "default";
    std::string token_env = "GILP_TRANSLATOR_TOKEN";
    double timeout = 30.0;
    std::string semantics;
    int evidence_cap = 20;
};

int cmd_invent(const fs::path& run_dir, const InventFlags& f, fs::path out, const Output& o) {
    Restored r = restore(run_dir);
    if (!std::holds_alternative<KandinskyTask>(r.task)) throw ConfigError("invent needs an instance-mode run");
    if (out.empty()) out = run_dir;
    const auto& k = std::get<KandinskyTask>(r.task);
    auto train_pool = pool_for(r, false);
    auto test_pool = pool_for(r, true);
    LogicProgram rules = filter_rules(r, extract_rules(r.params, r.space, r.cfg.train.net.extract_threshold));
    if (rules.rules.empty()) throw EvaluationError("the run has no rules to generalize");

    SemanticsBundle bundle;
    if (!f.semantics.empty()) {
        bundle = semantics_from_json(Json::parse(read_file(f.semantics)));
    } else {
        std::unique_ptr<Translator> tr;
        if (f.translator == "mock") {
            tr = std::make_unique<MockTranslator>();
        } else if (f.translator == "http") {
            if (f.url.empty()) throw ConfigError("--translator http needs --url");
            const char* token = std::getenv(f.token_env.c_str());
            tr = std::make_unique<HttpTranslator>(f.url, f.model, token ? token : "", f.timeout);
        } else {
            throw ConfigError("unknown translator: " + f.translator);
        }
        bundle = induce_semantics(rules, r.space, train_pool, *tr, f.evidence_cap, mix_seed(r.cfg.train.seed, 31));
    }
    InventedProgram inv = generalize_program(rules, r.space, bundle, train_pool, k.train);
    std::string text = format_program(inv.program, inv.preds);
    write_file(out / "semantics.json", semantics_to_json(bundle).dump(2) + "\n");
    write_file(out / "invented.txt", text);

    Json per_rule = Json::array();
    std::string lines;
    for (std::size_t i = 0; i < inv.program.rules.size(); ++i) {
        Metrics m = evaluate_invented_rule(inv, i, k.test, &test_pool);
        std::string rule = format_rule(inv.program.rules[i], inv.preds);
        Json j = metrics_to_json(m);
        j["rule"] = rule;
        per_rule.push_back(std::move(j));
        lines += rule + "  % precision " + opt_fixed(m.precision) + ", recall " + fixed(m.recall) + "\n";
    }
    Json metrics;
    metrics["constrained"] = metrics_to_json(evaluate_constrained(rules, r.space, k.test, test_pool));
    metrics["invented"] = metrics_to_json(evaluate_invented(inv, k.test, &test_pool));
    metrics["rules"] = per_rule;
    Json renamed = Json::object();
    for (const auto& [from, to] : inv.renamed) renamed[from] = to;
    metrics["renamed"] = renamed;
    write_file(out / "invent_metrics.json", metrics.dump(2) + "\n");
    o.emit(metrics, lines);
    return 0;
}

// ---------------------------------------------------------------------------
// Report

std::vector<fs::path> run_dirs(const fs::path& dir) {
    std::vector<fs::path> out;
    if (fs::exists(dir / "metrics.json")) out.push_back(dir);
    else if (fs::is_directory(dir))
        for (const auto& e : fs::directory_iterator(dir))
            if (e.is_directory() && fs::exists(e.path() / "metrics.json")) out.push_back(e.path());
    std::sort(out.begin(), out.end());
    if (out.empty()) throw DataError("no run directories under " + dir.string());
    return out;
}

std::string cell(const Json& v) { return v.is_null() ? std::string("-") : fixed(v.get<double>()); }

std::string render_report(const fs::path& dir) {
    std::ostringstream out;
    out << std::left << std::setw(24) << "Task" << std::setw(10) << "Mode" << std::setw(11) << "Precision"
        << std::setw(8) << "Recall" << std::setw(10) << "Accuracy" << std::setw(9) << "RT (s)" << "Runs\n";
    for (const auto& run : run_dirs(dir)) {
        Json m = Json::parse(read_file(run / "metrics.json"));
        out << std::setw(24) << m.at("task").get<std::string>() << std::setw(10) << m.at("mode").get<std::string>()
            << std::setw(11) << cell(m.at("precision")) << std::setw(8) << cell(m.at("recall")) << std::setw(10)
            << (m.contains("accuracy") ? cell(m["accuracy"]) : "-") << std::setw(9)
            << fixed(m.at("seconds").get<double>(), 1) << m.at("runs").size() << "\n";
    }
    for (const auto& run : run_dirs(dir)) {
        if (!fs::exists(run / "invent_metrics.json")) continue;
        Json m = Json::parse(read_file(run / "invent_metrics.json"));
        out << "\nInvented rules (" << run.filename().string() << ")\n";
        for (const auto& r : m.at("rules"))
            out << "  " << r.at("rule").get<std::string>() << "  precision " << cell(r.at("precision")) << ", recall "
                << cell(r.at("recall")) << "\n";
    }
    return out.str();
}

int cmd_report(const fs::path& dir, const std::string& out_file, const Output& o) {
    std::string text = render_report(dir);
    if (!out_file.empty()) write_file(out_file, text);
    Json rows = Json::array();
    for (const auto& run : run_dirs(dir)) rows.push_back(Json::parse(read_file(run / "metrics.json")));
    o.emit(rows, text);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Differentiable rule learner"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand
    Output output;
    app.add_flag("--json", output.json, "Machine-readable output on stdout");

    std::string out;
    auto add_out = [&](CLI::App* cmd) { cmd->add_option("--out", out, "Run directory to write into"); };

    auto* gen = app.add_subcommand("gen", "Generate a benchmark dataset");
    ConfigFlags gen_flags;
    gen_flags.attach(gen);
    add_out(gen);

    auto* train = app.add_subcommand("train", "Train the best of several seeded runs");
    ConfigFlags train_flags;
    train_flags.attach(train);
    add_out(train);
    std::string xy;
    train->add_option("--dump-xy", xy, "Write one training batch (X, y) as CSV");

    std::string run_dir;
    auto* extract = app.add_subcommand("extract", "Re-extract rules from a checkpoint");
    extract->add_option("--run", run_dir, "Run directory with checkpoint.json")->required();
    std::optional<double> threshold;
    extract->add_option_function<double>("--threshold", [&](double v) { threshold = v; }, "Extraction threshold");
    bool keep_all = false;
    extract->add_flag("--keep-all", keep_all, "Skip the training-precision filter");
    add_out(extract);

    auto* eval = app.add_subcommand("eval", "Evaluate a rules file");
    std::string rules_path, data_path;
    eval->add_option("--rules", rules_path, "Rules file")->required();
    eval->add_option("--run", run_dir, "Evaluate on the data of a trained run");
    eval->add_option("--data", data_path, "Facts file; its positives are the evaluation targets");
    ConfigFlags eval_flags;
    eval_flags.attach(eval);
    add_out(eval);

    auto* invent = app.add_subcommand("invent", "Name the placeholders of an instance-mode run");
    InventFlags inv;
    invent->add_option("--run", run_dir, "Run directory with checkpoint.json")->required();
    invent->add_option("--translator", inv.translator, "mock or http");
    invent->add_option("--url", inv.url, "Translator endpoint for --translator http");
    invent->add_option("--model", inv.model, "Model name sent to the translator");
    invent->add_option("--token-env", inv.token_env, "Environment variable holding the translator token");
    invent->add_option("--timeout", inv.timeout, "Translator timeout in seconds");
    invent->add_option("--semantics", inv.semantics, "Use this semantics bundle instead of translating");
    invent->add_option("--evidence", inv.evidence_cap, "Evidence objects per argument position");
    add_out(invent);

    auto* report = app.add_subcommand("report", "Summarize run directories");
    std::string report_dir = "runs", report_out;
    report->add_option("dir", report_dir, "Run directory or a directory of runs");
    report->add_option("--out", report_out, "Also write the report to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(ErrorClass::config);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.error_class());
    }

    try {
        if (gen->parsed()) return cmd_gen(gen_flags.resolve(), out, output);
        if (train->parsed()) return cmd_train(train_flags.resolve(), out, xy, output);
        if (extract->parsed()) return cmd_extract(run_dir, threshold, keep_all, out, output);
        if (eval->parsed()) return cmd_eval(rules_path, run_dir, data_path, eval_flags, out, output);
        if (invent->parsed()) return cmd_invent(run_dir, inv, out, output);
        return cmd_report(report_dir, report_out, output);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.error_class());
    } catch (const Json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(ErrorClass::data);
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(ErrorClass::data);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
