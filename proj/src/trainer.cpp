#include "gilp/trainer.hpp"

#include "gilp/invention.hpp"

#include <chrono>
#include <cmath>
#include <map>

namespace gilp {

void TrainConfig::validate() const {
    net.validate();
    if (d < 0) throw ConfigError("variable count must be non-negative");
    if (epochs < 1) throw ConfigError("epochs must be positive");
    if (batch < 1) throw ConfigError("batch must be positive");
    if (runs < 1) throw ConfigError("runs must be positive");
    if (!(budget_seconds > 0.0)) throw ConfigError("budget must be positive");
    if (k < 1) throw ConfigError("cluster count must be positive");
    if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
    if (lambda < 0.0) throw ConfigError("lambda must be non-negative");
    if (early_stop_patience < 0) throw ConfigError("early-stop patience must be non-negative");
    if (revive_patience < 0) throw ConfigError("revive patience must be non-negative");
    if (noise_scale < 0.0) throw ConfigError("noise scale must be non-negative");
    if (sampler.chain_bias < 0.0 || sampler.chain_bias > 1.0) throw ConfigError("chain bias must lie in [0, 1]");
}

TrainConfig default_config(const std::string& task) {
    TrainConfig c;
    if (is_kandinsky_task(task)) {
        c.mode = LearningMode::instance;
        c.k = 10;
        c.alpha = 20.0;
        c.lambda = 4.0;
        c.net.init_scale = 5.0;
        c.centroid_lr = 0.5;
        c.net.rule_lr = 0.05;
        if (task == "kandinsky_two_pair") {
            c.net.rule_lr = 0.5;
            c.centroid_lr = 0.1;
            // Pair-presence atoms overfit 30 instances; decay keeps the disjunction broad.
            c.net.weight_decay = 0.2;
        }
        c.net.widths = {64, 64};
        c.epochs = 1000;
        return c;
    }
    // Wide layers give many candidate rows; training runs the full epoch budget
    // because shortcut atoms fit the sampled batches long before every rule
    // has been found.
    c.net.widths = {64, 64};
    c.net.init_scale = 5.0;
    c.net.extract_threshold = 0.2;
    c.epochs = 1000;
    c.early_stop_patience = 0;
    if (task == "length") c.sampler.chain_bias = 0.5;
    // The out-degree of X alone separates this task's classes statistically; a
    // narrower disjunction keeps those partial matches from saturating the output.
    if (task == "two_children") c.net.widths = {32, 16};
    if (task == "mnist_sequence") {
        c.mode = LearningMode::relational_embedded;
        c.k = 10;
        c.lambda = 1.0;
    }
    return c;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
    return std::chrono::duration<double>(Clock::now() - t).count();
}

double accuracy(const std::vector<double>& pred, const std::vector<double>& y) {
    if (pred.empty()) return 0.0;
    std::size_t ok = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) ok += (pred[i] >= 0.5) == (y[i] >= 0.5);
    return static_cast<double>(ok) / static_cast<double>(pred.size());
}

/// Counts consecutive epochs without activity per unit and redraws stale units.
class Reviver {
public:
    Reviver(const NetworkConfig& net, int patience) : patience_(patience), init_scale_(net.init_scale) {
        for (int w : net.widths) idle_.emplace_back(static_cast<std::size_t>(w), 0);
    }

    void update(NetworkParams& params, const Gradients& g, std::mt19937_64& rng) {
        if (patience_ <= 0) return;
        for (std::size_t l = 0; l < idle_.size(); ++l)
            for (std::size_t u = 0; u < idle_[l].size(); ++u) {
                idle_[l][u] = g.active[l][u] > 0 ? 0 : idle_[l][u] + 1;
                if (idle_[l][u] < patience_) continue;
                reseed_unit(params, static_cast<int>(l), static_cast<int>(u), init_scale_, rng);
                idle_[l][u] = 0;
            }
    }

private:
    int patience_;
    double init_scale_;
    std::vector<std::vector<int>> idle_;
};

/// One optimisation step; returns the training MSE and accuracy.
std::pair<double, double> step(NetworkParams& params, const TrainingBatch& batch, const NetworkConfig& net,
                               Reviver& reviver, std::mt19937_64& rng) {
    Gradients g = backward(batch.x, batch.y, params, net);
    if (!std::isfinite(g.mse)) throw TrainingError("loss diverged (non-finite MSE)");
    AdamWOptions adam;
    adam.weight_decay = net.weight_decay;
    adamw_step(params, g, net.rule_lr, adam);
    reviver.update(params, g, rng);
    for (const auto& m : params.raw)
        for (double v : m.data)
            if (!std::isfinite(v)) throw TrainingError("parameters diverged (non-finite weight)");
    return {g.mse, accuracy(g.predictions, batch.y)};
}

/// Tracks the early-stop rule: MSE below 1e-4 for `patience` consecutive epochs.
struct EarlyStop {
    int patience = 20;
    int streak = 0;
    bool update(double mse) {
        streak = mse < 1e-4 ? streak + 1 : 0;
        return patience > 0 && streak >= patience;
    }
};

LogicProgram precision_filter(const LogicProgram& extracted, const FactBase& fb) {
    LogicProgram kept;
    for (const auto& r : extracted.rules) {
        auto p = rule_precision(r, fb);
        if (p && *p == 1.0) kept.rules.push_back(r);
    }
    return kept;
}

int task_variables(const SymbolicTask& task, const TrainConfig& cfg) { return cfg.d > 0 ? cfg.d : task.variables; }

}  // namespace

FactBase latent_fact_base(const FactBase& fb, const std::vector<int>& g, int num_latent) {
    FactBase out;
    out.preds = fb.preds;
    for (int i = 0; i < num_latent; ++i) out.constants.intern("c" + std::to_string(i));
    auto map = [&](int c) { return c < 0 ? -1 : g.at(static_cast<std::size_t>(c)); };
    for (const auto& f : fb.background) out.background.insert({f.pred, map(f.a), map(f.b)});

    // Vote per latent target atom: positives against every other constant tuple.
    std::map<Fact, std::pair<long, long>> votes;
    for (int p = 0; p < fb.preds.size(); ++p) {
        if (fb.preds[p].kind != PredicateKind::target) continue;
        int n = fb.constants.size();
        int second = fb.preds[p].arity == 2 ? n : 1;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < second; ++b) {
                Fact f{p, a, fb.preds[p].arity == 2 ? b : -1};
                bool pos = fb.positives.contains(f);
                // With explicit negatives only labelled atoms vote; otherwise the closed world applies.
                if (!pos && !fb.negatives.empty() && !fb.negatives.contains(f)) continue;
                auto& v = votes[{p, map(f.a), map(f.b)}];
                (pos ? v.first : v.second) += 1;
            }
    }
    for (const auto& [f, v] : votes) {
        if (v.first == 0) continue;
        if (v.first > v.second) out.positives.insert(f);
        else out.background.insert(f);  // minority evidence stays visible to rule bodies
    }
    return out;
}

Matrix constant_embeddings(const SymbolicTask& task, const TrainConfig& cfg) {
    int n = task.train.constants.size();
    if (!task.embeddings.empty()) {
        if (static_cast<int>(task.embeddings.size()) != n)
            throw DataError("embedded mode needs an embedding for every constant");
        return Matrix::from_rows(task.embeddings);
    }
    if (static_cast<int>(task.digit_labels.size()) != n)
        throw DataError("embedded mode needs an embedding for every constant");
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < n; ++i)
        rows.push_back(encode_digit(task.digit_labels[static_cast<std::size_t>(i)], cfg.noise_scale,
                                    mix_seed(cfg.seed, static_cast<std::uint64_t>(i))));
    return Matrix::from_rows(rows);
}

RunResult train_symbolic_run(const SymbolicTask& task, const TrainConfig& cfg, std::uint64_t run_seed,
                             double budget_seconds) {
    auto start = Clock::now();
    cfg.validate();
    RunResult run;
    run.seed = run_seed;
    const FactBase& train = task.train;
    int target = train.preds.id(task.target);
    run.space = enumerate_body_atoms(train.preds, task_variables(task, cfg), target);
    auto g = identity_assignment(train.constants.size());
    LatentKB kb = build_latent_kb(train, g, train.constants.size(), true);
    std::mt19937_64 rng(run_seed);
    run.params = init_network(run.space.size(), cfg.net, rng);
    SubstitutionSampler sampler(train, target, run.space.d, cfg.sampler);
    EarlyStop stop{cfg.early_stop_patience};
    Reviver reviver(cfg.net, cfg.revive_patience);
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        auto batch = make_training_batch(sampler.sample(cfg.batch, rng), run.space, kb, g);
        auto [loss, acc] = step(run.params, batch, cfg.net, reviver, rng);
        run.history.push_back({epoch, loss, loss, 0.0, acc});
        if (stop.update(loss)) break;
        if (seconds_since(start) > budget_seconds) {
            run.budget_hit = true;
            break;
        }
    }
    run.sampler_stats = sampler.stats();
    run.extracted = extract_rules(run.params, run.space, cfg.net.extract_threshold);
    run.rules = cfg.keep_all ? run.extracted : precision_filter(run.extracted, train);
    run.metrics = evaluate_rules(run.rules, task.test, task.test_positives);
    run.seconds = seconds_since(start);
    return run;
}

RunResult train_embedded_run(const SymbolicTask& task, const TrainConfig& cfg, std::uint64_t run_seed,
                             double budget_seconds) {
    auto start = Clock::now();
    cfg.validate();
    RunResult run;
    run.seed = run_seed;
    const FactBase& train = task.train;
    int target = train.preds.id(task.target);
    run.space = enumerate_body_atoms(train.preds, task_variables(task, cfg), target);
    Matrix emb = constant_embeddings(task, cfg);
    if (cfg.k > emb.rows) throw ConfigError("more clusters than constants");
    Clustering clustering = init_clustering(emb, cfg.k, cfg.alpha, mix_seed(run_seed, 1), 0);
    std::mt19937_64 rng(run_seed);
    run.params = init_network(run.space.size(), cfg.net, rng);
    SubstitutionSampler sampler(train, target, run.space.d, cfg.sampler);
    std::vector<int> g;
    LatentKB kb;
    EarlyStop stop{cfg.early_stop_patience};
    Reviver reviver(cfg.net, cfg.revive_patience);
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        auto assignment = clustering.assign_all(emb);
        if (assignment != g) {
            g = std::move(assignment);
            kb = build_latent_kb(train, g, cfg.k, true);
        }
        auto batch = make_training_batch(sampler.sample(cfg.batch, rng), run.space, kb, g);
        auto [loss, acc] = step(run.params, batch, cfg.net, reviver, rng);
        double cl = clustering.loss(emb) / emb.rows;
        clustering.step(emb, cfg.centroid_lr, cfg.lambda);
        run.history.push_back({epoch, loss + cfg.lambda * cl, loss, cl, acc});
        if (stop.update(loss)) break;
        if (seconds_since(start) > budget_seconds) {
            run.budget_hit = true;
            break;
        }
    }
    g = clustering.assign_all(emb);
    FactBase latent = latent_fact_base(train, g, cfg.k);
    run.sampler_stats = sampler.stats();
    run.extracted = extract_rules(run.params, run.space, cfg.net.extract_threshold);
    run.rules = cfg.keep_all ? run.extracted : precision_filter(run.extracted, latent);
    if (latent.positives.empty()) throw EvaluationError("no latent positives after clustering");
    run.metrics = evaluate_rules(run.rules, latent, latent.positives.items(), {true});
    run.clustering = std::move(clustering);
    run.seconds = seconds_since(start);
    return run;
}

Matrix instance_embeddings(const KandinskyTask& task, const TrainConfig& cfg, bool test_split) {
    const auto& instances = test_split ? task.test : task.train;
    const auto& given = test_split ? task.test_embeddings : task.train_embeddings;
    if (given.empty())
        return object_embeddings(instances, FeatureEncoder{8, cfg.noise_scale, 1.0}, mix_seed(cfg.seed, test_split ? 12 : 11));
    std::size_t objects = 0;
    for (const auto& inst : instances) objects += inst.objects.size();
    if (given.size() != objects) throw DataError("object embeddings do not match the instance objects");
    return Matrix::from_rows(given);
}

Matrix object_embeddings(const std::vector<KandinskyInstance>& instances, const FeatureEncoder& enc,
                         std::uint64_t seed) {
    std::vector<std::vector<double>> rows;
    std::uint64_t index = 0;
    for (const auto& inst : instances)
        for (const auto& o : inst.objects) rows.push_back(encode_object(o, enc, mix_seed(seed, index++)));
    return Matrix::from_rows(rows);
}

std::vector<std::vector<bool>> instance_clusters(const std::vector<KandinskyInstance>& instances,
                                                 const std::vector<int>& assignment, int k) {
    std::vector<std::vector<bool>> out;
    std::size_t index = 0;
    for (const auto& inst : instances) {
        std::vector<bool> present(static_cast<std::size_t>(k), false);
        for (std::size_t i = 0; i < inst.objects.size(); ++i) present[static_cast<std::size_t>(assignment.at(index++))] = true;
        out.push_back(std::move(present));
    }
    return out;
}

namespace {

TrainingBatch instance_batch(const std::vector<KandinskyInstance>& instances, const std::vector<int>& assignment,
                             const BodyAtomSpace& space, int k) {
    auto sets = instance_clusters(instances, assignment, k);
    TrainingBatch b;
    b.x = Matrix(static_cast<int>(instances.size()), space.size());
    for (std::size_t i = 0; i < instances.size(); ++i) {
        auto row = lookup_instance_row(sets[i], space);
        std::copy(row.begin(), row.end(), b.x.row(static_cast<int>(i)));
        b.y.push_back(instances[i].label ? 1.0 : 0.0);
    }
    return b;
}

}  // namespace

RunResult train_instance_run(const KandinskyTask& task, const TrainConfig& cfg, std::uint64_t run_seed,
                             double budget_seconds) {
    auto start = Clock::now();
    cfg.validate();
    RunResult run;
    run.seed = run_seed;
    Matrix train_emb = instance_embeddings(task, cfg, false);
    Matrix test_emb = instance_embeddings(task, cfg, true);
    if (cfg.k > train_emb.rows) throw ConfigError("more clusters than training objects");
    run.space = enumerate_placeholder_atoms(cfg.k);
    Clustering clustering = init_clustering(train_emb, cfg.k, cfg.alpha, mix_seed(run_seed, 1), 0);
    std::mt19937_64 rng(run_seed);
    run.params = init_network(run.space.size(), cfg.net, rng);
    EarlyStop stop{cfg.early_stop_patience};
    Reviver reviver(cfg.net, cfg.revive_patience);
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        auto batch = instance_batch(task.train, clustering.assign_all(train_emb), run.space, cfg.k);
        auto [loss, acc] = step(run.params, batch, cfg.net, reviver, rng);
        double cl = clustering.loss(train_emb) / train_emb.rows;
        if (cfg.lambda > 0.0) clustering.step(train_emb, cfg.centroid_lr, cfg.lambda);
        run.history.push_back({epoch, loss + cfg.lambda * cl, loss, cl, acc});
        if (stop.update(loss)) break;
        if (seconds_since(start) > budget_seconds) {
            run.budget_hit = true;
            break;
        }
    }
    auto test_batch = instance_batch(task.test, clustering.assign_all(test_emb), run.space, cfg.k);
    run.accuracy = accuracy(forward_batch(test_batch.x, run.params, cfg.net), test_batch.y);
    run.extracted = extract_rules(run.params, run.space, cfg.net.extract_threshold);
    run.rules = run.extracted;
    if (!cfg.keep_all) {
        // Keep rules that never fire on a negative training instance.
        auto pool = ObjectPool::build(task.train, clustering.assign_all(train_emb));
        run.rules.rules.clear();
        for (const auto& r : run.extracted.rules) {
            auto m = evaluate_constrained({{r}}, run.space, task.train, pool);
            if (m.precision && *m.precision == 1.0) run.rules.rules.push_back(r);
        }
    }
    run.metrics = evaluate_constrained(run.rules, run.space, task.test,
                                       ObjectPool::build(task.test, clustering.assign_all(test_emb)));
    run.clustering = std::move(clustering);
    run.seconds = seconds_since(start);
    return run;
}

BestOfRuns train_best_of(const Task& task, const TrainConfig& cfg) {
    cfg.validate();
    auto start = Clock::now();
    BestOfRuns out;
    auto score = [&](const RunResult& r) {
        if (cfg.mode == LearningMode::instance) return r.accuracy;
        bool precise = r.metrics.precision && *r.metrics.precision == 1.0;
        return (precise ? 1.0 : 0.0) + r.metrics.recall;
    };
    for (int i = 0; i < cfg.runs; ++i) {
        double left = cfg.budget_seconds - seconds_since(start);
        if (left <= 0.0 && !out.runs.empty()) break;
        double share = std::max(left, 1e-3) / (cfg.runs - i);
        std::uint64_t seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(i) + 100);
        RunResult r;
        if (const auto* k = std::get_if<KandinskyTask>(&task)) {
            r = train_instance_run(*k, cfg, seed, share);
        } else {
            const auto& s = std::get<SymbolicTask>(task);
            r = cfg.mode == LearningMode::relational_embedded ? train_embedded_run(s, cfg, seed, share)
                                                               : train_symbolic_run(s, cfg, seed, share);
        }
        out.runs.push_back(std::move(r));
        if (score(out.runs.back()) > score(out.runs[out.best])) out.best = out.runs.size() - 1;
    }
    return out;
}

}  // namespace gilp
