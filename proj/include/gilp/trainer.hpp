#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gilp/clustering.hpp"
#include "gilp/network.hpp"
#include "gilp/substitution.hpp"
#include "gilp/tasks.hpp"

namespace gilp {

enum class LearningMode { symbolic, relational_embedded, instance };

struct TrainConfig {
    NetworkConfig net;
    LearningMode mode = LearningMode::symbolic;
    int d = 0;  // rule variables; 0 takes the task default
    int epochs = 2000;
    int batch = 32;  // positive substitutions (or instances) per epoch
    int runs = 10;
    std::uint64_t seed = 0;
    double budget_seconds = 300.0;  // wall clock for all runs together
    bool keep_all = false;           // skip the training-precision filter
    SamplerOptions sampler;
    /// Consecutive epochs with MSE below 1e-4 that end a run (0 disables).
    int early_stop_patience = 20;
    /// Epochs a unit may stay inactive on every batch row before its row is
    /// redrawn (0 disables).
    int revive_patience = 50;

    // Clustering (embedded and instance modes).
    int k = 10;
    double alpha = 20.0;
    double lambda = 0.0;
    double centroid_lr = 0.5;
    double noise_scale = 0.0;  // toy encoder noise

    void validate() const;
};

/// Per-task defaults for the symbolic benchmarks and the two embedded/instance families.
TrainConfig default_config(const std::string& task);

struct HistoryRow {
    int epoch = 0;
    double h = 0.0;
    double mse = 0.0;
    double cluster = 0.0;
    double acc = 0.0;
};

struct RunResult {
    std::uint64_t seed = 0;
    NetworkParams params;
    std::optional<Clustering> clustering;
    BodyAtomSpace space;
    LogicProgram extracted;  // deduplicated, before filtering
    LogicProgram rules;      // after the precision filter (or keep-all)
    Metrics metrics;         // held-out evaluation of `rules` (instance mode: per instance)
    double accuracy = 0.0;   // instance mode: held-out classification accuracy
    std::vector<HistoryRow> history;
    SamplerStats sampler_stats;
    double seconds = 0.0;
    bool budget_hit = false;
};

struct BestOfRuns {
    std::vector<RunResult> runs;
    std::size_t best = 0;
    const RunResult& best_run() const { return runs.at(best); }
};

/// A relational task lifted to latent constants: constants are latent ids,
/// background holds generalized facts, positives are latent target atoms
/// whose members are mostly positive examples.
FactBase latent_fact_base(const FactBase& fb, const std::vector<int>& g, int num_latent);

/// Embeddings of the training constants in relational-embedded mode: the
/// task's supplied embeddings, else toy digit encodings of the labels.
Matrix constant_embeddings(const SymbolicTask& task, const TrainConfig& cfg);

RunResult train_symbolic_run(const SymbolicTask& task, const TrainConfig& cfg, std::uint64_t run_seed,
                             double budget_seconds);
RunResult train_embedded_run(const SymbolicTask& task, const TrainConfig& cfg, std::uint64_t run_seed,
                             double budget_seconds);
RunResult train_instance_run(const KandinskyTask& task, const TrainConfig& cfg, std::uint64_t run_seed,
                             double budget_seconds);

/// Runs cfg.runs seeds and keeps the run whose precision-filtered program has
/// the highest held-out recall (instance mode: accuracy). Ties keep the
/// earlier run.
BestOfRuns train_best_of(const Task& task, const TrainConfig& cfg);

/// Object embeddings of one Kandinsky split as used by instance training:
/// the task's supplied embeddings, else the toy encoder.
Matrix instance_embeddings(const KandinskyTask& task, const TrainConfig& cfg, bool test_split);

/// Object embeddings for the instances of one split, in instance order.
Matrix object_embeddings(const std::vector<KandinskyInstance>& instances, const FeatureEncoder& enc,
                         std::uint64_t seed);

/// Cluster set of each instance given per-object assignments in instance order.
std::vector<std::vector<bool>> instance_clusters(const std::vector<KandinskyInstance>& instances,
                                                 const std::vector<int>& assignment, int k);

}  // namespace gilp
