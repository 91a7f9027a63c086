#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "gilp/logic.hpp"
#include "gilp/matrix.hpp"

namespace gilp {

enum class SpaceMode { relations_defined, relations_undefined };

/// Ordered candidate body atoms over variables 1..d. Coordinate j of a
/// network input is the truth value of `atoms[j]` under a substitution.
struct BodyAtomSpace {
    SpaceMode mode = SpaceMode::relations_defined;
    int d = 2;
    Signature preds;  // task predicates, plus placeholders in undefined mode
    int target = 0;   // head predicate id in `preds`
    std::vector<Atom> atoms;

    int size() const { return static_cast<int>(atoms.size()); }
    Atom head() const;
};

/// |R_b| d (d-1) + |R_u| d - 1 candidate atoms: every predicate in table
/// order over ordered tuples of distinct variables, minus the target atom in
/// head-variable order. Throws ConfigError when d < arity(target).
BodyAtomSpace enumerate_body_atoms(const Signature& preds, int d, int target);

/// Relation-free space over d constrained variables: placeholders p_i(V_i)
/// then p_i_j(V_i, V_j) for i < j, without the final pair, giving
/// d (d-1)/2 + d - 1 atoms. The head is the nullary predicate `positive`.
BodyAtomSpace enumerate_placeholder_atoms(int d);

std::size_t body_space_size(int binary_relations, int unary_relations, int d);
std::size_t placeholder_space_size(int d);

/// Background knowledge over generalized constants: every fact of the source
/// with each argument c replaced by g[c].
struct LatentKB {
    int num_latent = 0;
    Interpretation facts;
};

/// `g` maps constant ids of `fb` to latent ids. With `include_positives` the
/// positive examples join the background (needed by recursive rules).
LatentKB build_latent_kb(const FactBase& fb, const std::vector<int>& g, int num_latent, bool include_positives);

/// Identity generalization used for symbolic data.
std::vector<int> identity_assignment(int num_constants);

/// Substitution: entry v is the constant bound to variable v (index 0 unused).
using Assignment = std::vector<int>;

struct SubstitutionBatch {
    std::vector<Assignment> pos;
    std::vector<Assignment> neg;
};

struct SamplerStats {
    std::size_t negative_collisions = 0;  // negatives that stayed positive after rejection
    std::size_t connected_fallbacks = 0;  // empty Connected(e_x, e_y) sets
};

struct SamplerOptions {
    /// Probability of drawing an auxiliary variable among the neighbours of
    /// constants already bound (0 disables). Negatives then redraw their
    /// auxiliaries around the new head binding.
    double chain_bias = 0.0;
    int max_rejections = 20;
};

/// Positive and negative substitutions for a target predicate. Positives bind
/// the head variables to a positive example and the auxiliaries uniformly
/// (for binary targets with d = 3, V3 comes from constants sharing a fact
/// with both head constants). A negative copies its positive and rebinds X to
/// another constant whose head atom is not a positive example.
class SubstitutionSampler {
public:
    SubstitutionSampler(const FactBase& fb, int target, int d, SamplerOptions options = {});

    SubstitutionBatch sample(int batch, std::mt19937_64& rng);
    const SamplerStats& stats() const { return stats_; }

private:
    Assignment positive(std::mt19937_64& rng);
    Assignment negative(const Assignment& pos, std::mt19937_64& rng);
    int uniform(std::mt19937_64& rng) const;
    void fill_auxiliaries(Assignment& theta, int first_aux, std::mt19937_64& rng) const;

    const FactBase& fb_;
    int target_;
    int arity_;
    int d_;
    SamplerOptions options_;
    std::vector<Fact> positives_;
    std::vector<std::vector<int>> neighbours_;
    SamplerStats stats_;
};

/// Truth values of the space's atoms under `theta`, reading arguments through `g`.
std::vector<double> lookup_row(const Assignment& theta, const BodyAtomSpace& space, const LatentKB& kb,
                               const std::vector<int>& g);

/// Instance mode: atom j holds iff every constrained variable it mentions
/// names a cluster present in `clusters` (variable i stands for cluster i-1).
std::vector<double> lookup_instance_row(const std::vector<bool>& clusters, const BodyAtomSpace& space);

struct TrainingBatch {
    Matrix x;
    std::vector<double> y;
};

TrainingBatch make_training_batch(const SubstitutionBatch& sub, const BodyAtomSpace& space, const LatentKB& kb,
                                  const std::vector<int>& g);

}  // namespace gilp
