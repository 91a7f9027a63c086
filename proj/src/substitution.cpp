#include "gilp/substitution.hpp"

#include <algorithm>
#include <numeric>

namespace gilp {

Atom BodyAtomSpace::head() const {
    Atom a{target, {}};
    for (int i = 1; i <= preds[target].arity; ++i) a.terms.push_back(Term::var(i));
    return a;
}

std::size_t body_space_size(int binary_relations, int unary_relations, int d) {
    auto dd = static_cast<std::size_t>(d);
    return static_cast<std::size_t>(binary_relations) * dd * (dd - 1) + static_cast<std::size_t>(unary_relations) * dd - 1;
}

std::size_t placeholder_space_size(int d) {
    auto dd = static_cast<std::size_t>(d);
    return dd * (dd - 1) / 2 + dd - 1;
}

BodyAtomSpace enumerate_body_atoms(const Signature& preds, int d, int target) {
    if (target < 0 || target >= preds.size()) throw ConfigError("target predicate not in the table");
    if (d < preds[target].arity) throw ConfigError("variable count below the target arity");
    if (d > 6) throw ConfigError("at most 6 variables per rule are supported");
    BodyAtomSpace space;
    space.mode = SpaceMode::relations_defined;
    space.d = d;
    space.preds = preds;
    space.target = target;
    Atom head = space.head();
    for (int p = 0; p < preds.size(); ++p) {
        int arity = preds[p].arity;
        if (arity == 1) {
            for (int i = 1; i <= d; ++i) space.atoms.push_back({p, {Term::var(i)}});
        } else if (arity == 2) {
            for (int i = 1; i <= d; ++i)
                for (int j = 1; j <= d; ++j)
                    if (i != j) space.atoms.push_back({p, {Term::var(i), Term::var(j)}});
        }
    }
    std::erase(space.atoms, head);
    return space;
}

BodyAtomSpace enumerate_placeholder_atoms(int d) {
    if (d < 2) throw ConfigError("relation-free space needs at least two constrained variables");
    BodyAtomSpace space;
    space.mode = SpaceMode::relations_undefined;
    space.d = d;
    space.target = space.preds.intern("positive", 0, PredicateKind::target);
    for (int i = 1; i <= d; ++i) {
        int p = space.preds.intern("p_" + std::to_string(i), 1, PredicateKind::placeholder);
        space.atoms.push_back({p, {Term::var(i)}});
    }
    for (int i = 1; i <= d; ++i)
        for (int j = i + 1; j <= d; ++j) {
            if (i == d - 1 && j == d) continue;
            int p = space.preds.intern("p_" + std::to_string(i) + "_" + std::to_string(j), 2, PredicateKind::placeholder);
            space.atoms.push_back({p, {Term::var(i), Term::var(j)}});
        }
    return space;
}

std::vector<int> identity_assignment(int num_constants) {
    std::vector<int> g(static_cast<std::size_t>(num_constants));
    std::iota(g.begin(), g.end(), 0);
    return g;
}

LatentKB build_latent_kb(const FactBase& fb, const std::vector<int>& g, int num_latent, bool include_positives) {
    if (static_cast<int>(g.size()) < fb.constants.size()) throw DataError("missing generalization for some constants");
    LatentKB kb;
    kb.num_latent = num_latent;
    auto map = [&](int c) {
        if (c < 0) return -1;
        int l = g[static_cast<std::size_t>(c)];
        if (l < 0 || l >= num_latent) throw DataError("latent id out of range");
        return l;
    };
    auto add = [&](const Fact& f) { kb.facts.insert({f.pred, map(f.a), map(f.b)}); };
    for (const auto& f : fb.background) add(f);
    if (include_positives)
        for (const auto& f : fb.positives) add(f);
    return kb;
}

// ---------------------------------------------------------------------------
// Sampling

SubstitutionSampler::SubstitutionSampler(const FactBase& fb, int target, int d, SamplerOptions options)
    : fb_(fb), target_(target), arity_(fb.preds[target].arity), d_(d), options_(options) {
    if (fb.constants.size() < 2) throw DataError("need at least two constants to sample substitutions");
    if (d < arity_) throw ConfigError("variable count below the target arity");
    for (const auto& f : fb.positives)
        if (f.pred == target) positives_.push_back(f);
    if (positives_.empty()) throw DataError("no positive examples for the target predicate");
    neighbours_.resize(static_cast<std::size_t>(fb.constants.size()));
    auto link = [&](const Fact& f) {
        if (f.a < 0 || f.b < 0 || f.a == f.b) return;
        neighbours_[static_cast<std::size_t>(f.a)].push_back(f.b);
        neighbours_[static_cast<std::size_t>(f.b)].push_back(f.a);
    };
    for (const auto& f : fb.background) link(f);
    for (const auto& f : fb.positives) link(f);
    for (auto& n : neighbours_) {
        std::sort(n.begin(), n.end());
        n.erase(std::unique(n.begin(), n.end()), n.end());
    }
}

int SubstitutionSampler::uniform(std::mt19937_64& rng) const {
    return std::uniform_int_distribution<int>(0, fb_.constants.size() - 1)(rng);
}

Assignment SubstitutionSampler::positive(std::mt19937_64& rng) {
    Assignment theta(static_cast<std::size_t>(d_) + 1, -1);
    const Fact& e = positives_[std::uniform_int_distribution<std::size_t>(0, positives_.size() - 1)(rng)];
    theta[1] = e.a;
    int first_aux = 2;
    if (arity_ == 2) {
        theta[2] = e.b;
        first_aux = 3;
        if (d_ == 3) {
            const auto& na = neighbours_[static_cast<std::size_t>(e.a)];
            const auto& nb = neighbours_[static_cast<std::size_t>(e.b)];
            std::vector<int> both;
            std::set_intersection(na.begin(), na.end(), nb.begin(), nb.end(), std::back_inserter(both));
            if (both.empty()) {
                ++stats_.connected_fallbacks;
                theta[3] = uniform(rng);
            } else {
                theta[3] = both[std::uniform_int_distribution<std::size_t>(0, both.size() - 1)(rng)];
            }
            return theta;
        }
    }
    fill_auxiliaries(theta, first_aux, rng);
    return theta;
}

void SubstitutionSampler::fill_auxiliaries(Assignment& theta, int first_aux, std::mt19937_64& rng) const {
    std::bernoulli_distribution chain(options_.chain_bias);
    for (int v = first_aux; v <= d_; ++v) {
        auto& slot = theta[static_cast<std::size_t>(v)];
        if (options_.chain_bias > 0.0 && chain(rng)) {
            std::vector<int> pool;
            auto bound = theta.begin() + 1;
            auto bound_end = theta.begin() + v;
            for (int u = 1; u < v; ++u)
                for (int c : neighbours_[static_cast<std::size_t>(theta[static_cast<std::size_t>(u)])])
                    if (std::find(bound, bound_end, c) == bound_end) pool.push_back(c);
            if (!pool.empty()) {
                slot = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
                continue;
            }
        }
        slot = uniform(rng);
    }
}

Assignment SubstitutionSampler::negative(const Assignment& pos, std::mt19937_64& rng) {
    Assignment theta = pos;
    auto head = [&](const Assignment& t) { return Fact{target_, t[1], arity_ == 2 ? t[2] : -1}; };
    for (int attempt = 0; attempt <= options_.max_rejections; ++attempt) {
        int c = uniform(rng);
        if (c == pos[1]) c = (c + 1) % fb_.constants.size();
        theta[1] = c;
        if (fb_.positives.contains(head(theta))) continue;
        // Chained auxiliaries depend on X, so they are redrawn around the new binding.
        if (options_.chain_bias > 0.0 && !(arity_ == 2 && d_ == 3)) fill_auxiliaries(theta, arity_ + 1, rng);
        return theta;
    }
    ++stats_.negative_collisions;
    return theta;
}

SubstitutionBatch SubstitutionSampler::sample(int batch, std::mt19937_64& rng) {
    SubstitutionBatch out;
    for (int i = 0; i < batch; ++i) {
        out.pos.push_back(positive(rng));
        out.neg.push_back(negative(out.pos.back(), rng));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Lookup

std::vector<double> lookup_row(const Assignment& theta, const BodyAtomSpace& space, const LatentKB& kb,
                               const std::vector<int>& g) {
    std::vector<double> row(space.atoms.size(), 0.0);
    auto latent = [&](const Term& t) {
        int c = t.is_var() ? theta.at(static_cast<std::size_t>(t.value)) : t.value;
        return g.at(static_cast<std::size_t>(c));
    };
    for (std::size_t j = 0; j < space.atoms.size(); ++j) {
        const Atom& a = space.atoms[j];
        Fact f{a.pred, -1, -1};
        if (!a.terms.empty()) f.a = latent(a.terms[0]);
        if (a.terms.size() > 1) f.b = latent(a.terms[1]);
        row[j] = kb.facts.contains(f) ? 1.0 : 0.0;
    }
    return row;
}

std::vector<double> lookup_instance_row(const std::vector<bool>& clusters, const BodyAtomSpace& space) {
    std::vector<double> row(space.atoms.size(), 0.0);
    for (std::size_t j = 0; j < space.atoms.size(); ++j) {
        bool all = true;
        for (const auto& t : space.atoms[j].terms) {
            auto c = static_cast<std::size_t>(t.value - 1);
            all = all && c < clusters.size() && clusters[c];
        }
        row[j] = all ? 1.0 : 0.0;
    }
    return row;
}

TrainingBatch make_training_batch(const SubstitutionBatch& sub, const BodyAtomSpace& space, const LatentKB& kb,
                                  const std::vector<int>& g) {
    TrainingBatch b;
    int n = static_cast<int>(sub.pos.size() + sub.neg.size());
    b.x = Matrix(n, space.size());
    int r = 0;
    auto put = [&](const Assignment& theta, double label) {
        auto row = lookup_row(theta, space, kb, g);
        std::copy(row.begin(), row.end(), b.x.row(r++));
        b.y.push_back(label);
    };
    for (const auto& t : sub.pos) put(t, 1.0);
    for (const auto& t : sub.neg) put(t, 0.0);
    return b;
}

}  // namespace gilp
