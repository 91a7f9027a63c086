#include <random>
#include <set>

#include "doctest.h"
#include "gilp/substitution.hpp"
#include "gilp/tasks.hpp"
#include "oracles.hpp"

using namespace gilp;

namespace {

/// Signature with `binary` binary and `unary` unary relations plus a target.
Signature make_signature(int binary, int unary, int target_arity) {
    Signature s;
    for (int i = 0; i < binary; ++i) s.intern("b" + std::to_string(i), 2);
    for (int i = 0; i < unary; ++i) s.intern("u" + std::to_string(i), 1);
    s.intern("target", target_arity, PredicateKind::target);
    return s;
}

}  // namespace

TEST_CASE("body space size matches the closed form on 100 random spaces") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> count(0, 6);
    std::uniform_int_distribution<int> arity(1, 2);
    for (int trial = 0; trial < 100; ++trial) {
        int b = count(rng);
        int u = count(rng);
        int ta = arity(rng);
        int d = std::uniform_int_distribution<int>(ta, 5)(rng);
        Signature sig = make_signature(b, u, ta);
        auto space = enumerate_body_atoms(sig, d, sig.id("target"));
        // The target relation itself is a candidate body atom (recursion).
        int rb = b + (ta == 2);
        int ru = u + (ta == 1);
        CHECK(static_cast<std::size_t>(space.size()) == body_space_size(rb, ru, d));
        CHECK(std::find(space.atoms.begin(), space.atoms.end(), space.head()) == space.atoms.end());
        std::set<Atom> unique(space.atoms.begin(), space.atoms.end());
        CHECK(unique.size() == space.atoms.size());
        for (const auto& a : space.atoms) {
            if (a.terms.size() == 2) CHECK(a.terms[0] != a.terms[1]);
            for (const auto& t : a.terms) CHECK((t.value >= 1 && t.value <= d));
        }
    }
}

TEST_CASE("placeholder space size matches the closed form") {
    for (int d = 2; d <= 12; ++d) {
        auto space = enumerate_placeholder_atoms(d);
        CHECK(static_cast<std::size_t>(space.size()) == placeholder_space_size(d));
        CHECK(space.preds[space.target].arity == 0);
        CHECK(space.head().terms.empty());
    }
    CHECK_THROWS_AS(enumerate_placeholder_atoms(1), ConfigError);
}

TEST_CASE("enumeration rejects too few variables") {
    Signature sig = make_signature(1, 1, 2);
    CHECK_THROWS_AS(enumerate_body_atoms(sig, 1, sig.id("target")), ConfigError);
}

TEST_CASE("lookup_row reproduces ground membership exhaustively") {
    std::mt19937_64 rng(11);
    for (int n = 2; n <= 5; ++n)
        for (int d = 2; d <= 3; ++d) {
            auto facts = oracle::random_facts(rng, n, 0.35);
            FactBase fb;
            fb.preds = oracle::random_signature();
            int target = fb.preds.intern("t", 2, PredicateKind::target);
            for (int c = 0; c < n; ++c) fb.constants.intern("c" + std::to_string(c));
            for (const auto& f : facts) fb.background.insert(f);
            auto space = enumerate_body_atoms(fb.preds, d, target);
            auto g = identity_assignment(n);
            auto kb = build_latent_kb(fb, g, n, false);
            oracle::each_assignment(d, n, [&](const std::vector<int>& theta) {
                auto row = lookup_row(theta, space, kb, g);
                for (std::size_t j = 0; j < space.atoms.size(); ++j)
                    CHECK(row[j] == (facts.contains(oracle::ground(space.atoms[j], theta)) ? 1.0 : 0.0));
            });
        }
}

TEST_CASE("lookup_row reads arguments through the generalization") {
    auto fb = parse_facts("#background\nsucc(a,b).\n");
    auto space = enumerate_body_atoms(fb.preds, 2, fb.preds.intern("t", 2, PredicateKind::target));
    std::vector<int> g{1, 0};  // a -> latent 1, b -> latent 0
    auto kb = build_latent_kb(fb, g, 2, false);
    CHECK(kb.facts.contains({fb.preds.id("succ"), 1, 0}));
    // succ(X,Y) under X=a, Y=b holds; the swapped atom does not.
    auto row = lookup_row({-1, 0, 1}, space, kb, g);
    CHECK(row[0] == 1.0);
    CHECK(row[1] == 0.0);
    CHECK_THROWS_AS(build_latent_kb(fb, {0}, 2, false), DataError);
    CHECK_THROWS_AS(build_latent_kb(fb, {0, 5}, 2, false), DataError);
}

TEST_CASE("instance lookup is cluster-set inclusion") {
    auto space = enumerate_placeholder_atoms(3);
    std::vector<bool> present{true, false, true};  // clusters 1 and 3
    auto row = lookup_instance_row(present, space);
    for (std::size_t j = 0; j < space.atoms.size(); ++j) {
        bool expect = true;
        for (const auto& t : space.atoms[j].terms) expect = expect && present[static_cast<std::size_t>(t.value - 1)];
        CHECK(row[j] == (expect ? 1.0 : 0.0));
    }
    // p_1_2 needs cluster 2, which is absent.
    int p12 = space.preds.id("p_1_2");
    auto at = std::find_if(space.atoms.begin(), space.atoms.end(), [&](const Atom& a) { return a.pred == p12; });
    CHECK(row[static_cast<std::size_t>(at - space.atoms.begin())] == 0.0);
}

TEST_CASE("sampled positives are examples and negatives are not") {
    for (const char* name : {"predecessor", "lessthan", "son", "member", "even"}) {
        CAPTURE(name);
        auto task = gen_symbolic_task({name});
        const auto& fb = task.train;
        int target = fb.preds.id(task.target);
        int arity = fb.preds[target].arity;
        SubstitutionSampler sampler(fb, target, task.variables);
        std::mt19937_64 rng(3);
        std::size_t negatives_in_p = 0;
        for (int round = 0; round < 20; ++round) {
            auto batch = sampler.sample(16, rng);
            CHECK(batch.pos.size() == batch.neg.size());
            auto atom = [&](const Assignment& t) { return Fact{target, t[1], arity == 2 ? t[2] : -1}; };
            for (const auto& t : batch.pos) CHECK(fb.positives.contains(atom(t)));
            for (const auto& t : batch.neg) negatives_in_p += fb.positives.contains(atom(t));
            for (const auto& t : batch.neg)
                for (std::size_t v = 1; v < t.size(); ++v) CHECK((t[v] >= 0 && t[v] < fb.constants.size()));
        }
        CHECK(negatives_in_p == sampler.stats().negative_collisions);
    }
}

TEST_CASE("batch generation is deterministic under the seed") {
    auto task = gen_symbolic_task({"grandparent"});
    int target = task.train.preds.id(task.target);
    auto space = enumerate_body_atoms(task.train.preds, task.variables, target);
    auto g = identity_assignment(task.train.constants.size());
    auto kb = build_latent_kb(task.train, g, task.train.constants.size(), true);
    auto draw = [&](std::uint64_t seed) {
        SubstitutionSampler sampler(task.train, target, task.variables, {0.5, 20});
        std::mt19937_64 rng(seed);
        return make_training_batch(sampler.sample(32, rng), space, kb, g);
    };
    auto a = draw(9);
    auto b = draw(9);
    CHECK(a.x == b.x);
    CHECK(a.y == b.y);
    CHECK(a.x.rows == 64);
    CHECK(a.x.cols == space.size());
    for (int i = 0; i < 32; ++i) CHECK(a.y[static_cast<std::size_t>(i)] == 1.0);
    for (int i = 32; i < 64; ++i) CHECK(a.y[static_cast<std::size_t>(i)] == 0.0);
}
