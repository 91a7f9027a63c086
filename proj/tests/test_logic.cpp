#include <random>

#include "doctest.h"
#include "gilp/logic.hpp"
#include "gilp/tasks.hpp"
#include "oracles.hpp"

using namespace gilp;

namespace {

FactBase chain(int n) {
    std::string text = "#background\nzero(0).\n";
    for (int i = 0; i + 1 < n; ++i) text += "succ(" + std::to_string(i) + "," + std::to_string(i + 1) + ").\n";
    return parse_facts(text);
}

std::set<int> holds_on(const Interpretation& interp, const FactBase& fb, const std::string& pred) {
    std::set<int> out;
    int id = fb.preds.id(pred);
    for (const auto& f : interp.facts())
        if (f.pred == id) out.insert(std::stoi(fb.constants.name(f.a)));
    return out;
}

}  // namespace

TEST_CASE("parse_facts reads sections and deduplicates") {
    auto fb = parse_facts("#background\nsucc(0,1).\n");
    CHECK(fb.background.size() == 1);
    CHECK(fb.constants.size() == 2);
    CHECK(fb.preds[fb.preds.id("succ")].arity == 2);

    auto dup = parse_facts("zero(0). zero(0).");
    CHECK(dup.background.size() == 1);

    auto full = parse_facts("% comment\n#background\nzero(0).\n#pos\neven(0).\n#neg\neven(1).\n");
    CHECK(full.positives.size() == 1);
    CHECK(full.negatives.size() == 1);
    CHECK(full.preds[full.preds.id("even")].kind == PredicateKind::target);
}

TEST_CASE("parse errors carry line and column") {
    try {
        parse_facts("zero(0).\nsucc(0,1\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line == 3);
        CHECK(e.error_class() == ErrorClass::data);
    }
    CHECK_THROWS_AS(parse_facts("p(a).\np(a,b).\n"), ParseError);
    CHECK_THROWS_AS(parse_facts("#pos\np(a).\n#neg\np(a).\n"), DataError);
    CHECK_THROWS_AS(parse_facts("#unknown\n"), ParseError);
}

TEST_CASE("predecessor task has 10 constants and 3 relations") {
    auto task = gen_symbolic_task({"predecessor"});
    auto fb = parse_facts(serialize_facts(task.train));
    CHECK(fb.constants.size() == 10);
    CHECK(fb.preds.size() == 3);
    CHECK(fb.positives.size() == 9);
}

TEST_CASE("serialize then parse round-trips") {
    for (const auto& name : {"predecessor", "member", "son", "adjacent_to_red", "cyclic"}) {
        auto task = gen_symbolic_task({name});
        auto text = serialize_facts(task.train);
        auto back = parse_facts(text);
        CHECK(back == task.train);
        CHECK(serialize_facts(back) == text);
    }
}

TEST_CASE("rule text round-trips") {
    Signature sig;
    auto p = parse_program("even(X) :- even(Y), succ(Y,V3), succ(V3,X).\npositive :- p_1(X).\n", sig);
    REQUIRE(p.rules.size() == 2);
    CHECK(p.rules[0].max_var() == 3);
    CHECK(format_program(p, sig) == "even(X) :- even(Y), succ(Y,V3), succ(V3,X).\npositive :- p_1(X).\n");
    CHECK(sig[sig.id("positive")].arity == 0);
}

TEST_CASE("tp_step one-step chaining") {
    Signature sig;
    ConstantTable c;
    auto p = parse_program("q(X) :- p(X).", sig, &c);
    int a = c.intern("a");
    FactSet base;
    base.insert({sig.id("p"), a, -1});
    auto out = tp_step(p, Interpretation(base), c.size());
    CHECK(out.size() == 1);
    CHECK(out.contains({sig.id("q"), a, -1}));
    CHECK(tp_step(LogicProgram{}, Interpretation(base), c.size()).empty());

    auto fix = tp_fixpoint(p, base, sig, c.size());
    CHECK(fix.size() == 2);
}

TEST_CASE("even fixpoint matches the brute-force oracle") {
    auto fb = chain(10);
    auto p = parse_program("even(X) :- zero(X).\neven(X) :- even(Y), succ(Y,Z), succ(Z,X).", fb.preds);
    auto fix = tp_fixpoint(p, fb.background, fb.preds, fb.constants.size());
    CHECK(holds_on(fix, fb, "even") == std::set<int>{0, 2, 4, 6, 8});
    CHECK(oracle::to_set(fix.facts()) == oracle::fixpoint(p, oracle::to_set(fb.background), fb.constants.size()));
}

TEST_CASE("shared-auxiliary fizz rule only derives zero") {
    // succ(Z,Y) and succ(Z,X) force X = Y, so the recursive rule adds nothing.
    auto fb = chain(7);
    auto p = parse_program("fizz(X) :- zero(X).\nfizz(X) :- succ(Z,Y), fizz(Y), succ(Z,X).", fb.preds);
    auto fix = tp_fixpoint(p, fb.background, fb.preds, fb.constants.size());
    CHECK(holds_on(fix, fb, "fizz") == std::set<int>{0});
    CHECK(oracle::to_set(fix.facts()) == oracle::fixpoint(p, oracle::to_set(fb.background), fb.constants.size()));
}

TEST_CASE("tp_fixpoint equals exhaustive grounding on random programs") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 2 + trial % 5;
        auto sig = oracle::random_signature();
        auto p = oracle::random_program(rng, 1 + trial % 3, 3);
        auto base = oracle::random_facts(rng, n, 0.2);
        FactSet fs;
        for (const auto& f : base) fs.insert(f);
        auto fix = tp_fixpoint(p, fs, sig, n);
        auto expect = oracle::fixpoint(p, base, n);
        REQUIRE(oracle::to_set(fix.facts()) == expect);
        // Fixpoint property: T_P(F) together with B is F.
        auto again = oracle::to_set(tp_step(p, fix, n));
        again.insert(base.begin(), base.end());
        CHECK(again == expect);
        CHECK(oracle::to_set(tp_step(p, fix, n)) == oracle::step(p, expect, n));
    }
}

TEST_CASE("tp_step and tp_fixpoint are monotone") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 1 + trial % 4;
        auto sig = oracle::random_signature();
        auto p = oracle::random_program(rng, 1 + trial % 3, 3);
        auto small = oracle::random_facts(rng, n, 0.2);
        auto large = small;
        for (const auto& f : oracle::random_facts(rng, n, 0.2)) large.insert(f);
        FactSet s, l;
        for (const auto& f : small) s.insert(f);
        for (const auto& f : large) l.insert(f);
        auto a = oracle::to_set(tp_step(p, Interpretation(s), n));
        auto b = oracle::to_set(tp_step(p, Interpretation(l), n));
        CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end()));
        auto fa = oracle::to_set(tp_fixpoint(p, s, sig, n).facts());
        auto fb = oracle::to_set(tp_fixpoint(p, l, sig, n).facts());
        CHECK(std::includes(fb.begin(), fb.end(), fa.begin(), fa.end()));
    }
}

TEST_CASE("evaluate_rules on predecessor and even") {
    auto pre = gen_symbolic_task({"predecessor"});
    auto p = parse_program("predecessor(X,Y) :- succ(Y,X).", pre.test.preds);
    auto m = evaluate_rules(p, pre.test, pre.test_positives);
    REQUIRE(m.precision);
    CHECK(*m.precision == 1.0);
    CHECK(m.recall == 1.0);

    auto even = gen_symbolic_task({"even"});
    auto zero_rule = parse_program("even(X) :- zero(X).", even.train.preds);
    auto evens = even.train.positives.items();
    auto z = evaluate_rules(zero_rule, even.train, evens);
    REQUIRE(z.precision);
    CHECK(*z.precision == 1.0);
    CHECK(z.recall == doctest::Approx(0.2));
    CHECK(z.derived_count == 1);
}

TEST_CASE("evaluate_rules reports undefined cases") {
    auto even = gen_symbolic_task({"even"});
    auto never = parse_program("even(X) :- succ(X,X).", even.train.preds);
    auto m = evaluate_rules(never, even.train, even.train.positives.items());
    CHECK_FALSE(m.precision.has_value());
    CHECK(m.recall == 0.0);
    CHECK_THROWS_AS(evaluate_rules(never, even.train, {}), EvaluationError);
}

TEST_CASE("recall agrees with exhaustive enumeration") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 2 + trial % 5;
        auto base = oracle::random_facts(rng, n, 0.25);
        FactBase fb;
        fb.preds = oracle::random_signature();
        for (int i = 0; i < n; ++i) fb.constants.intern("c" + std::to_string(i));
        for (const auto& f : base) fb.background.insert(f);
        auto p = oracle::random_program(rng, 2, 3);
        std::vector<Fact> test;
        for (const auto& f : oracle::random_facts(rng, n, 0.3)) test.push_back(f);
        if (test.empty()) continue;
        auto m = evaluate_rules(p, fb, test);
        auto derived = oracle::step(p, oracle::fixpoint(p, base, n), n);
        std::size_t hit = 0;
        for (const auto& f : test) hit += derived.contains(f);
        CHECK(m.recall == doctest::Approx(static_cast<double>(hit) / static_cast<double>(test.size())));
        if (m.precision) {
            CHECK(*m.precision >= 0.0);
            CHECK(*m.precision <= 1.0);
        }
    }
}

TEST_CASE("canonical rules identify renamings") {
    Signature sig;
    auto a = parse_program("t(X) :- e(X,Z), c(Z,W), r(W).", sig);
    auto b = parse_program("t(X) :- r(V4), e(X,V3), c(V3,V4).", sig);
    auto c = parse_program("t(X) :- e(X,Z), c(W,Z), r(W).", sig);
    CHECK(canonical_rule(a.rules[0]) == canonical_rule(b.rules[0]));
    CHECK_FALSE(canonical_rule(a.rules[0]) == canonical_rule(c.rules[0]));
    LogicProgram both{{a.rules[0], b.rules[0], c.rules[0]}};
    CHECK(dedup_rules(both).rules.size() == 2);
    CHECK(contains_rule(both, b.rules[0]));
}
