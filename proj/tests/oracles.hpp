#pragma once

// Independent reference implementations used to cross-check the engine.

#include <random>
#include <set>
#include <vector>

#include "gilp/logic.hpp"

namespace oracle {

using gilp::Fact;

inline Fact ground(const gilp::Atom& a, const std::vector<int>& theta) {
    auto val = [&](const gilp::Term& t) { return t.is_var() ? theta[static_cast<std::size_t>(t.value)] : t.value; };
    Fact f{a.pred, -1, -1};
    if (!a.terms.empty()) f.a = val(a.terms[0]);
    if (a.terms.size() > 1) f.b = val(a.terms[1]);
    return f;
}

/// Calls visit(theta) for every assignment of variables 1..v over n constants,
/// in lexicographic order.
template <class F>
void each_assignment(int v, int n, F visit) {
    std::vector<int> theta(static_cast<std::size_t>(v) + 1, 0);
    if (n == 0) return;
    for (;;) {
        visit(theta);
        int i = v;
        while (i >= 1 && ++theta[static_cast<std::size_t>(i)] == n) theta[static_cast<std::size_t>(i--)] = 0;
        if (i < 1) return;
    }
}

/// Exhaustive immediate consequence over every ground instance.
inline std::set<Fact> step(const gilp::LogicProgram& p, const std::set<Fact>& interp, int n) {
    std::set<Fact> out;
    for (const auto& r : p.rules)
        each_assignment(r.max_var(), n, [&](const std::vector<int>& theta) {
            for (const auto& b : r.body)
                if (!interp.contains(ground(b, theta))) return;
            out.insert(ground(r.head, theta));
        });
    return out;
}

inline std::set<Fact> fixpoint(const gilp::LogicProgram& p, const std::set<Fact>& base, int n) {
    std::set<Fact> cur = base;
    for (;;) {
        auto next = cur;
        for (const auto& f : step(p, cur, n)) next.insert(f);
        if (next == cur) return cur;
        cur = std::move(next);
    }
}

inline std::set<Fact> to_set(const gilp::FactSet& s) { return {s.begin(), s.end()}; }

/// Random definite program over unary predicates 0..1 and binary predicates 2..3.
inline gilp::LogicProgram random_program(std::mt19937_64& rng, int rules, int vars) {
    gilp::LogicProgram p;
    std::uniform_int_distribution<int> pred(0, 3);
    std::uniform_int_distribution<int> var(1, vars);
    std::uniform_int_distribution<int> len(1, 3);
    auto atom = [&] {
        int q = pred(rng);
        gilp::Atom a{q, {gilp::Term::var(var(rng))}};
        if (q >= 2) a.terms.push_back(gilp::Term::var(var(rng)));
        return a;
    };
    for (int i = 0; i < rules; ++i) {
        gilp::Rule r{atom(), {}};
        int k = len(rng);
        for (int j = 0; j < k; ++j) r.body.push_back(atom());
        p.rules.push_back(r);
    }
    return p;
}

inline gilp::Signature random_signature() {
    gilp::Signature s;
    s.intern("u0", 1);
    s.intern("u1", 1);
    s.intern("b0", 2);
    s.intern("b1", 2);
    return s;
}

inline std::set<Fact> random_facts(std::mt19937_64& rng, int n, double density) {
    std::set<Fact> out;
    std::bernoulli_distribution keep(density);
    for (int q = 0; q < 4; ++q)
        for (int a = 0; a < n; ++a) {
            if (q < 2) {
                if (keep(rng)) out.insert({q, a, -1});
                continue;
            }
            for (int b = 0; b < n; ++b)
                if (keep(rng)) out.insert({q, a, b});
        }
    return out;
}

}  // namespace oracle
