#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "gilp/error.hpp"

namespace gilp {

enum class PredicateKind { known, target, placeholder };

struct PredicateSymbol {
    std::string name;
    int arity = 1;
    PredicateKind kind = PredicateKind::known;
};

/// Predicate table shared by facts and rules of one task. Ids are dense and
/// assigned in insertion order.
class Signature {
public:
    /// Returns the id of `name`, registering it if needed. Throws DataError
    /// when the name exists with a different arity.
    int intern(std::string_view name, int arity, PredicateKind kind = PredicateKind::known);
    std::optional<int> find(std::string_view name) const;
    int id(std::string_view name) const;

    const PredicateSymbol& operator[](int id) const { return preds_.at(static_cast<std::size_t>(id)); }
    PredicateSymbol& operator[](int id) { return preds_.at(static_cast<std::size_t>(id)); }
    int size() const { return static_cast<int>(preds_.size()); }
    const std::vector<PredicateSymbol>& symbols() const { return preds_; }

    bool operator==(const Signature& other) const;

private:
    std::vector<PredicateSymbol> preds_;
    std::unordered_map<std::string, int> by_name_;
};

class ConstantTable {
public:
    int intern(std::string_view name);
    std::optional<int> find(std::string_view name) const;
    const std::string& name(int id) const { return names_.at(static_cast<std::size_t>(id)); }
    int size() const { return static_cast<int>(names_.size()); }
    const std::vector<std::string>& names() const { return names_; }
    bool operator==(const ConstantTable& other) const { return names_ == other.names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, int> by_name_;
};

/// Variables are numbered from 1; variable 1 prints as X, 2 as Y, k >= 3 as Vk.
struct Term {
    enum class Kind : std::uint8_t { variable, constant };
    Kind kind = Kind::variable;
    int value = 1;

    static Term var(int index) { return {Kind::variable, index}; }
    static Term constant(int id) { return {Kind::constant, id}; }
    bool is_var() const { return kind == Kind::variable; }
    auto operator<=>(const Term&) const = default;
};

struct Atom {
    int pred = 0;
    std::vector<Term> terms;
    auto operator<=>(const Atom&) const = default;
};

struct Rule {
    Atom head;
    std::vector<Atom> body;
    auto operator<=>(const Rule&) const = default;

    /// Largest variable index used anywhere in the rule.
    int max_var() const;
};

struct LogicProgram {
    std::vector<Rule> rules;
    bool operator==(const LogicProgram&) const = default;
};

/// Ground atom over a predicate of arity <= 2. Unused arguments are -1.
struct Fact {
    int pred = 0;
    int a = -1;
    int b = -1;
    auto operator<=>(const Fact&) const = default;
};

struct FactHash {
    std::size_t operator()(const Fact& f) const noexcept {
        std::uint64_t h = static_cast<std::uint32_t>(f.pred);
        h = h * 0x9E3779B97F4A7C15ULL + static_cast<std::uint32_t>(f.a);
        h = h * 0x9E3779B97F4A7C15ULL + static_cast<std::uint32_t>(f.b);
        return static_cast<std::size_t>(h ^ (h >> 29));
    }
};

/// Insertion-ordered set of ground atoms.
class FactSet {
public:
    bool insert(const Fact& f);
    bool contains(const Fact& f) const { return index_.contains(f); }
    std::size_t size() const { return order_.size(); }
    bool empty() const { return order_.empty(); }
    const std::vector<Fact>& items() const { return order_; }
    auto begin() const { return order_.begin(); }
    auto end() const { return order_.end(); }
    bool operator==(const FactSet& other) const { return order_ == other.order_; }

private:
    std::vector<Fact> order_;
    std::unordered_set<Fact, FactHash> index_;
};

/// Background knowledge plus labelled target examples. An empty negative set
/// means the closed-world reading: every non-positive target atom is false.
struct FactBase {
    Signature preds;
    ConstantTable constants;
    FactSet background;
    FactSet positives;
    FactSet negatives;

    bool operator==(const FactBase&) const = default;
};

// ---------------------------------------------------------------------------
// Text formats

/// Parses `pred(c1,...).` clauses with `%` comments and the section markers
/// `#constants`, `#background`, `#pos`, `#neg`. Throws ParseError.
FactBase parse_facts(std::string_view text);
std::string serialize_facts(const FactBase& fb);

std::string format_term(const Term& t, const ConstantTable* constants = nullptr);
std::string format_atom(const Atom& a, const Signature& sig, const ConstantTable* constants = nullptr);
std::string format_fact(const Fact& f, const Signature& sig, const ConstantTable& constants);
/// `head :- b1, b2.` using X, Y, V3, ... for variables.
std::string format_rule(const Rule& r, const Signature& sig, const ConstantTable* constants = nullptr);
std::string format_program(const LogicProgram& p, const Signature& sig, const ConstantTable* constants = nullptr);

/// Parses rules of the form `head :- b1, ..., bn.` (one or more, `%`
/// comments allowed). Unknown predicates are registered in `sig`; lowercase
/// or numeric argument tokens are constants looked up in `constants`.
LogicProgram parse_program(std::string_view text, Signature& sig, ConstantTable* constants = nullptr);

// ---------------------------------------------------------------------------
// Semantics

/// Interpretation with per-argument indexes used by rule grounding.
class Interpretation {
public:
    Interpretation() = default;
    explicit Interpretation(const FactSet& facts);

    bool insert(const Fact& f);
    bool contains(const Fact& f) const { return set_.contains(f); }
    std::size_t size() const { return set_.size(); }
    const FactSet& facts() const { return set_; }

    const std::vector<Fact>& by_pred(int pred) const;
    const std::vector<Fact>& by_first(int pred, int a) const;
    const std::vector<Fact>& by_second(int pred, int b) const;

private:
    FactSet set_;
    std::unordered_map<int, std::vector<Fact>> by_pred_;
    std::unordered_map<std::uint64_t, std::vector<Fact>> by_first_;
    std::unordered_map<std::uint64_t, std::vector<Fact>> by_second_;
};

/// Calls `visit` once for every ground substitution of variables 1..max_var
/// of `rule` whose body holds in `interp`. Variables that occur only in the
/// head range over all `num_constants` constants. Variables not occurring in
/// the rule are left as -1. Enumeration stops early when `visit` returns false.
void for_each_body_match(const Rule& rule, const Interpretation& interp, int num_constants,
                         const std::function<bool(const std::vector<int>&)>& visit);

Fact ground_atom(const Atom& atom, const std::vector<int>& theta);

/// Immediate consequence operator: heads of ground rule instances whose
/// bodies hold in `interp`.
FactSet tp_step(const LogicProgram& program, const Interpretation& interp, int num_constants);

/// Least model of `base` together with `program`. Throws LogicError if the
/// iteration cap |HB| + 1 is exceeded.
Interpretation tp_fixpoint(const LogicProgram& program, const FactSet& base, const Signature& sig,
                           int num_constants);

std::size_t herbrand_base_size(const Signature& sig, int num_constants);

struct Metrics {
    std::optional<double> precision;  // empty when no body is ever satisfied
    double recall = 0.0;
    std::size_t derived_count = 0;
    std::size_t body_matches = 0;
    std::size_t correct_matches = 0;
};

struct EvalOptions {
    /// Add the fact base's positive examples to the interpretation before
    /// forward chaining (training facts act as background).
    bool seed_positives = false;
};

/// Pooled precision over body-satisfying substitutions and recall of
/// `test_positives` among the atoms the program derives. Throws
/// EvaluationError when `test_positives` is empty.
Metrics evaluate_rules(const LogicProgram& program, const FactBase& fb, const std::vector<Fact>& test_positives,
                       const EvalOptions& options = {});

/// Precision of a single rule against `fb` with positives seeded; empty when
/// the body is never satisfied.
std::optional<double> rule_precision(const Rule& rule, const FactBase& fb);

/// Canonical form up to renaming of body-only variables, with body atoms
/// sorted and duplicates removed.
Rule canonical_rule(const Rule& rule);
LogicProgram dedup_rules(const LogicProgram& program);

/// True when `program` contains a rule equal to `rule` up to variable renaming
/// of body-only variables and body order.
bool contains_rule(const LogicProgram& program, const Rule& rule);

}  // namespace gilp
