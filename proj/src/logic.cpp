#include "gilp/logic.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <sstream>

namespace gilp {

// ---------------------------------------------------------------------------
// Tables

int Signature::intern(std::string_view name, int arity, PredicateKind kind) {
    if (name.empty()) throw DataError("empty predicate name");
    if (arity < 0 || arity > 2)
        throw DataError("predicate " + std::string(name) + " has arity " + std::to_string(arity) +
                        "; only nullary, unary and binary predicates are supported");
    if (auto it = by_name_.find(std::string(name)); it != by_name_.end()) {
        if (preds_[static_cast<std::size_t>(it->second)].arity != arity)
            throw DataError("arity conflict for predicate " + std::string(name) + ": " +
                            std::to_string(preds_[static_cast<std::size_t>(it->second)].arity) + " vs " +
                            std::to_string(arity));
        return it->second;
    }
    int id = static_cast<int>(preds_.size());
    preds_.push_back({std::string(name), arity, kind});
    by_name_.emplace(std::string(name), id);
    return id;
}

std::optional<int> Signature::find(std::string_view name) const {
    if (auto it = by_name_.find(std::string(name)); it != by_name_.end()) return it->second;
    return std::nullopt;
}

int Signature::id(std::string_view name) const {
    if (auto id = find(name)) return *id;
    throw DataError("unknown predicate " + std::string(name));
}

bool Signature::operator==(const Signature& other) const {
    if (preds_.size() != other.preds_.size()) return false;
    for (std::size_t i = 0; i < preds_.size(); ++i) {
        const auto& a = preds_[i];
        const auto& b = other.preds_[i];
        if (a.name != b.name || a.arity != b.arity || a.kind != b.kind) return false;
    }
    return true;
}

int ConstantTable::intern(std::string_view name) {
    if (auto it = by_name_.find(std::string(name)); it != by_name_.end()) return it->second;
    int id = static_cast<int>(names_.size());
    names_.emplace_back(name);
    by_name_.emplace(std::string(name), id);
    return id;
}

std::optional<int> ConstantTable::find(std::string_view name) const {
    if (auto it = by_name_.find(std::string(name)); it != by_name_.end()) return it->second;
    return std::nullopt;
}

int Rule::max_var() const {
    int m = 0;
    auto scan = [&](const Atom& a) {
        for (const auto& t : a.terms)
            if (t.is_var()) m = std::max(m, t.value);
    };
    scan(head);
    for (const auto& a : body) scan(a);
    return m;
}

bool FactSet::insert(const Fact& f) {
    if (!index_.insert(f).second) return false;
    order_.push_back(f);
    return true;
}

// ---------------------------------------------------------------------------
// Lexer shared by the fact and rule parsers

namespace {

bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    void skip_space() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '%') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    bool done() {
        skip_space();
        return pos_ >= text_.size();
    }

    char peek() {
        skip_space();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    bool accept(char c) {
        if (peek() != c) return false;
        advance();
        return true;
    }

    bool accept(std::string_view s) {
        skip_space();
        if (text_.substr(pos_, s.size()) != s) return false;
        for (std::size_t i = 0; i < s.size(); ++i) advance();
        return true;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    std::string ident() {
        skip_space();
        std::size_t start = pos_;
        while (pos_ < text_.size() && is_ident_char(text_[pos_])) advance();
        if (start == pos_) fail("expected identifier");
        return std::string(text_.substr(start, pos_ - start));
    }

    [[noreturn]] void fail(const std::string& msg) const {
        std::string near = pos_ < text_.size() ? std::string(1, text_[pos_]) : std::string("end of input");
        throw ParseError(msg + " near '" + near + "'", line_, col_);
    }

    int line() const { return line_; }
    int column() const { return col_; }

private:
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

enum class Section { constants, background, pos, neg };

}  // namespace

FactBase parse_facts(std::string_view text) {
    FactBase fb;
    Lexer lex(text);
    Section section = Section::background;
    while (!lex.done()) {
        if (lex.accept('#')) {
            std::string name = lex.ident();
            if (name == "constants") section = Section::constants;
            else if (name == "background") section = Section::background;
            else if (name == "pos") section = Section::pos;
            else if (name == "neg") section = Section::neg;
            else lex.fail("unknown section marker #" + name);
            continue;
        }
        if (section == Section::constants) {
            fb.constants.intern(lex.ident());
            lex.accept(',');
            lex.accept('.');
            continue;
        }
        int line = lex.line();
        int col = lex.column();
        std::string pred = lex.ident();
        std::vector<int> args;
        if (lex.accept('(')) {
            do {
                args.push_back(fb.constants.intern(lex.ident()));
            } while (lex.accept(','));
            lex.expect(')');
        }
        lex.expect('.');
        int id;
        try {
            id = fb.preds.intern(pred, static_cast<int>(args.size()));
        } catch (const DataError& e) {
            throw ParseError(e.what(), line, col);
        }
        Fact f{id, args.empty() ? -1 : args[0], args.size() > 1 ? args[1] : -1};
        switch (section) {
            case Section::background: fb.background.insert(f); break;
            case Section::pos:
                fb.preds[id].kind = PredicateKind::target;
                fb.positives.insert(f);
                break;
            case Section::neg:
                fb.preds[id].kind = PredicateKind::target;
                fb.negatives.insert(f);
                break;
            case Section::constants: break;
        }
    }
    for (const auto& f : fb.positives)
        if (fb.negatives.contains(f)) throw DataError("atom is both a positive and a negative example");
    return fb;
}

std::string serialize_facts(const FactBase& fb) {
    std::ostringstream out;
    out << "#constants\n";
    for (const auto& c : fb.constants.names()) out << c << ".\n";
    auto section = [&](const char* marker, const FactSet& facts) {
        out << marker << '\n';
        for (const auto& f : facts) out << format_fact(f, fb.preds, fb.constants) << ".\n";
    };
    // Predicates are re-registered in first-use order on parsing; emit the
    // background first so the usual layout round-trips exactly.
    section("#background", fb.background);
    section("#pos", fb.positives);
    section("#neg", fb.negatives);
    return out.str();
}

// ---------------------------------------------------------------------------
// Formatting

std::string format_term(const Term& t, const ConstantTable* constants) {
    if (!t.is_var()) return constants ? constants->name(t.value) : "c" + std::to_string(t.value);
    if (t.value == 1) return "X";
    if (t.value == 2) return "Y";
    return "V" + std::to_string(t.value);
}

std::string format_atom(const Atom& a, const Signature& sig, const ConstantTable* constants) {
    if (a.terms.empty()) return sig[a.pred].name;
    std::string s = sig[a.pred].name + "(";
    for (std::size_t i = 0; i < a.terms.size(); ++i) {
        if (i) s += ",";
        s += format_term(a.terms[i], constants);
    }
    return s + ")";
}

std::string format_fact(const Fact& f, const Signature& sig, const ConstantTable& constants) {
    if (f.a < 0) return sig[f.pred].name;
    std::string s = sig[f.pred].name + "(" + constants.name(f.a);
    if (f.b >= 0) s += "," + constants.name(f.b);
    return s + ")";
}

std::string format_rule(const Rule& r, const Signature& sig, const ConstantTable* constants) {
    std::string s = format_atom(r.head, sig, constants);
    if (!r.body.empty()) {
        s += " :- ";
        for (std::size_t i = 0; i < r.body.size(); ++i) {
            if (i) s += ", ";
            s += format_atom(r.body[i], sig, constants);
        }
    }
    return s + ".";
}

std::string format_program(const LogicProgram& p, const Signature& sig, const ConstantTable* constants) {
    std::string s;
    for (const auto& r : p.rules) s += format_rule(r, sig, constants) + "\n";
    return s;
}

LogicProgram parse_program(std::string_view text, Signature& sig, ConstantTable* constants) {
    LogicProgram program;
    Lexer lex(text);
    while (!lex.done()) {
        std::map<std::string, int> vars;
        std::vector<std::pair<Atom*, std::vector<std::string>>> pending;
        Rule rule;
        auto parse_atom = [&](Atom& atom) {
            int line = lex.line();
            int col = lex.column();
            std::string pred = lex.ident();
            std::vector<std::string> args;
            if (lex.accept('(')) {
                do {
                    args.push_back(lex.ident());
                } while (lex.accept(','));
                lex.expect(')');
            }
            try {
                atom.pred = sig.intern(pred, static_cast<int>(args.size()));
            } catch (const DataError& e) {
                throw ParseError(e.what(), line, col);
            }
            for (const auto& a : args) {
                bool variable = std::isupper(static_cast<unsigned char>(a[0])) || a[0] == '_';
                if (!variable) {
                    if (!constants) lex.fail("constant " + a + " without a constant table");
                    atom.terms.push_back(Term::constant(constants->intern(a)));
                } else {
                    atom.terms.push_back(Term::var(0));
                }
            }
            return args;
        };
        std::vector<std::vector<std::string>> arg_names;
        arg_names.push_back(parse_atom(rule.head));
        if (lex.accept(":-")) {
            do {
                rule.body.emplace_back();
                arg_names.push_back(parse_atom(rule.body.back()));
            } while (lex.accept(','));
        }
        lex.expect('.');

        // X -> 1, Y -> 2, Vk -> k; any other name takes the next free index.
        std::vector<std::string> order;
        for (const auto& names : arg_names)
            for (const auto& n : names)
                if (std::isupper(static_cast<unsigned char>(n[0])) || n[0] == '_')
                    if (std::find(order.begin(), order.end(), n) == order.end()) order.push_back(n);
        std::vector<bool> taken(64, false);
        auto reserved = [](const std::string& n) -> int {
            if (n == "X") return 1;
            if (n == "Y") return 2;
            if (n.size() > 1 && n[0] == 'V' && std::all_of(n.begin() + 1, n.end(), ::isdigit)) {
                int k = std::stoi(n.substr(1));
                if (k >= 1 && k < 64) return k;
            }
            return 0;
        };
        for (const auto& n : order)
            if (int k = reserved(n)) {
                vars[n] = k;
                taken[static_cast<std::size_t>(k)] = true;
            }
        int next = 3;
        for (const auto& n : order) {
            if (vars.contains(n)) continue;
            while (next < 64 && taken[static_cast<std::size_t>(next)]) ++next;
            if (next >= 64) lex.fail("too many variables");
            vars[n] = next;
            taken[static_cast<std::size_t>(next)] = true;
        }
        auto assign = [&](Atom& atom, const std::vector<std::string>& names) {
            for (std::size_t i = 0; i < names.size(); ++i)
                if (atom.terms[i].is_var()) atom.terms[i].value = vars.at(names[i]);
        };
        assign(rule.head, arg_names[0]);
        for (std::size_t i = 0; i < rule.body.size(); ++i) assign(rule.body[i], arg_names[i + 1]);
        program.rules.push_back(std::move(rule));
    }
    return program;
}

// ---------------------------------------------------------------------------
// Interpretation

namespace {
std::uint64_t key(int pred, int c) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(pred)) << 32) | static_cast<std::uint32_t>(c);
}
const std::vector<Fact> kNoFacts;
}  // namespace

Interpretation::Interpretation(const FactSet& facts) {
    for (const auto& f : facts) insert(f);
}

bool Interpretation::insert(const Fact& f) {
    if (!set_.insert(f)) return false;
    by_pred_[f.pred].push_back(f);
    by_first_[key(f.pred, f.a)].push_back(f);
    if (f.b >= 0) by_second_[key(f.pred, f.b)].push_back(f);
    return true;
}

const std::vector<Fact>& Interpretation::by_pred(int pred) const {
    auto it = by_pred_.find(pred);
    return it == by_pred_.end() ? kNoFacts : it->second;
}

const std::vector<Fact>& Interpretation::by_first(int pred, int a) const {
    auto it = by_first_.find(key(pred, a));
    return it == by_first_.end() ? kNoFacts : it->second;
}

const std::vector<Fact>& Interpretation::by_second(int pred, int b) const {
    auto it = by_second_.find(key(pred, b));
    return it == by_second_.end() ? kNoFacts : it->second;
}

// ---------------------------------------------------------------------------
// Grounding

Fact ground_atom(const Atom& atom, const std::vector<int>& theta) {
    auto value = [&](const Term& t) { return t.is_var() ? theta.at(static_cast<std::size_t>(t.value)) : t.value; };
    Fact f{atom.pred, -1, -1};
    if (!atom.terms.empty()) f.a = value(atom.terms[0]);
    if (atom.terms.size() > 1) f.b = value(atom.terms[1]);
    return f;
}

namespace {

class BodyMatcher {
public:
    BodyMatcher(const Rule& rule, const Interpretation& interp, int num_constants,
                const std::function<bool(const std::vector<int>&)>& visit)
        : rule_(rule), interp_(interp), num_constants_(num_constants), visit_(visit) {
        int v = rule.max_var();
        theta_.assign(static_cast<std::size_t>(v) + 1, -1);
        used_.assign(rule.body.size(), false);
        std::vector<bool> in_body(theta_.size(), false);
        for (const auto& a : rule.body)
            for (const auto& t : a.terms)
                if (t.is_var()) in_body[static_cast<std::size_t>(t.value)] = true;
        for (const auto& t : rule.head.terms)
            if (t.is_var() && !in_body[static_cast<std::size_t>(t.value)] &&
                std::find(free_.begin(), free_.end(), t.value) == free_.end())
                free_.push_back(t.value);
    }

    void run() { solve(0); }

private:
    int value(const Term& t) const { return t.is_var() ? theta_[static_cast<std::size_t>(t.value)] : t.value; }

    int bound_count(const Atom& a) const {
        int n = 0;
        for (const auto& t : a.terms) n += value(t) >= 0;
        return n;
    }

    void solve(std::size_t depth) {
        if (stop_) return;
        if (depth == rule_.body.size()) {
            enumerate_free(0);
            return;
        }
        std::size_t pick = rule_.body.size();
        int best = -1;
        for (std::size_t i = 0; i < rule_.body.size(); ++i) {
            if (used_[i]) continue;
            int b = bound_count(rule_.body[i]);
            if (b > best) {
                best = b;
                pick = i;
            }
        }
        const Atom& atom = rule_.body[pick];
        used_[pick] = true;
        int a0 = atom.terms.empty() ? -1 : value(atom.terms[0]);
        int a1 = atom.terms.size() > 1 ? value(atom.terms[1]) : -1;
        if (atom.terms.empty()) {
            if (interp_.contains({atom.pred, -1, -1})) solve(depth + 1);
        } else if (atom.terms.size() == 1) {
            if (a0 >= 0) {
                if (interp_.contains({atom.pred, a0, -1})) solve(depth + 1);
            } else {
                for (const auto& f : interp_.by_pred(atom.pred)) try_fact(atom, f, depth);
            }
        } else if (a0 >= 0 && a1 >= 0) {
            if (interp_.contains({atom.pred, a0, a1})) solve(depth + 1);
        } else if (a0 >= 0) {
            for (const auto& f : interp_.by_first(atom.pred, a0)) try_fact(atom, f, depth);
        } else if (a1 >= 0) {
            for (const auto& f : interp_.by_second(atom.pred, a1)) try_fact(atom, f, depth);
        } else {
            for (const auto& f : interp_.by_pred(atom.pred)) try_fact(atom, f, depth);
        }
        used_[pick] = false;
    }

    void try_fact(const Atom& atom, const Fact& f, std::size_t depth) {
        if (stop_) return;
        int vals[2] = {f.a, f.b};
        int bound_here[2] = {0, 0};
        bool ok = true;
        for (std::size_t i = 0; i < atom.terms.size() && ok; ++i) {
            const Term& t = atom.terms[i];
            if (!t.is_var()) {
                ok = t.value == vals[i];
                continue;
            }
            int& slot = theta_[static_cast<std::size_t>(t.value)];
            if (slot < 0) {
                slot = vals[i];
                bound_here[i] = t.value;
            } else {
                ok = slot == vals[i];
            }
        }
        if (ok) solve(depth + 1);
        for (int v : bound_here)
            if (v) theta_[static_cast<std::size_t>(v)] = -1;
    }

    void enumerate_free(std::size_t i) {
        if (stop_) return;
        if (i == free_.size()) {
            if (!visit_(theta_)) stop_ = true;
            return;
        }
        auto& slot = theta_[static_cast<std::size_t>(free_[i])];
        for (int c = 0; c < num_constants_ && !stop_; ++c) {
            slot = c;
            enumerate_free(i + 1);
        }
        slot = -1;
    }

    const Rule& rule_;
    const Interpretation& interp_;
    int num_constants_;
    const std::function<bool(const std::vector<int>&)>& visit_;
    std::vector<int> theta_;
    std::vector<bool> used_;
    std::vector<int> free_;
    bool stop_ = false;
};

}  // namespace

void for_each_body_match(const Rule& rule, const Interpretation& interp, int num_constants,
                         const std::function<bool(const std::vector<int>&)>& visit) {
    BodyMatcher(rule, interp, num_constants, visit).run();
}

FactSet tp_step(const LogicProgram& program, const Interpretation& interp, int num_constants) {
    FactSet out;
    for (const auto& rule : program.rules)
        for_each_body_match(rule, interp, num_constants, [&](const std::vector<int>& theta) {
            out.insert(ground_atom(rule.head, theta));
            return true;
        });
    return out;
}

std::size_t herbrand_base_size(const Signature& sig, int num_constants) {
    std::size_t n = 0;
    auto c = static_cast<std::size_t>(num_constants);
    for (const auto& p : sig.symbols()) n += p.arity == 0 ? 1 : p.arity == 1 ? c : c * c;
    return n;
}

Interpretation tp_fixpoint(const LogicProgram& program, const FactSet& base, const Signature& sig,
                           int num_constants) {
    Interpretation interp(base);
    std::size_t cap = herbrand_base_size(sig, num_constants) + 1;
    for (std::size_t iter = 0; iter <= cap; ++iter) {
        bool changed = false;
        for (const auto& f : tp_step(program, interp, num_constants)) changed |= interp.insert(f);
        if (!changed) return interp;
    }
    throw LogicError("forward chaining exceeded the Herbrand-base iteration cap");
}

// ---------------------------------------------------------------------------
// Evaluation

Metrics evaluate_rules(const LogicProgram& program, const FactBase& fb, const std::vector<Fact>& test_positives,
                       const EvalOptions& options) {
    if (test_positives.empty()) throw EvaluationError("recall undefined: no test positives");
    FactSet base = fb.background;
    if (options.seed_positives)
        for (const auto& f : fb.positives) base.insert(f);
    int nc = fb.constants.size();
    Interpretation model = tp_fixpoint(program, base, fb.preds, nc);

    std::unordered_set<int> heads;
    for (const auto& r : program.rules) heads.insert(r.head.pred);
    std::unordered_set<Fact, FactHash> truth;
    for (const auto& f : fb.positives) truth.insert(f);
    for (const auto& f : test_positives) truth.insert(f);
    for (const auto& f : base)
        if (heads.contains(f.pred)) truth.insert(f);

    Metrics m;
    for (const auto& rule : program.rules)
        for_each_body_match(rule, model, nc, [&](const std::vector<int>& theta) {
            ++m.body_matches;
            m.correct_matches += truth.contains(ground_atom(rule.head, theta));
            return true;
        });
    if (m.body_matches > 0)
        m.precision = static_cast<double>(m.correct_matches) / static_cast<double>(m.body_matches);

    FactSet derived = tp_step(program, model, nc);
    m.derived_count = derived.size();
    std::size_t hit = 0;
    for (const auto& f : test_positives) hit += derived.contains(f);
    m.recall = static_cast<double>(hit) / static_cast<double>(test_positives.size());
    return m;
}

std::optional<double> rule_precision(const Rule& rule, const FactBase& fb) {
    FactSet base = fb.background;
    for (const auto& f : fb.positives) base.insert(f);
    Interpretation interp(base);
    std::size_t matches = 0;
    std::size_t correct = 0;
    for_each_body_match(rule, interp, fb.constants.size(), [&](const std::vector<int>& theta) {
        ++matches;
        correct += fb.positives.contains(ground_atom(rule.head, theta));
        return true;
    });
    if (matches == 0) return std::nullopt;
    return static_cast<double>(correct) / static_cast<double>(matches);
}

// ---------------------------------------------------------------------------
// Canonical forms

Rule canonical_rule(const Rule& rule) {
    std::vector<int> head_vars;
    for (const auto& t : rule.head.terms)
        if (t.is_var()) head_vars.push_back(t.value);
    std::vector<int> body_only;
    for (const auto& a : rule.body)
        for (const auto& t : a.terms)
            if (t.is_var() && std::find(head_vars.begin(), head_vars.end(), t.value) == head_vars.end() &&
                std::find(body_only.begin(), body_only.end(), t.value) == body_only.end())
                body_only.push_back(t.value);
    std::vector<int> targets;
    for (int v = 1; targets.size() < body_only.size(); ++v)
        if (std::find(head_vars.begin(), head_vars.end(), v) == head_vars.end()) targets.push_back(v);

    std::vector<std::size_t> perm(body_only.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::optional<Rule> best;
    do {
        std::map<int, int> rename;
        for (std::size_t i = 0; i < body_only.size(); ++i) rename[body_only[i]] = targets[perm[i]];
        Rule r{rule.head, {}};
        for (auto a : rule.body) {
            for (auto& t : a.terms)
                if (t.is_var())
                    if (auto it = rename.find(t.value); it != rename.end()) t.value = it->second;
            r.body.push_back(std::move(a));
        }
        std::sort(r.body.begin(), r.body.end());
        r.body.erase(std::unique(r.body.begin(), r.body.end()), r.body.end());
        if (!best || r < *best) best = std::move(r);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return *best;
}

LogicProgram dedup_rules(const LogicProgram& program) {
    LogicProgram out;
    std::vector<Rule> seen;
    for (const auto& r : program.rules) {
        Rule c = canonical_rule(r);
        if (std::find(seen.begin(), seen.end(), c) != seen.end()) continue;
        seen.push_back(c);
        out.rules.push_back(c);
    }
    return out;
}

bool contains_rule(const LogicProgram& program, const Rule& rule) {
    Rule c = canonical_rule(rule);
    return std::any_of(program.rules.begin(), program.rules.end(),
                       [&](const Rule& r) { return canonical_rule(r) == c; });
}

}  // namespace gilp
