#include "gilp/tasks.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>

namespace gilp {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

const std::vector<std::string>& task_names() {
    static const std::vector<std::string> names = {
        "predecessor", "even", "odd", "lessthan", "fizz", "buzz",
        "member", "length",
        "son", "grandparent", "husband", "uncle", "relatedness", "father",
        "undirected_edge", "adjacent_to_red", "two_children", "graph_coloring", "connectedness", "cyclic",
        "mnist_sequence", "kandinsky_two_pair", "kandinsky_one_red", "kandinsky_one_triangle"};
    return names;
}

bool is_kandinsky_task(const std::string& name) {
    return name == "kandinsky_one_red" || name == "kandinsky_one_triangle" || name == "kandinsky_two_pair";
}

namespace {

using Rng = std::mt19937_64;

/// Small builder that keeps constant and predicate registration order fixed.
class WorldBuilder {
public:
    WorldBuilder(const std::vector<std::pair<std::string, int>>& background_preds, const std::string& target,
                 int target_arity) {
        for (const auto& [name, arity] : background_preds) fb_.preds.intern(name, arity);
        target_ = fb_.preds.intern(target, target_arity, PredicateKind::target);
    }

    int c(const std::string& name) { return fb_.constants.intern(name); }
    void constants(const std::vector<std::string>& names) {
        for (const auto& n : names) c(n);
    }
    void bg(const std::string& pred, const std::string& a) { fb_.background.insert({fb_.preds.id(pred), c(a), -1}); }
    void bg(const std::string& pred, const std::string& a, const std::string& b) {
        fb_.background.insert({fb_.preds.id(pred), c(a), c(b)});
    }
    void pos(const std::string& a) { fb_.positives.insert({target_, c(a), -1}); }
    void pos(const std::string& a, const std::string& b) { fb_.positives.insert({target_, c(a), c(b)}); }

    /// Closed-world negatives over every constant of the world.
    void close_world() {
        int n = fb_.constants.size();
        int arity = fb_.preds[target_].arity;
        for (int a = 0; a < n; ++a) {
            if (arity == 1) {
                Fact f{target_, a, -1};
                if (!fb_.positives.contains(f)) fb_.negatives.insert(f);
                continue;
            }
            for (int b = 0; b < n; ++b) {
                Fact f{target_, a, b};
                if (!fb_.positives.contains(f)) fb_.negatives.insert(f);
            }
        }
    }

    FactBase& fb() { return fb_; }
    int target() const { return target_; }

private:
    FactBase fb_;
    int target_;
};

/// Finishes a task from a training world and a test world built with the same
/// predicate order. With `seed` the training positives are added to the test
/// background (the two worlds share constants).
SymbolicTask finish(std::string name, int variables, std::string gold, WorldBuilder&& train, WorldBuilder&& test,
                    bool seed) {
    SymbolicTask t;
    t.name = std::move(name);
    t.variables = variables;
    t.gold_rules = std::move(gold);
    train.close_world();
    t.train = std::move(train.fb());
    t.target = t.train.preds[test.target()].name;
    FactBase& te = test.fb();
    if (seed)
        for (const auto& f : t.train.positives)
            te.background.insert({f.pred, te.constants.intern(t.train.constants.name(f.a)),
                                  f.b < 0 ? -1 : te.constants.intern(t.train.constants.name(f.b))});
    for (const auto& f : te.positives) {
        bool seen = t.train.constants.find(te.constants.name(f.a)).has_value();
        if (f.b >= 0) seen = seen && t.train.constants.find(te.constants.name(f.b)).has_value();
        if (!seen) t.test_positives.push_back(f);
    }
    t.test = std::move(te);
    return t;
}

std::string num(int i) { return std::to_string(i); }

// ---------------------------------------------------------------------------
// Arithmetic

SymbolicTask arithmetic(const std::string& name, int n) {
    auto world = [&](int size) {
        int arity = (name == "predecessor" || name == "lessthan") ? 2 : 1;
        std::vector<std::pair<std::string, int>> preds = {{"zero", 1}, {"succ", 2}};
        WorldBuilder w(preds, name, arity);
        for (int i = 0; i < size; ++i) w.c(num(i));
        w.bg("zero", "0");
        for (int i = 0; i + 1 < size; ++i) w.bg("succ", num(i), num(i + 1));
        for (int i = 0; i < size; ++i) {
            if (name == "predecessor" && i + 1 < size) w.pos(num(i + 1), num(i));
            if (name == "even" && i % 2 == 0) w.pos(num(i));
            if (name == "odd" && i % 2 == 1) w.pos(num(i));
            if (name == "fizz" && i % 3 == 0) w.pos(num(i));
            if (name == "buzz" && i % 5 == 0) w.pos(num(i));
            if (name == "lessthan")
                for (int j = i + 1; j < size; ++j) w.pos(num(i), num(j));
        }
        return w;
    };
    std::map<std::string, std::pair<int, std::string>> info = {
        {"predecessor", {2, "predecessor(X,Y) :- succ(Y,X)."}},
        {"even", {3, "even(X) :- zero(X).\neven(X) :- even(Y), succ(Y,V3), succ(V3,X)."}},
        {"odd", {3, "odd(X) :- zero(Y), succ(Y,X).\nodd(X) :- odd(Y), succ(Y,V3), succ(V3,X)."}},
        {"lessthan", {3, "lessthan(X,Y) :- succ(X,Y).\nlessthan(X,Y) :- lessthan(X,V3), succ(V3,Y)."}},
        {"fizz", {3, "fizz(X) :- zero(X).\nfizz(X) :- fizz(Y), succ(Y,V3), succ(V3,V4), succ(V4,X)."}},
        {"buzz", {3, "buzz(X) :- zero(X).\nbuzz(X) :- buzz(Y), succ(Y,V3), succ(V3,V4), succ(V4,V5), succ(V5,V6), "
                     "succ(V6,X)."}},
    };
    auto [d, gold] = info.at(name);
    return finish(name, d, gold, world(n), world(2 * n), true);
}

// ---------------------------------------------------------------------------
// Lists

SymbolicTask member_task() {
    auto world = [](const std::vector<std::string>& nodes, const std::vector<std::string>& values) {
        WorldBuilder w({{"cons", 2}, {"value", 2}}, "member", 2);
        w.constants(nodes);
        for (const auto& v : values) w.c(v);
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (i + 1 < nodes.size()) w.bg("cons", nodes[i], nodes[i + 1]);
            w.bg("value", nodes[i], values[i]);
        }
        for (std::size_t i = 0; i < nodes.size(); ++i)
            for (std::size_t j = i; j < nodes.size(); ++j) w.pos(values[j], nodes[i]);
        return w;
    };
    return finish("member", 3, "member(X,Y) :- value(Y,X).\nmember(X,Y) :- cons(Y,V3), member(X,V3).",
                  world({"l1", "l2", "l3", "l4"}, {"a", "b", "c", "d"}),
                  world({"m1", "m2", "m3", "m4", "m5"}, {"e", "f", "g", "h", "e"}), false);
}

SymbolicTask length_task() {
    auto world = [](int n) {
        WorldBuilder w({{"cons", 2}, {"succ", 2}}, "length", 2);
        for (int i = 0; i < n; ++i) w.c("n" + num(i));
        for (int i = 0; i < n; ++i) w.c(num(i));
        for (int i = 1; i < n; ++i) {
            w.bg("cons", "n" + num(i), "n" + num(i - 1));
            w.bg("succ", num(i - 1), num(i));
        }
        for (int i = 0; i < n; ++i) w.pos("n" + num(i), num(i));
        return w;
    };
    return finish("length", 4, "length(X,Y) :- cons(X,V3), length(V3,V4), succ(V4,Y).", world(4), world(8), true);
}

// ---------------------------------------------------------------------------
// Families

struct Person {
    std::string name;
    bool male = true;
    int father = -1;
    int mother = -1;
    int spouse = -1;
};

/// Random family forest: founding couples, then up to `generations` further
/// generations where each couple has `min_children`..`max_children` children
/// and children marry outsiders with probability 0.7.
std::vector<Person> random_family(Rng& rng, const std::string& prefix, int couples, int generations,
                                  int min_children, int max_children, std::size_t limit = 1000000) {
    std::vector<Person> people;
    auto add = [&](bool male, int father, int mother) {
        people.push_back({prefix + num(static_cast<int>(people.size())), male, father, mother, -1});
        return static_cast<int>(people.size()) - 1;
    };
    std::bernoulli_distribution coin(0.5);
    std::bernoulli_distribution marry(0.7);
    std::vector<std::pair<int, int>> current;
    for (int i = 0; i < couples && people.size() + 2 <= limit; ++i) {
        int h = add(true, -1, -1);
        int w = add(false, -1, -1);
        people[static_cast<std::size_t>(h)].spouse = w;
        people[static_cast<std::size_t>(w)].spouse = h;
        current.emplace_back(h, w);
    }
    std::uniform_int_distribution<int> kids(min_children, max_children);
    for (int g = 0; g < generations && !current.empty(); ++g) {
        std::vector<std::pair<int, int>> next;
        for (auto [h, w] : current) {
            int k = kids(rng);
            for (int i = 0; i < k && people.size() < limit; ++i) {
                int c = add(coin(rng), h, w);
                if (g + 1 < generations && people.size() < limit && marry(rng)) {
                    bool male = people[static_cast<std::size_t>(c)].male;
                    int s = add(!male, -1, -1);
                    people[static_cast<std::size_t>(c)].spouse = s;
                    people[static_cast<std::size_t>(s)].spouse = c;
                    next.emplace_back(male ? c : s, male ? s : c);
                }
            }
        }
        current = std::move(next);
    }
    return people;
}

struct Kinship {
    const std::vector<Person>& p;

    bool sibling(int x, int y) const {
        const auto& a = p[static_cast<std::size_t>(x)];
        const auto& b = p[static_cast<std::size_t>(y)];
        return x != y && a.father >= 0 && a.father == b.father;
    }

    /// Calls f for every ordered pair of people within two steps of kinship,
    /// which covers every relation emitted below.
    template <class F>
    void each_pair(F f) const {
        auto n = p.size();
        std::vector<std::vector<int>> children(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (p[i].father >= 0) children[static_cast<std::size_t>(p[i].father)].push_back(static_cast<int>(i));
            if (p[i].mother >= 0) children[static_cast<std::size_t>(p[i].mother)].push_back(static_cast<int>(i));
        }
        std::vector<int> near;
        for (std::size_t x = 0; x < n; ++x) {
            near.clear();
            auto up = [&](std::size_t i) {
                std::vector<int> out;
                if (p[i].father >= 0) out.push_back(p[i].father);
                if (p[i].mother >= 0) out.push_back(p[i].mother);
                return out;
            };
            if (p[x].spouse >= 0) near.push_back(p[x].spouse);
            for (int c : children[x]) {
                near.push_back(c);
                for (int g : children[static_cast<std::size_t>(c)]) near.push_back(g);
            }
            for (int a : up(x)) {
                near.push_back(a);
                for (int s : children[static_cast<std::size_t>(a)]) {
                    near.push_back(s);
                    for (int nn : children[static_cast<std::size_t>(s)]) near.push_back(nn);
                }
                for (int g : up(static_cast<std::size_t>(a))) {
                    near.push_back(g);
                    for (int s : children[static_cast<std::size_t>(g)]) near.push_back(s);
                }
            }
            std::sort(near.begin(), near.end());
            near.erase(std::unique(near.begin(), near.end()), near.end());
            for (int y : near) f(static_cast<int>(x), y, p[x], p[static_cast<std::size_t>(y)]);
        }
    }

    /// Adds facts for the named relations (X first argument).
    void emit(WorldBuilder& w, const std::string& rel, bool positive) const {
        auto out = [&](int x, int y) {
            const auto& a = p[static_cast<std::size_t>(x)].name;
            const auto& b = p[static_cast<std::size_t>(y)].name;
            if (positive) w.pos(a, b);
            else w.bg(rel, a, b);
        };
        auto parent_of = [&](int x, int y) {
            const auto& c = p[static_cast<std::size_t>(y)];
            return c.father == x || c.mother == x;
        };
        auto uncle_or_aunt = [&](int x, int y) {
            const auto& c = p[static_cast<std::size_t>(y)];
            return (c.father >= 0 && sibling(x, c.father)) || (c.mother >= 0 && sibling(x, c.mother));
        };
        each_pair([&](int x, int y, const Person& a, const Person& b) {
            bool holds = false;
            if (rel == "father") holds = b.father == x;
            else if (rel == "mother") holds = b.mother == x;
            else if (rel == "parent") holds = parent_of(x, y);
            else if (rel == "husband") holds = a.male && a.spouse == y;
            else if (rel == "wife") holds = !a.male && a.spouse == y;
            else if (rel == "son") holds = a.male && parent_of(y, x);
            else if (rel == "son_of_father") holds = a.male && a.father == y;
            else if (rel == "daughter") holds = !a.male && parent_of(y, x);
            else if (rel == "brother") holds = a.male && sibling(x, y);
            else if (rel == "sister") holds = !a.male && sibling(x, y);
            else if (rel == "grandparent")
                holds = (b.father >= 0 && parent_of(x, b.father)) || (b.mother >= 0 && parent_of(x, b.mother));
            else if (rel == "uncle") holds = a.male && uncle_or_aunt(x, y);
            else if (rel == "aunt") holds = !a.male && uncle_or_aunt(x, y);
            else if (rel == "nephew") holds = a.male && uncle_or_aunt(y, x);
            else if (rel == "niece") holds = !a.male && uncle_or_aunt(y, x);
            if (holds) out(x, y);
        });
    }
};

/// Symmetric transitive closure of `parent` (reflexive on connected people).
std::set<std::pair<int, int>> relatedness_closure(int n, const std::vector<std::pair<int, int>>& parent) {
    std::vector<int> comp(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) comp[static_cast<std::size_t>(i)] = i;
    std::function<int(int)> find = [&](int x) {
        return comp[static_cast<std::size_t>(x)] == x ? x : comp[static_cast<std::size_t>(x)] = find(comp[static_cast<std::size_t>(x)]);
    };
    std::vector<bool> touched(static_cast<std::size_t>(n), false);
    for (auto [a, b] : parent) {
        comp[static_cast<std::size_t>(find(a))] = find(b);
        touched[static_cast<std::size_t>(a)] = touched[static_cast<std::size_t>(b)] = true;
    }
    std::set<std::pair<int, int>> out;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (touched[static_cast<std::size_t>(a)] && touched[static_cast<std::size_t>(b)] && find(a) == find(b))
                out.emplace(a, b);
    return out;
}

WorldBuilder family_world(const std::vector<Person>& people, const std::vector<std::string>& background,
                          const std::string& target) {
    std::vector<std::pair<std::string, int>> preds;
    for (const auto& r : background) preds.emplace_back(r, 2);
    WorldBuilder w(preds, target, 2);
    for (const auto& p : people) w.c(p.name);
    Kinship k{people};
    for (const auto& r : background) k.emit(w, r, false);
    k.emit(w, target == "son" ? "son_of_father" : target, true);
    return w;
}

std::vector<Person> make_people(const std::vector<std::tuple<std::string, bool, int, int, int>>& rows) {
    std::vector<Person> out;
    for (const auto& [name, male, f, m, s] : rows) out.push_back({name, male, f, m, s});
    return out;
}

SymbolicTask son_task(Rng& rng) {
    // f0 fathers p1, p2, p3 (two daughters); f4 fathers p5, p6; p1 fathers p7, p8.
    auto train = make_people({{"f0", true, -1, -1, -1},
                              {"p1", true, 0, -1, -1},
                              {"p2", false, 0, -1, -1},
                              {"p3", false, 0, -1, -1},
                              {"f4", true, -1, -1, -1},
                              {"p5", false, 4, -1, -1},
                              {"p6", true, 4, -1, -1},
                              {"p7", true, 1, -1, -1},
                              {"p8", false, 1, -1, -1}});
    auto test = random_family(rng, "s", 2, 3, 2, 3);
    std::vector<std::string> bg = {"father", "brother", "sister"};
    return finish("son", 3, "son(X,Y) :- father(Y,X), brother(X,V3).", family_world(train, bg, "son"),
                  family_world(test, bg, "son"), false);
}

SymbolicTask grandparent_task(Rng& rng) {
    auto train = make_people({{"g1", true, -1, -1, 1},
                              {"g2", false, -1, -1, 0},
                              {"a1", true, 0, 1, 4},
                              {"a2", false, 0, 1, 5},
                              {"w1", false, -1, -1, 2},
                              {"x1", true, -1, -1, 3},
                              {"c1", true, 2, 4, -1},
                              {"c2", false, 2, 4, -1},
                              {"c3", true, 5, 3, -1}});
    auto test = random_family(rng, "g", 2, 3, 1, 3);
    std::vector<std::string> bg = {"father", "mother"};
    return finish("grandparent", 3,
                  "grandparent(X,Y) :- father(X,V3), father(V3,Y).\n"
                  "grandparent(X,Y) :- father(X,V3), mother(V3,Y).\n"
                  "grandparent(X,Y) :- mother(X,V3), father(V3,Y).\n"
                  "grandparent(X,Y) :- mother(X,V3), mother(V3,Y).",
                  family_world(train, bg, "grandparent"), family_world(test, bg, "grandparent"), false);
}

SymbolicTask father_task(Rng& rng) {
    auto train = make_people({{"h1", true, -1, -1, 1},
                              {"w1", false, -1, -1, 0},
                              {"k1", true, 0, 1, 4},
                              {"k2", false, 0, 1, -1},
                              {"w2", false, -1, -1, 2},
                              {"c1", true, 2, 4, -1}});
    auto test = random_family(rng, "f", 2, 3, 1, 3);
    std::vector<std::string> bg = {"husband", "wife", "mother", "daughter"};
    return finish("father", 3, "father(X,Y) :- husband(X,V3), mother(V3,Y).", family_world(train, bg, "father"),
                  family_world(test, bg, "father"), false);
}

SymbolicTask relatedness_task(Rng& rng) {
    auto world = [](const std::vector<std::string>& names, const std::vector<std::pair<int, int>>& parent) {
        WorldBuilder w({{"parent", 2}}, "related", 2);
        w.constants(names);
        for (auto [a, b] : parent) w.bg("parent", names[static_cast<std::size_t>(a)], names[static_cast<std::size_t>(b)]);
        for (auto [a, b] : relatedness_closure(static_cast<int>(names.size()), parent))
            w.pos(names[static_cast<std::size_t>(a)], names[static_cast<std::size_t>(b)]);
        return w;
    };
    auto train = world({"a", "b", "c", "d", "e", "f", "g", "h"}, {{0, 1}, {0, 2}, {1, 3}, {4, 5}, {6, 5}, {6, 7}});
    // Random forest: each new person gets a random earlier parent or starts a new tree.
    std::vector<std::string> names;
    std::vector<std::pair<int, int>> parent;
    std::bernoulli_distribution root(0.25);
    for (int i = 0; i < 12; ++i) {
        names.push_back("r" + num(i));
        if (i > 0 && !root(rng)) parent.emplace_back(std::uniform_int_distribution<int>(0, i - 1)(rng), i);
    }
    return finish("relatedness", 3,
                  "related(X,Y) :- parent(X,Y).\nrelated(X,Y) :- related(Y,X).\n"
                  "related(X,Y) :- related(X,V3), related(V3,Y).",
                  std::move(train), world(names, parent), false);
}

/// Kinship forest used by the husband and uncle tasks. Sized to 2102 persons
/// in training; generated from a fixed stream so every run sees the same data.
SymbolicTask kinship_task(const std::string& target, int size) {
    static const std::vector<std::string> relations = {"aunt",   "brother", "daughter", "father", "husband", "mother",
                                                        "nephew", "niece",   "sister",   "son",    "uncle",   "wife"};
    std::vector<std::string> bg;
    for (const auto& r : relations)
        if (r != target) bg.push_back(r);
    auto forest = [&](std::uint64_t stream, const std::string& prefix, std::size_t total) {
        Rng rng(mix_seed(0x6b696e, stream));
        std::vector<Person> people;
        int tree = 0;
        while (people.size() < total) {
            auto t = random_family(rng, prefix + num(tree++) + "_", 1, 4, 1, 4, total - people.size());
            int offset = static_cast<int>(people.size());
            for (auto p : t) {
                if (p.father >= 0) p.father += offset;
                if (p.mother >= 0) p.mother += offset;
                if (p.spouse >= 0) p.spouse += offset;
                people.push_back(p);
            }
        }
        return people;
    };
    auto train = forest(1, "p", static_cast<std::size_t>(size));
    auto test = forest(2, "q", static_cast<std::size_t>(std::max(60, size / 6)));
    auto tw = family_world(train, bg, target);
    auto sw = family_world(test, bg, target);
    SymbolicTask t;
    t.name = target;
    t.target = target;
    t.variables = target == "husband" ? 2 : 3;
    t.gold_rules = target == "husband" ? "husband(X,Y) :- wife(Y,X)."
                                       : "uncle(X,Y) :- brother(X,V3), father(V3,Y).\n"
                                         "uncle(X,Y) :- brother(X,V3), mother(V3,Y).";
    t.train = std::move(tw.fb());
    t.test = std::move(sw.fb());
    t.test_positives = t.test.positives.items();
    return t;
}

// ---------------------------------------------------------------------------
// Graphs

struct Graph {
    std::vector<std::string> nodes;
    std::vector<std::pair<int, int>> edges;
    std::vector<int> colour;  // 0 red, 1 green

    bool edge(int a, int b) const { return std::find(edges.begin(), edges.end(), std::make_pair(a, b)) != edges.end(); }

    std::vector<std::vector<bool>> closure() const {
        auto n = nodes.size();
        std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
        for (auto [a, b] : edges) r[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = true;
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (r[i][k] && r[k][j]) r[i][j] = true;
        return r;
    }
};

Graph random_graph(Rng& rng, const std::string& prefix, int n, double p) {
    Graph g;
    std::bernoulli_distribution e(p);
    std::bernoulli_distribution c(0.5);
    for (int i = 0; i < n; ++i) {
        g.nodes.push_back(prefix + num(i));
        g.colour.push_back(c(rng) ? 1 : 0);
    }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (a != b && e(rng)) g.edges.emplace_back(a, b);
    return g;
}

const char* colour_name(int c) { return c == 0 ? "red" : "green"; }

WorldBuilder graph_world(const std::string& task, const Graph& g) {
    auto n = static_cast<int>(g.nodes.size());
    auto name = [&](int i) { return g.nodes[static_cast<std::size_t>(i)]; };
    std::vector<std::pair<std::string, int>> preds;
    std::string target;
    int arity = 1;
    if (task == "undirected_edge") preds = {{"edge", 2}}, target = "uedge", arity = 2;
    else if (task == "adjacent_to_red") preds = {{"edge", 2}, {"colour", 2}, {"red", 1}, {"green", 1}}, target = "target";
    else if (task == "two_children") preds = {{"edge", 2}, {"neq", 2}}, target = "two_children";
    else if (task == "graph_coloring") preds = {{"edge", 2}, {"colour", 2}}, target = "target";
    else if (task == "connectedness") preds = {{"edge", 2}}, target = "connected", arity = 2;
    else preds = {{"edge", 2}, {"connected", 2}}, target = "cyclic";
    WorldBuilder w(preds, target, arity);
    w.constants(g.nodes);
    bool coloured = task == "adjacent_to_red" || task == "graph_coloring";
    if (coloured) w.constants({"red", "green"});
    for (auto [a, b] : g.edges) w.bg("edge", name(a), name(b));
    if (coloured)
        for (int i = 0; i < n; ++i) w.bg("colour", name(i), colour_name(g.colour[static_cast<std::size_t>(i)]));
    if (task == "adjacent_to_red") {
        w.bg("red", "red");
        w.bg("green", "green");
    }
    if (task == "two_children")
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                if (a != b) w.bg("neq", name(a), name(b));
    auto reach = g.closure();
    if (task == "cyclic")
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                if (reach[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]) w.bg("connected", name(a), name(b));

    for (int a = 0; a < n; ++a) {
        auto ua = static_cast<std::size_t>(a);
        if (task == "undirected_edge") {
            for (int b = 0; b < n; ++b)
                if (g.edge(a, b) || g.edge(b, a)) w.pos(name(a), name(b));
        } else if (task == "connectedness") {
            for (int b = 0; b < n; ++b)
                if (reach[ua][static_cast<std::size_t>(b)]) w.pos(name(a), name(b));
        } else if (task == "cyclic") {
            if (reach[ua][ua]) w.pos(name(a));
        } else {
            int children = 0;
            bool hit = false;
            for (int b = 0; b < n; ++b) {
                if (!g.edge(a, b)) continue;
                ++children;
                auto cb = g.colour[static_cast<std::size_t>(b)];
                if (task == "adjacent_to_red" && cb == 0) hit = true;
                if (task == "graph_coloring" && cb == g.colour[ua]) hit = true;
            }
            if (task == "two_children") hit = children >= 2;
            if (hit) w.pos(name(a));
        }
    }
    return w;
}

SymbolicTask graph_task(const std::string& task, Rng& rng) {
    Graph train;
    auto nodes = [](std::initializer_list<const char*> names) {
        std::vector<std::string> v;
        for (auto n : names) v.emplace_back(n);
        return v;
    };
    std::string gold;
    int d = 3;
    if (task == "undirected_edge") {
        train.nodes = nodes({"a", "b", "c", "d"});
        train.edges = {{0, 1}, {1, 2}, {2, 3}};
        gold = "uedge(X,Y) :- edge(X,Y).\nuedge(X,Y) :- edge(Y,X).";
        d = 2;
    } else if (task == "adjacent_to_red") {
        train.nodes = nodes({"n1", "n2", "n3", "n4", "n5"});
        train.edges = {{0, 3}, {0, 4}, {1, 3}, {2, 0}, {2, 3}, {4, 2}};
        train.colour = {0, 1, 0, 1, 1};
        gold = "target(X) :- edge(X,Y), colour(Y,V3), red(V3).";
    } else if (task == "two_children") {
        train.nodes = nodes({"a", "b", "c", "d", "e"});
        train.edges = {{0, 3}, {1, 2}, {2, 0}, {2, 3}, {2, 4}, {3, 0}, {3, 1}, {3, 2}, {4, 0}, {4, 1}, {4, 2}, {4, 3}};
        gold = "two_children(X) :- edge(X,Y), edge(X,V3), neq(Y,V3).";
    } else if (task == "graph_coloring") {
        train.nodes = nodes({"a", "b", "c", "d", "e", "f"});
        train.edges = {{1, 2}, {2, 4}, {3, 2}, {4, 1}, {4, 3}, {5, 0}, {5, 1}};
        train.colour = {0, 1, 0, 0, 1, 1};
        gold = "target(X) :- edge(X,Y), colour(X,V3), colour(Y,V3).";
    } else if (task == "connectedness") {
        train.nodes = nodes({"a", "b", "c", "d"});
        train.edges = {{0, 1}, {1, 2}, {2, 3}};
        gold = "connected(X,Y) :- edge(X,Y).\nconnected(X,Y) :- edge(X,V3), connected(V3,Y).";
    } else {
        train.nodes = nodes({"a", "b", "c", "d", "e", "f"});
        train.edges = {{1, 2}, {1, 3}, {2, 0}, {3, 1}, {3, 5}, {4, 3}, {5, 3}};
        gold = "cyclic(X) :- edge(X,Y), connected(Y,X).";
        d = 2;
    }
    if (train.colour.empty()) train.colour.assign(train.nodes.size(), 0);
    // Test graphs are redrawn until they contain at least one positive.
    for (;;) {
        Graph test = random_graph(rng, "t", task == "undirected_edge" || task == "connectedness" ? 6 : 8, 0.2);
        auto w = graph_world(task, test);
        if (w.fb().positives.empty()) continue;
        return finish(task, d, gold, graph_world(task, train), std::move(w), false);
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// MNIST sequence

SymbolicTask gen_mnist_sequence(int prefix_len, SequenceTarget target) {
    if (prefix_len < 4) throw ConfigError("sequence prefix must contain at least four images");
    std::vector<std::pair<std::string, int>> preds = {{"succ", 2}, {"start", 1}};
    for (int n = 1; n <= 10; ++n) preds.emplace_back("before_" + num(n), 2);
    WorldBuilder w(preds, "target", 1);
    SymbolicTask t;
    auto img = [](int i) { return "img" + num(i); };
    for (int i = 1; i <= prefix_len; ++i) {
        w.c(img(i));
        t.digit_labels.push_back(i % 2 == 1 ? (i - 1) / 2 : 5);
    }
    auto label = [&](int i) { return t.digit_labels[static_cast<std::size_t>(i - 1)]; };
    for (int i = 1; i <= prefix_len; ++i)
        for (int j = 1; j <= prefix_len; ++j)
            if (label(j) == label(i) + 1) w.bg("succ", img(i), img(j));
    w.bg("start", img(1));
    for (int n = 1; n <= 10; ++n)
        for (int i = 1; i + n <= prefix_len; ++i) w.bg("before_" + num(n), img(i), img(i + n));
    for (int i = 1; i <= prefix_len; ++i)
        if ((i % 2 == 0) == (target == SequenceTarget::even_index)) w.pos(img(i));
    w.close_world();
    t.name = "mnist_sequence";
    t.target = "target";
    t.variables = 3;
    t.gold_rules = target == SequenceTarget::even_index ? "target(X) :- before_8(X,Y), before_10(X,Y), target(Y)."
                                                        : "target(X) :- succ(X,Y), before_2(X,Y), target(Y).";
    t.train = std::move(w.fb());
    t.test = t.train;
    t.test_positives = t.train.positives.items();
    return t;
}

SymbolicTask gen_symbolic_task(const TaskSpec& spec) {
    const auto& n = spec.name;
    Rng rng(mix_seed(spec.seed, std::hash<std::string>{}(n)));
    auto size = [&](int def) { return spec.size > 0 ? spec.size : def; };
    if (n == "predecessor" || n == "even" || n == "odd" || n == "lessthan") return arithmetic(n, size(10));
    if (n == "fizz") return arithmetic(n, size(7));
    if (n == "buzz") return arithmetic(n, size(10));
    if (n == "member") return member_task();
    if (n == "length") return length_task();
    if (n == "son") return son_task(rng);
    if (n == "grandparent") return grandparent_task(rng);
    if (n == "father") return father_task(rng);
    if (n == "relatedness") return relatedness_task(rng);
    if (n == "husband" || n == "uncle") return kinship_task(n, size(2102));
    if (n == "undirected_edge" || n == "adjacent_to_red" || n == "two_children" || n == "graph_coloring" ||
        n == "connectedness" || n == "cyclic")
        return graph_task(n, rng);
    if (n == "mnist_sequence") return gen_mnist_sequence(size(12), spec.parity);
    throw ConfigError("unknown symbolic task: " + n);
}

Task gen_task(const TaskSpec& spec) {
    if (is_kandinsky_task(spec.name)) return gen_kandinsky_task(spec);
    return gen_symbolic_task(spec);
}

}  // namespace gilp
