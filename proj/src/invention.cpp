#include "gilp/invention.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace gilp {

ObjectPool ObjectPool::build(const std::vector<KandinskyInstance>& instances, const std::vector<int>& assignment) {
    ObjectPool pool;
    for (std::size_t i = 0; i < instances.size(); ++i)
        for (const auto& o : instances[i].objects) {
            pool.objects.push_back(o);
            pool.instance.push_back(static_cast<int>(i));
        }
    if (assignment.size() != pool.objects.size()) throw DataError("cluster assignment does not match the object count");
    pool.cluster = assignment;
    return pool;
}

std::vector<int> placeholder_clusters(const BodyAtomSpace& space, int pred) {
    for (const auto& a : space.atoms)
        if (a.pred == pred) {
            std::vector<int> out;
            for (const auto& t : a.terms) out.push_back(t.value - 1);
            return out;
        }
    throw DataError("predicate is not a placeholder of this space: " + space.preds[pred].name);
}

std::vector<int> retrieve_constants(const ObjectPool& pool, int cluster) {
    std::vector<int> out;
    for (std::size_t i = 0; i < pool.cluster.size(); ++i)
        if (pool.cluster[i] == cluster) out.push_back(static_cast<int>(i));
    if (out.empty()) throw EvaluationError("rule references empty cluster " + std::to_string(cluster));
    return out;
}

std::vector<int> sample_evidence(const std::vector<int>& ids, int cap, std::uint64_t seed) {
    std::vector<int> out = ids;
    if (cap >= 0 && static_cast<int>(out.size()) > cap) {
        std::mt19937_64 rng(seed);
        std::shuffle(out.begin(), out.end(), rng);
        out.resize(static_cast<std::size_t>(cap));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string describe_object(const ObjectRecord& o) {
    return std::string(to_string(o.color)) + " " + to_string(o.shape);
}

std::string build_prompt(const std::string& placeholder, const std::vector<std::vector<ObjectRecord>>& evidence) {
    std::ostringstream out;
    if (evidence.size() == 2)
        out << "What is the relation between the two ordered sets of images?\n";
    else
        out << "What is the common property of the set of images?\n";
    for (std::size_t i = 0; i < evidence.size(); ++i) {
        out << "Set " << i + 1 << ":";
        for (const auto& o : evidence[i]) out << " " << describe_object(o) << ";";
        out << "\n";
    }
    out << "Answer with a description, then a snake_case predicate name for " << placeholder << " on the last line.\n";
    return out.str();
}

const Semantics* SemanticsBundle::find(const std::string& placeholder) const {
    for (const auto& e : entries)
        if (e.placeholder == placeholder) return &e;
    return nullptr;
}

TranslationReply MockTranslator::translate(const TranslationRequest& request) {
    const auto& ev = request.evidence;
    auto unknown = [&] { return TranslationReply{"unknown_relation_" + std::to_string(++unknown_), "no common property"}; };
    if (ev.empty() || std::any_of(ev.begin(), ev.end(), [](const auto& s) { return s.empty(); })) return unknown();
    if (ev.size() == 1) {
        const auto& set = ev.front();
        bool same_shape = std::all_of(set.begin(), set.end(), [&](const auto& o) { return o.shape == set[0].shape; });
        bool same_color = std::all_of(set.begin(), set.end(), [&](const auto& o) { return o.color == set[0].color; });
        std::string shape = std::string("shape in ") + to_string(set[0].shape);
        std::string color = std::string("color in ") + to_string(set[0].color);
        if (same_color)
            return {std::string("color_in_") + to_string(set[0].color), same_shape ? shape + ", " + color : color};
        if (same_shape) return {std::string("shape_in_") + to_string(set[0].shape), shape};
        return unknown();
    }
    if (ev.size() == 2) {
        bool all = true;
        for (const auto& a : ev[0])
            for (const auto& b : ev[1]) all = all && a.shape == b.shape && a.color != b.color;
        if (all) return {"same_shape_and_different_color", "same shape and different color"};
    }
    return unknown();
}

bool is_snake_case(const std::string& s) {
    if (s.empty() || !std::islower(static_cast<unsigned char>(s[0]))) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '_';
    });
}

std::optional<std::string> parse_reply_name(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::optional<std::string> last;
    while (std::getline(in, line)) {
        auto b = line.find_first_not_of(" \t\r`*");
        auto e = line.find_last_not_of(" \t\r`*.");
        if (b == std::string::npos) continue;
        std::string word = line.substr(b, e - b + 1);
        if (is_snake_case(word)) last = word;
    }
    return last;
}

SemanticsBundle induce_semantics(const LogicProgram& program, const BodyAtomSpace& space, const ObjectPool& pool,
                                 Translator& translator, int evidence_cap, std::uint64_t seed) {
    std::set<int> used;
    for (const auto& r : program.rules)
        for (const auto& a : r.body)
            if (space.preds[a.pred].kind == PredicateKind::placeholder) used.insert(a.pred);
    SemanticsBundle bundle;
    for (int pred : used) {
        Semantics s;
        s.placeholder = space.preds[pred].name;
        TranslationRequest req{s.placeholder, {}, {}};
        for (int c : placeholder_clusters(space, pred)) {
            auto ids = sample_evidence(retrieve_constants(pool, c), evidence_cap,
                                       mix_seed(seed, static_cast<std::uint64_t>(pred) * 131 + static_cast<std::uint64_t>(c)));
            std::vector<ObjectRecord> objs;
            for (int id : ids) objs.push_back(pool.objects[static_cast<std::size_t>(id)]);
            s.evidence.push_back(std::move(ids));
            req.evidence.push_back(std::move(objs));
        }
        s.prompt = build_prompt(s.placeholder, req.evidence);
        req.prompt = s.prompt;
        try {
            auto reply = translator.translate(req);
            if (!is_snake_case(reply.name)) throw DataError("translator returned an invalid predicate name");
            s.name = reply.name;
            s.description = reply.description;
            s.translated = true;
        } catch (const std::exception& e) {
            s.name = s.placeholder;
            s.description = std::string("untranslated: ") + e.what();
        }
        bundle.entries.push_back(std::move(s));
    }
    return bundle;
}

namespace {

template <typename E>
std::optional<E> parse_enum(const std::string& s, E (*parse)(const std::string&)) {
    try {
        return parse(s);
    } catch (const Error&) {
        return std::nullopt;
    }
}

int feature_arity(const std::string& name) {
    if (name == "same_shape_and_different_color") return 2;
    if (name.rfind("color_in_", 0) == 0 && parse_enum<Color>(name.substr(9), parse_color)) return 1;
    if (name.rfind("shape_in_", 0) == 0 && parse_enum<Shape>(name.substr(9), parse_shape)) return 1;
    return 0;
}


}  // namespace

bool is_feature_predicate(const std::string& name) { return feature_arity(name) > 0; }

bool holds_feature(const std::string& name, const std::vector<const ObjectRecord*>& args) {
    int arity = feature_arity(name);
    if (arity == 0) throw EvaluationError("no feature semantics for predicate " + name);
    if (static_cast<int>(args.size()) != arity) throw EvaluationError("wrong argument count for " + name);
    if (name == "same_shape_and_different_color")
        return args[0]->shape == args[1]->shape && args[0]->color != args[1]->color;
    if (name.rfind("color_in_", 0) == 0) return args[0]->color == parse_color(name.substr(9));
    return args[0]->shape == parse_shape(name.substr(9));
}

std::vector<Reading> candidate_readings(const Semantics& s, const ObjectPool& pool) {
    std::vector<Reading> out;
    if (!s.translated) return out;
    std::vector<std::vector<const ObjectRecord*>> sets;
    for (const auto& ids : s.evidence) {
        std::vector<const ObjectRecord*> objs;
        for (int id : ids) objs.push_back(&pool.objects.at(static_cast<std::size_t>(id)));
        if (objs.empty()) return out;
        sets.push_back(std::move(objs));
    }
    if (sets.size() == 2) {
        bool all = true;
        for (const auto* a : sets[0])
            for (const auto* b : sets[1]) all = all && holds_feature("same_shape_and_different_color", {a, b});
        if (all) out.push_back({"same_shape_and_different_color", {0, 1}});
    }
    for (std::size_t pos = 0; pos < sets.size(); ++pos) {
        const auto& set = sets[pos];
        const ObjectRecord& first = *set.front();
        if (std::all_of(set.begin(), set.end(), [&](const auto* o) { return o->color == first.color; }))
            out.push_back({std::string("color_in_") + to_string(first.color), {static_cast<int>(pos)}});
        if (std::all_of(set.begin(), set.end(), [&](const auto* o) { return o->shape == first.shape; }))
            out.push_back({std::string("shape_in_") + to_string(first.shape), {static_cast<int>(pos)}});
    }
    return out;
}

namespace {

/// Per-atom truth test: a feature predicate, or a cluster-backed predicate
/// holding when the bound objects' clusters match one of its tuples.
struct AtomCheck {
    std::string name;
    const std::vector<std::vector<int>>* clusters = nullptr;
};

bool rule_holds(const Rule& rule, const std::vector<AtomCheck>& checks, const std::vector<int>& objs,
                const ObjectPool& pool) {
    std::vector<int> theta(static_cast<std::size_t>(rule.max_var() + 1), -1);
    auto bound = [&](const Term& t) { return theta[static_cast<std::size_t>(t.value)]; };
    std::function<bool(std::size_t)> search = [&](std::size_t atom) -> bool {
        if (atom == rule.body.size()) return true;
        const auto& a = rule.body[atom];
        // Bind the first unbound variable of this atom, then retry the same atom.
        for (const auto& t : a.terms) {
            if (bound(t) >= 0) continue;
            for (int o : objs) {
                theta[static_cast<std::size_t>(t.value)] = o;
                if (search(atom)) return true;
            }
            theta[static_cast<std::size_t>(t.value)] = -1;
            return false;
        }
        const auto& chk = checks[atom];
        bool ok = false;
        if (chk.clusters) {
            for (const auto& tuple : *chk.clusters) {
                bool match = tuple.size() == a.terms.size();
                for (std::size_t i = 0; match && i < a.terms.size(); ++i)
                    match = pool.cluster[static_cast<std::size_t>(bound(a.terms[i]))] == tuple[i];
                ok = ok || match;
            }
        } else {
            std::vector<const ObjectRecord*> args;
            for (const auto& t : a.terms) args.push_back(&pool.objects[static_cast<std::size_t>(bound(t))]);
            ok = holds_feature(chk.name, args);
        }
        return ok && search(atom + 1);
    };
    return search(0);
}

using ClusterMap = std::map<int, std::vector<std::vector<int>>>;

std::vector<AtomCheck> checks_for(const Rule& rule, const Signature& preds, const ClusterMap& clusters) {
    std::vector<AtomCheck> out;
    for (const auto& a : rule.body) {
        AtomCheck c{preds[a.pred].name, nullptr};
        if (auto it = clusters.find(a.pred); it != clusters.end())
            c.clusters = &it->second;
        else if (!is_feature_predicate(c.name))
            throw EvaluationError("no semantics for predicate " + c.name);
        out.push_back(c);
    }
    return out;
}

Metrics instance_metrics(const std::vector<bool>& predicted, const std::vector<KandinskyInstance>& instances) {
    std::size_t tp = 0, fp = 0, pos = 0;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        pos += instances[i].label;
        tp += predicted[i] && instances[i].label;
        fp += predicted[i] && !instances[i].label;
    }
    if (pos == 0) throw EvaluationError("no positive instances to evaluate against");
    Metrics m;
    if (tp + fp > 0) m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    m.recall = static_cast<double>(tp) / static_cast<double>(pos);
    m.derived_count = tp + fp;
    m.body_matches = tp + fp;
    m.correct_matches = tp;
    return m;
}

Metrics evaluate_rules_on(const std::vector<const Rule*>& rules, const Signature& preds, const ClusterMap& clusters,
                          const std::vector<KandinskyInstance>& instances, const ObjectPool* pool) {
    ObjectPool fallback;
    if (!pool) {
        for (const auto* r : rules)
            for (const auto& a : r->body)
                if (clusters.contains(a.pred)) throw EvaluationError("cluster-backed rules need cluster assignments");
        std::size_t n = 0;
        for (const auto& i : instances) n += i.objects.size();
        fallback = ObjectPool::build(instances, std::vector<int>(n, -1));
        pool = &fallback;
    }
    if (!pool->instance.empty() && static_cast<std::size_t>(pool->instance.back()) + 1 != instances.size())
        throw EvaluationError("object pool does not match the instances");
    std::vector<std::vector<AtomCheck>> checks;
    for (const auto* r : rules) checks.push_back(checks_for(*r, preds, clusters));
    std::vector<std::vector<int>> by_inst(instances.size());
    for (std::size_t i = 0; i < pool->instance.size(); ++i)
        by_inst.at(static_cast<std::size_t>(pool->instance[i])).push_back(static_cast<int>(i));
    std::vector<bool> predicted(instances.size(), false);
    for (std::size_t i = 0; i < instances.size(); ++i)
        for (std::size_t r = 0; r < rules.size() && !predicted[i]; ++r)
            predicted[i] = rule_holds(*rules[r], checks[r], by_inst[i], *pool);
    return instance_metrics(predicted, instances);
}

double f1(const Metrics& m) {
    double p = m.precision.value_or(0.0);
    return p + m.recall > 0.0 ? 2.0 * p * m.recall / (p + m.recall) : 0.0;
}

std::vector<const Rule*> pointers(const LogicProgram& p) {
    std::vector<const Rule*> out;
    for (const auto& r : p.rules) out.push_back(&r);
    return out;
}

}  // namespace

InventedProgram generalize_program(const LogicProgram& program, const BodyAtomSpace& space,
                                   const SemanticsBundle& semantics, const ObjectPool& train_pool,
                                   const std::vector<KandinskyInstance>& train) {
    InventedProgram out;
    out.preds = space.preds;
    out.program = program;
    std::map<int, int> uses;
    for (const auto& r : program.rules)
        for (const auto& a : r.body)
            if (space.preds[a.pred].kind == PredicateKind::placeholder) {
                ++uses[a.pred];
                out.clusters[a.pred] = {placeholder_clusters(space, a.pred)};
            }
    std::vector<int> order;
    for (const auto& [pred, n] : uses) order.push_back(pred);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return uses[a] > uses[b]; });

    auto rewrite = [&](LogicProgram p, int pred, const Reading& reading, int target) {
        for (auto& r : p.rules)
            for (auto& a : r.body)
                if (a.pred == pred) {
                    std::vector<Term> terms;
                    for (int pos : reading.args) terms.push_back(a.terms.at(static_cast<std::size_t>(pos)));
                    a = {target, std::move(terms)};
                }
        return p;
    };
    for (int pred : order) {
        const std::string& ph = space.preds[pred].name;
        const Semantics* s = semantics.find(ph);
        if (!s || !s->translated) continue;
        auto readings = candidate_readings(*s, train_pool);
        if (readings.empty()) {
            // No feature reading: rename, merging clusters under a shared name.
            int arity = space.preds[pred].arity;
            auto existing = out.preds.find(s->name);
            if (s->name == ph || (existing && out.preds[*existing].arity != arity) || is_feature_predicate(s->name))
                continue;
            int id = out.preds.intern(s->name, arity);
            auto& tuples = out.clusters[id];
            for (const auto& t : out.clusters[pred]) tuples.push_back(t);
            std::vector<int> all(static_cast<std::size_t>(arity));
            std::iota(all.begin(), all.end(), 0);
            out.program = rewrite(out.program, pred, {s->name, all}, id);
            out.clusters.erase(pred);
            out.renamed[ph] = s->name;
            continue;
        }
        std::optional<Reading> best;
        double best_f1 = -1.0;
        LogicProgram best_program;
        // Readings come from sampled evidence; one that loses training recall
        // contradicts the cluster and is rejected.
        double base_recall = evaluate_rules_on(pointers(out.program), out.preds, out.clusters, train, &train_pool).recall;
        for (const auto& reading : readings) {
            int id = out.preds.intern(reading.name, static_cast<int>(reading.args.size()));
            auto trial = rewrite(out.program, pred, reading, id);
            Metrics m = evaluate_rules_on(pointers(trial), out.preds, out.clusters, train, &train_pool);
            if (m.recall < base_recall) continue;
            double score = f1(m);
            bool own = reading.name == s->name;
            if (score > best_f1 || (score == best_f1 && own)) {
                best = reading;
                best_f1 = score;
                best_program = std::move(trial);
            }
        }
        if (!best) continue;
        out.program = std::move(best_program);
        out.clusters.erase(pred);
        out.renamed[ph] = best->name;
    }
    out.program = dedup_rules(out.program);
    return out;
}

Metrics evaluate_invented(const InventedProgram& p, const std::vector<KandinskyInstance>& instances,
                          const ObjectPool* pool) {
    return evaluate_rules_on(pointers(p.program), p.preds, p.clusters, instances, pool);
}

Metrics evaluate_invented_rule(const InventedProgram& p, std::size_t rule, const std::vector<KandinskyInstance>& instances,
                               const ObjectPool* pool) {
    return evaluate_rules_on({&p.program.rules.at(rule)}, p.preds, p.clusters, instances, pool);
}

Metrics evaluate_constrained(const LogicProgram& program, const BodyAtomSpace& space,
                             const std::vector<KandinskyInstance>& instances, const ObjectPool& pool) {
    ClusterMap clusters;
    for (const auto& r : program.rules)
        for (const auto& a : r.body) clusters[a.pred] = {placeholder_clusters(space, a.pred)};
    return evaluate_rules_on(pointers(program), space.preds, clusters, instances, &pool);
}

}  // namespace gilp
