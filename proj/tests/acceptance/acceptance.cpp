// Acceptance run: one PASS/FAIL line per criterion, followed by indented
// details. The exit status is nonzero only when the run itself breaks; the
// verdicts are the lines.

#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "gilp/invention.hpp"
#include "gilp/trainer.hpp"

using namespace gilp;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fixed(double v, int digits = 2) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(digits) << v;
    return out.str();
}

std::string opt_fixed(const std::optional<double>& v) { return v ? fixed(*v) : std::string("-"); }

struct Verdict {
    bool pass = true;
    std::vector<std::string> details;

    void require(bool ok, const std::string& line) {
        pass = pass && ok;
        details.push_back(std::string(ok ? "ok   " : "miss ") + line);
    }
};

void print(const std::string& name, const Verdict& v) {
    std::cout << (v.pass ? "PASS " : "FAIL ") << name << "\n";
    for (const auto& d : v.details) std::cout << "    " << d << "\n";
    std::cout.flush();
}

bool precise(const Metrics& m) { return m.precision && *m.precision == 1.0; }

struct SymbolicOutcome {
    BestOfRuns runs;
    double seconds = 0.0;
};

SymbolicOutcome train_task(const std::string& name, const TaskSpec& spec_in = {}) {
    TaskSpec spec = spec_in;
    spec.name = name;
    TrainConfig cfg = default_config(name);
    auto start = Clock::now();
    SymbolicOutcome out{train_best_of(gen_task(spec), cfg), 0.0};
    out.seconds = seconds_since(start);
    return out;
}

/// Best of 10 runs reaches a precision-1 program with recall 1 within 300 s.
void check_recall_tasks(Verdict& v, const std::vector<std::string>& tasks) {
    for (const auto& name : tasks) {
        auto o = train_task(name);
        const auto& m = o.runs.best_run().metrics;
        bool ok = precise(m) && m.recall == 1.0 && o.seconds <= 300.0;
        v.require(ok, name + ": precision " + opt_fixed(m.precision) + ", recall " + fixed(m.recall) + ", " +
                          fixed(o.seconds, 1) + " s");
    }
}

Rule parse_rule(const std::string& text, Signature sig) { return parse_program(text, sig).rules.at(0); }

bool body_uses(const Rule& r, const Signature& sig, const std::string& pred) {
    return std::any_of(r.body.begin(), r.body.end(), [&](const Atom& a) { return sig[a.pred].name == pred; });
}

void fizz_buzz(Verdict& v) {
    for (const std::string name : {"fizz", "buzz"}) {
        auto task = gen_symbolic_task({name});
        auto o = train_task(name);
        const RunResult& best = o.runs.best_run();
        const Signature& sig = best.space.preds;
        Rule base = parse_rule(name + "(X) :- zero(X).", sig);
        Rule shared = parse_rule(name + "(X) :- succ(Z,Y), " + name + "(Y), succ(Z,X).", sig);
        v.require(contains_rule(best.extracted, base), name + ": extracted program contains " + name + "(X) :- zero(X).");
        v.require(contains_rule(best.extracted, shared),
                  name + ": extracted program contains " + name + "(X) :- succ(Z,Y), " + name + "(Y), succ(Z,X).");
        // Partial recall: the kept program over the task's own domain.
        auto m = evaluate_rules(best.rules, task.train, task.train.positives.items());
        v.require(m.recall > 0.0 && m.recall < 1.0, name + ": recall " + fixed(m.recall) + " on the training domain");
    }
}

void mnist(Verdict& v) {
    for (auto parity : {SequenceTarget::odd_index, SequenceTarget::even_index}) {
        TaskSpec spec;
        spec.name = "mnist_sequence";
        spec.parity = parity;
        auto task = gen_symbolic_task(spec);
        TrainConfig cfg = default_config("mnist_sequence");
        auto best = train_best_of(task, cfg);
        bool odd = parity == SequenceTarget::odd_index;
        std::string label = odd ? "odd" : "even";
        bool found = false;
        std::string detail;
        for (const auto& run : best.runs) {
            const Signature& sig = run.space.preds;
            FactBase latent = latent_fact_base(task.train, run.clustering->assign_all(constant_embeddings(task, cfg)), cfg.k);
            if (odd) {
                Rule gold = parse_rule(task.gold_rules, sig);
                if (!contains_rule(run.rules, gold)) continue;
                auto m = evaluate_rules({{gold}}, latent, latent.positives.items(), {true});
                if (precise(m) && m.recall == 1.0) {
                    found = true;
                    detail = format_rule(gold, sig);
                }
            } else {
                for (const auto& r : run.rules.rules) {
                    auto p = rule_precision(r, latent);
                    if (p && *p == 1.0 && body_uses(r, sig, "before_8") && body_uses(r, sig, "before_10")) {
                        found = true;
                        detail = format_rule(r, sig);
                    }
                }
            }
            if (found) break;
        }
        std::string want = odd ? "target(X) :- succ(X,Y), before_2(X,Y), target(Y). with precision 1, recall 1"
                               : "a precision-1 rule with before_8 and before_10";
        v.require(found, label + " index: " + (found ? detail : "no run of " + std::to_string(best.runs.size()) +
                                                                   " recovered " + want));
    }
}

struct KandinskyOutcome {
    KandinskyTask task;
    TrainConfig cfg;
    BestOfRuns runs;
};

KandinskyOutcome train_kandinsky(const std::string& name, double lambda = -1.0, std::uint64_t seed = 0) {
    KandinskyOutcome o;
    o.task = gen_kandinsky_task({name});
    o.cfg = default_config(name);
    o.cfg.seed = seed;
    if (lambda >= 0.0) o.cfg.lambda = lambda;
    o.runs = train_best_of(o.task, o.cfg);
    return o;
}

/// Invented program of the best run, generalized with the mock translator.
std::pair<InventedProgram, ObjectPool> invent(const KandinskyOutcome& o) {
    const RunResult& run = o.runs.best_run();
    auto train_pool = ObjectPool::build(o.task.train, run.clustering->assign_all(instance_embeddings(o.task, o.cfg, false)));
    auto test_pool = ObjectPool::build(o.task.test, run.clustering->assign_all(instance_embeddings(o.task, o.cfg, true)));
    MockTranslator mock;
    auto bundle = induce_semantics(run.rules, run.space, train_pool, mock, 20, mix_seed(o.cfg.seed, 31));
    return {generalize_program(run.rules, run.space, bundle, train_pool, o.task.train), test_pool};
}

void kandinsky(Verdict& v) {
    struct Target {
        std::string task;
        double min_accuracy;
        std::string predicate;
        bool exact;  // precision 1 and recall 1, else recall 1 with precision below 1
    };
    // Two-pair: 0.70 with the stated tolerance of 0.05.
    std::vector<Target> targets{{"kandinsky_one_red", 1.0, "color_in_red", true},
                                {"kandinsky_one_triangle", 1.0, "shape_in_triangle", true},
                                {"kandinsky_two_pair", 0.65, "same_shape_and_different_color", false}};
    for (const auto& t : targets) {
        auto o = train_kandinsky(t.task);
        double acc = o.runs.best_run().accuracy;
        v.require(acc >= t.min_accuracy, t.task + ": best-of-" + std::to_string(o.runs.runs.size()) + " accuracy " +
                                             fixed(acc) + " (need " + fixed(t.min_accuracy) + ")");
        auto [inv, test_pool] = invent(o);
        bool found = false;
        std::string detail = "no generalized rule over " + t.predicate + " alone";
        for (std::size_t i = 0; i < inv.program.rules.size(); ++i) {
            const Rule& r = inv.program.rules[i];
            bool only = std::all_of(r.body.begin(), r.body.end(),
                                    [&](const Atom& a) { return inv.preds[a.pred].name == t.predicate; });
            if (!only) continue;
            auto m = evaluate_invented_rule(inv, i, o.task.test, &test_pool);
            bool ok = m.recall == 1.0 && m.precision && (t.exact ? *m.precision == 1.0 : *m.precision < 1.0);
            detail = format_rule(r, inv.preds) + " precision " + opt_fixed(m.precision) + ", recall " + fixed(m.recall);
            if (ok) {
                found = true;
                break;
            }
        }
        v.require(found, t.task + ": " + detail);
    }
}

void properties(Verdict& v) {
    const char* suites[] = {
        "network gradient matches central finite differences on 100 instances",
        "clustering gradient matches central finite differences on 100 instances",
        "softmax and soft assignment rows sum to one",
        "uniform-weight unit equals the Boolean conjunction for k <= 4",
        "extracted rules agree with the network on every input for N <= 8",
        "tp_fixpoint equals exhaustive grounding on random programs",
        "body space size matches the closed form on 100 random spaces",
    };
    for (const char* s : suites) {
        std::string cmd = std::string("'") + GILP_UNIT_TESTS + "' --test-case='" + s + "' > /dev/null 2>&1";
        v.require(std::system(cmd.c_str()) == 0, s);
    }
}

void lambda_sanity(Verdict& v) {
    double frozen = 0.0;
    double joint = 0.0;
    const int seeds = 5;
    for (int s = 0; s < seeds; ++s) {
        frozen += train_kandinsky("kandinsky_one_red", 0.0, static_cast<std::uint64_t>(s)).runs.best_run().accuracy;
        joint += train_kandinsky("kandinsky_one_red", 4.0, static_cast<std::uint64_t>(s)).runs.best_run().accuracy;
    }
    frozen /= seeds;
    joint /= seeds;
    v.require(frozen <= joint, "one-red mean accuracy over 5 seeds: lambda 0 " + fixed(frozen, 3) + ", lambda 4 " +
                                   fixed(joint, 3));
}

}  // namespace

int main() {
    try {
        auto start = Clock::now();
        {
            Verdict v;
            check_recall_tasks(v, {"predecessor", "odd", "even", "lessthan", "member", "length", "son", "grandparent",
                                   "father", "relatedness", "undirected_edge", "adjacent_to_red", "two_children",
                                   "graph_coloring", "connectedness", "cyclic"});
            print("classical ILP recall: precision 1 and recall 1 within 300 s per task", v);
        }
        {
            Verdict v;
            check_recall_tasks(v, {"husband", "uncle"});
            print("husband and uncle: precision 1 and recall 1 within 300 s", v);
        }
        {
            Verdict v;
            fizz_buzz(v);
            print("fizz and buzz: zero and shared-auxiliary rules with partial recall", v);
        }
        {
            Verdict v;
            mnist(v);
            print("mnist sequence: odd and even index rules", v);
        }
        {
            Verdict v;
            kandinsky(v);
            print("kandinsky: accuracies and invented rules", v);
        }
        {
            Verdict v;
            properties(v);
            print("property suites", v);
        }
        {
            Verdict v;
            lambda_sanity(v);
            print("hyperparameter sanity: frozen centroids do not beat joint clustering", v);
        }
        std::cout << "total " << fixed(seconds_since(start), 1) << " s\n";
    } catch (const std::exception& e) {
        std::cerr << "acceptance run failed: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
