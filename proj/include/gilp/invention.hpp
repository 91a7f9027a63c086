#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gilp/logic.hpp"
#include "gilp/substitution.hpp"
#include "gilp/tasks.hpp"

namespace gilp {

/// Objects of one instance split flattened in instance order, with their
/// hard cluster assignment.
struct ObjectPool {
    std::vector<ObjectRecord> objects;
    std::vector<int> instance;  // owning instance of each object
    std::vector<int> cluster;   // hard assignment of each object

    static ObjectPool build(const std::vector<KandinskyInstance>& instances, const std::vector<int>& assignment);
};

/// Clusters bound to a placeholder predicate, one per argument position.
std::vector<int> placeholder_clusters(const BodyAtomSpace& space, int pred);

/// Every object id assigned to `cluster`. Throws EvaluationError when the
/// cluster is empty.
std::vector<int> retrieve_constants(const ObjectPool& pool, int cluster);

/// At most `cap` ids drawn without replacement, returned in ascending order.
std::vector<int> sample_evidence(const std::vector<int>& ids, int cap, std::uint64_t seed);

std::string describe_object(const ObjectRecord& o);

/// Relation question for two ordered evidence sets, common-property question
/// for one.
std::string build_prompt(const std::string& placeholder, const std::vector<std::vector<ObjectRecord>>& evidence);

struct Semantics {
    std::string placeholder;
    std::vector<std::vector<int>> evidence;  // object ids per argument position
    std::string prompt;
    std::string name;
    std::string description;
    bool translated = false;
};

struct SemanticsBundle {
    std::vector<Semantics> entries;
    const Semantics* find(const std::string& placeholder) const;
};

struct TranslationRequest {
    std::string placeholder;
    std::string prompt;
    std::vector<std::vector<ObjectRecord>> evidence;
};

struct TranslationReply {
    std::string name;
    std::string description;
};

/// Text-in/text-out translator. Implementations throw on timeout or refusal.
class Translator {
public:
    virtual ~Translator() = default;
    virtual TranslationReply translate(const TranslationRequest& request) = 0;
};

/// Deterministic feature analysis of the evidence. Unary: a shared colour
/// names the predicate `color_in_C`, otherwise a shared shape names it
/// `shape_in_S`; binary: every cross pair sharing shape and differing in
/// colour gives `same_shape_and_different_color`. Anything else is
/// `unknown_relation_k` with k counting such replies.
class MockTranslator : public Translator {
public:
    TranslationReply translate(const TranslationRequest& request) override;

private:
    int unknown_ = 0;
};

/// POSTs {model, prompt, evidence} as JSON to `url` and reads the reply text
/// from the `text` field (or the raw body). The predicate name is the last
/// snake_case identifier on its own line.
class HttpTranslator : public Translator {
public:
    HttpTranslator(std::string url, std::string model, std::string token, double timeout_seconds = 30.0);
    TranslationReply translate(const TranslationRequest& request) override;

private:
    std::string url_;
    std::string model_;
    std::string token_;
    double timeout_;
};

/// Last line of `text` that is a snake_case identifier, if any.
std::optional<std::string> parse_reply_name(const std::string& text);

bool is_snake_case(const std::string& s);

/// Builds evidence and prompts for every placeholder used by `program`, then
/// asks `translator`. Failed requests leave the entry untranslated under the
/// placeholder's own name.
SemanticsBundle induce_semantics(const LogicProgram& program, const BodyAtomSpace& space, const ObjectPool& pool,
                                 Translator& translator, int evidence_cap = 20, std::uint64_t seed = 0);

/// Named predicates with object-level meaning: color_in_C/1, shape_in_S/1,
/// same_shape_and_different_color/2.
bool is_feature_predicate(const std::string& name);
bool holds_feature(const std::string& name, const std::vector<const ObjectRecord*>& args);

/// A feature predicate applied to some argument positions of a placeholder.
struct Reading {
    std::string name;
    std::vector<int> args;
    bool operator==(const Reading&) const = default;
};

/// Readings that hold for every evidence object: the relation over both
/// positions of a binary placeholder, then shape/colour consensus per position.
std::vector<Reading> candidate_readings(const Semantics& s, const ObjectPool& pool);

/// Generalized program. Placeholders are visited from most to least used; a
/// translated placeholder takes the candidate reading that gives the best
/// training F1 for the whole program so far (its own translated name wins
/// ties); readings that would lower training recall are skipped. Placeholders without a feature reading are renamed to their
/// translated name, and placeholders sharing a name merge into one predicate
/// that holds when the objects' clusters match any of the merged tuples.
struct InventedProgram {
    Signature preds;
    LogicProgram program;
    /// Cluster-backed predicates: id -> alternative cluster tuples.
    std::map<int, std::vector<std::vector<int>>> clusters;
    /// Placeholder name -> chosen predicate name.
    std::map<std::string, std::string> renamed;
};

InventedProgram generalize_program(const LogicProgram& program, const BodyAtomSpace& space,
                                   const SemanticsBundle& semantics, const ObjectPool& train_pool,
                                   const std::vector<KandinskyInstance>& train);

/// Instance-level precision and recall: a rule holds on an instance when some
/// assignment of its variables to the instance's objects satisfies every body
/// atom. Cluster-backed predicates need `pool` (the objects of `instances` with
/// their clusters). Throws EvaluationError for names without semantics.
Metrics evaluate_invented(const InventedProgram& p, const std::vector<KandinskyInstance>& instances,
                          const ObjectPool* pool = nullptr);

/// The same evaluation for a single rule of `p`.
Metrics evaluate_invented_rule(const InventedProgram& p, std::size_t rule, const std::vector<KandinskyInstance>& instances,
                               const ObjectPool* pool = nullptr);

/// Instance-level metrics of the constrained program under cluster presence.
Metrics evaluate_constrained(const LogicProgram& program, const BodyAtomSpace& space,
                             const std::vector<KandinskyInstance>& instances, const ObjectPool& pool);

}  // namespace gilp
