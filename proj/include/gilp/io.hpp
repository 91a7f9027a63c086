#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "gilp/invention.hpp"
#include "gilp/trainer.hpp"

namespace gilp {

using Json = nlohmann::json;

std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary file and renames it into place.
void write_file(const std::filesystem::path& path, const std::string& text);

/// FNV-1a 64-bit digest, printed as 16 hex digits.
std::string content_hash(const std::string& text);

// Kandinsky datasets: one instance per line, {label, objects:[{shape,color,jitter}]}.
std::string write_kandinsky_jsonl(const std::vector<KandinskyInstance>& instances);
std::vector<KandinskyInstance> read_kandinsky_jsonl(const std::string& text);

// Embedding sidecar: one record per line, {id, vector}.
struct EmbeddingRecord {
    std::string id;
    std::vector<double> vector;
};
std::string write_embeddings_jsonl(const std::vector<EmbeddingRecord>& records);
/// Throws DataError on malformed lines, duplicate ids, ragged or non-finite vectors.
std::vector<EmbeddingRecord> read_embeddings_jsonl(const std::string& text);
/// Rows ordered by `ids`; throws DataError when an id has no record.
std::vector<std::vector<double>> embeddings_for(const std::vector<EmbeddingRecord>& records,
                                                const std::vector<std::string>& ids);
/// Object ids used by the sidecar for Kandinsky splits: `<split>/<instance>/<object>`.
std::vector<std::string> object_ids(const std::vector<KandinskyInstance>& instances, const std::string& split);

// Semantics bundle: JSON array of {placeholder, evidence, prompt, name, description}.
Json semantics_to_json(const SemanticsBundle& bundle);
SemanticsBundle semantics_from_json(const Json& j);

Json metrics_to_json(const Metrics& m);

std::string history_csv(const std::vector<HistoryRow>& rows);

// Run configuration: `key = value` lines with `#` comments, mirrored as JSON.
struct RunConfig {
    std::string task;
    TaskSpec spec;
    TrainConfig train;
    std::string embeddings;  // optional embedding sidecar path
};

/// Task defaults followed by `overrides` in order. Throws ConfigError on
/// unknown keys or unparsable values.
RunConfig make_run_config(const std::string& task, const std::vector<std::pair<std::string, std::string>>& overrides);
std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& text);
std::string config_to_key_values(const RunConfig& cfg);
Json config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const Json& j);
const char* to_string(LearningMode mode);

/// Generates the configured task and attaches sidecar embeddings when the
/// config names a sidecar: constant names for relational tasks, object ids
/// for Kandinsky splits.
Task load_task(const RunConfig& cfg);

// Checkpoint: configuration, best-run parameters, clustering and rules.
// Serialized with a format version and the hash of the config snapshot.
struct Checkpoint {
    RunConfig config;
    std::uint64_t run_seed = 0;
    NetworkParams params;
    std::vector<std::vector<double>> centroids;  // empty in symbolic mode
    double alpha = 20.0;
    std::string rules;      // kept rules, text form
    std::string extracted;  // all extracted rules, text form
};
Json checkpoint_to_json(const Checkpoint& c);
Checkpoint checkpoint_from_json(const Json& j);

}  // namespace gilp
