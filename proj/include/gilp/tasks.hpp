#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "gilp/logic.hpp"

namespace gilp {

/// Names of every generated benchmark family.
const std::vector<std::string>& task_names();
bool is_kandinsky_task(const std::string& name);

enum class SequenceTarget { even_index, odd_index };

struct TaskSpec {
    std::string name;
    int size = 0;  // 0 selects the benchmark's default size
    std::uint64_t seed = 0;
    int train_instances = 30;  // Kandinsky only
    int test_instances = 30;   // Kandinsky only
    SequenceTarget parity = SequenceTarget::odd_index;  // mnist_sequence only
};

/// A relational task: training split, a held-out split whose background is
/// seeded with the training positives, and the held-out positives that
/// involve at least one constant unseen during training.
struct SymbolicTask {
    std::string name;
    std::string target;
    int variables = 2;  // default number of rule variables
    FactBase train;
    FactBase test;
    std::vector<Fact> test_positives;
    std::string gold_rules;
    std::vector<int> digit_labels;  // MNIST sequence: digit label of each training constant
    /// Externally supplied constant embeddings, one row per training constant.
    std::vector<std::vector<double>> embeddings;
};

enum class Shape { circle, square, triangle };
enum class Color { red, blue, yellow };

const char* to_string(Shape s);
const char* to_string(Color c);
Shape parse_shape(const std::string& s);
Color parse_color(const std::string& s);

struct ObjectRecord {
    Shape shape = Shape::circle;
    Color color = Color::red;
    std::array<double, 2> jitter{0.0, 0.0};
    bool operator==(const ObjectRecord&) const = default;
};

struct KandinskyInstance {
    bool label = false;
    std::vector<ObjectRecord> objects;
    bool operator==(const KandinskyInstance&) const = default;
};

struct KandinskyTask {
    std::string name;
    std::vector<KandinskyInstance> train;
    std::vector<KandinskyInstance> test;
    /// Externally supplied object embeddings in instance order (empty: toy encoder).
    std::vector<std::vector<double>> train_embeddings;
    std::vector<std::vector<double>> test_embeddings;
};

using Task = std::variant<SymbolicTask, KandinskyTask>;

/// Deterministic under `spec.seed`. Throws ConfigError for unknown names.
Task gen_task(const TaskSpec& spec);
SymbolicTask gen_symbolic_task(const TaskSpec& spec);
KandinskyTask gen_kandinsky_task(const TaskSpec& spec);

/// Digit sequence 0,5,1,5,2,5,... over image constants img1..imgN with
/// succ (label successor), start and before_1..before_10 relations.
SymbolicTask gen_mnist_sequence(int prefix_len, SequenceTarget target);

/// Reference checkers for the Kandinsky patterns, written directly against
/// object records.
bool has_red(const KandinskyInstance& inst);
bool has_triangle(const KandinskyInstance& inst);
bool is_two_pair(const KandinskyInstance& inst);
bool kandinsky_label(const std::string& task, const KandinskyInstance& inst);

struct FeatureEncoder {
    int dim = 8;
    double noise_scale = 0.0;
    double scale = 1.0;
};

/// one-hot(shape) ++ one-hot(color) ++ jitter, scaled, plus Gaussian noise
/// drawn from a stream determined by `seed`. Dimensions beyond 8 are zero
/// apart from noise.
std::vector<double> encode_object(const ObjectRecord& obj, const FeatureEncoder& enc, std::uint64_t seed);

/// Stand-in for an image encoder over digit images: one-hot(label) of width
/// max(10, dim) plus Gaussian noise.
std::vector<double> encode_digit(int label, double noise_scale, std::uint64_t seed, int dim = 10);

/// Stateless 64-bit mixer used to derive independent random streams.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace gilp
