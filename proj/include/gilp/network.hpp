#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "gilp/logic.hpp"
#include "gilp/matrix.hpp"
#include "gilp/substitution.hpp"

namespace gilp {

struct NetworkConfig {
    int m = 2;
    std::vector<int> widths{16, 4};
    double d_bias = 0.5;
    double rule_lr = 0.05;
    double init_scale = 1.0;  // standard deviation of the raw-matrix initialisation
    double extract_threshold = 0.3;
    double weight_decay = 0.0;  // decoupled AdamW decay on the raw matrices

    /// Throws ConfigError on inconsistent settings.
    void validate() const;
};

struct AdamState {
    std::vector<Matrix> m;
    std::vector<Matrix> v;
    long step = 0;
};

/// Raw (pre-softmax) layer matrices; layer 0 has N columns and widths[0] rows.
struct NetworkParams {
    std::vector<Matrix> raw;
    AdamState adam;

    int inputs() const { return raw.empty() ? 0 : raw.front().cols; }
};

NetworkParams init_network(int inputs, const NetworkConfig& cfg, std::mt19937_64& rng);

/// Softmax of each row, shifted by the row maximum.
Matrix row_softmax(const Matrix& raw);

/// 1 - prod_u (1 - h_u) over the last layer's units.
double fuzzy_or(const std::vector<double>& h);

/// h = (1 / (1 - d)) * ReLU(M x - d) for one layer with M already normalised.
std::vector<double> layer_forward(const Matrix& m, const std::vector<double>& x, double d_bias);

double forward(const std::vector<double>& x, const NetworkParams& params, const NetworkConfig& cfg);
std::vector<double> forward_batch(const Matrix& x, const NetworkParams& params, const NetworkConfig& cfg);

double mse(const Matrix& x, const std::vector<double>& y, const NetworkParams& params, const NetworkConfig& cfg);

struct Gradients {
    std::vector<Matrix> raw;  // same shapes as NetworkParams::raw
    double mse = 0.0;
    std::vector<double> predictions;
    std::vector<std::vector<int>> active;  // per layer and unit: batch rows with a positive pre-activation
};

/// Exact gradient of the batch mean squared error with respect to the raw
/// matrices (ReLU subgradient 0 at the kink).
Gradients backward(const Matrix& x, const std::vector<double>& y, const NetworkParams& params,
                   const NetworkConfig& cfg);

struct AdamWOptions {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;
};

/// Redraws row `unit` of layer `layer` from N(0, init_scale^2) and clears its optimizer moments.
void reseed_unit(NetworkParams& params, int layer, int unit, double init_scale, std::mt19937_64& rng);

void adamw_step(NetworkParams& params, const Gradients& grads, double lr, const AdamWOptions& options = {});

/// M_P: product of the row-normalised layers, shape (widths.back(), N).
Matrix program_tensor(const NetworkParams& params);

/// One rule per row of M_P whose atoms exceed `threshold`; rows without such
/// atoms are skipped. Result is deduplicated up to variable renaming.
LogicProgram extract_rules(const NetworkParams& params, const BodyAtomSpace& space, double threshold);

}  // namespace gilp
