#include "gilp/network.hpp"

#include <algorithm>
#include <cmath>

namespace gilp {

void NetworkConfig::validate() const {
    if (m < 1) throw ConfigError("layer count must be at least 1");
    if (static_cast<int>(widths.size()) != m) throw ConfigError("need one width per layer");
    for (int w : widths)
        if (w < 1) throw ConfigError("layer widths must be positive");
    if (!(d_bias > 0.0 && d_bias < 1.0)) throw ConfigError("d_bias must lie in (0, 1)");
    if (!(extract_threshold > 0.0 && extract_threshold < 1.0)) throw ConfigError("threshold must lie in (0, 1)");
    if (!(rule_lr > 0.0)) throw ConfigError("rule learning rate must be positive");
    if (weight_decay < 0.0) throw ConfigError("weight decay must be non-negative");
}

NetworkParams init_network(int inputs, const NetworkConfig& cfg, std::mt19937_64& rng) {
    cfg.validate();
    if (inputs < 1) throw ConfigError("network needs at least one input");
    std::normal_distribution<double> normal(0.0, cfg.init_scale);
    NetworkParams p;
    int cols = inputs;
    for (int w : cfg.widths) {
        Matrix m(w, cols);
        for (auto& v : m.data) v = normal(rng);
        p.adam.m.emplace_back(w, cols);
        p.adam.v.emplace_back(w, cols);
        p.raw.push_back(std::move(m));
        cols = w;
    }
    return p;
}

Matrix row_softmax(const Matrix& raw) {
    Matrix out(raw.rows, raw.cols);
    for (int r = 0; r < raw.rows; ++r) {
        const double* in = raw.row(r);
        double* o = out.row(r);
        double hi = *std::max_element(in, in + raw.cols);
        double z = 0.0;
        for (int c = 0; c < raw.cols; ++c) z += o[c] = std::exp(in[c] - hi);
        for (int c = 0; c < raw.cols; ++c) o[c] /= z;
    }
    return out;
}

double fuzzy_or(const std::vector<double>& h) {
    double prod = 1.0;
    for (double v : h) prod *= 1.0 - v;
    return 1.0 - prod;
}

std::vector<double> layer_forward(const Matrix& m, const std::vector<double>& x, double d_bias) {
    std::vector<double> h(static_cast<std::size_t>(m.rows));
    double scale = 1.0 / (1.0 - d_bias);
    for (int r = 0; r < m.rows; ++r) {
        const double* w = m.row(r);
        double z = -d_bias;
        for (int c = 0; c < m.cols; ++c) z += w[c] * x[static_cast<std::size_t>(c)];
        h[static_cast<std::size_t>(r)] = z > 0.0 ? scale * z : 0.0;
    }
    return h;
}

namespace {

std::vector<Matrix> normalised(const NetworkParams& params) {
    std::vector<Matrix> out;
    out.reserve(params.raw.size());
    for (const auto& r : params.raw) out.push_back(row_softmax(r));
    return out;
}

double forward_with(const std::vector<double>& x, const std::vector<Matrix>& layers, double d_bias) {
    std::vector<double> a = x;
    for (const auto& m : layers) a = layer_forward(m, a, d_bias);
    return fuzzy_or(a);
}

}  // namespace

double forward(const std::vector<double>& x, const NetworkParams& params, const NetworkConfig& cfg) {
    return forward_with(x, normalised(params), cfg.d_bias);
}

std::vector<double> forward_batch(const Matrix& x, const NetworkParams& params, const NetworkConfig& cfg) {
    auto layers = normalised(params);
    std::vector<double> out(static_cast<std::size_t>(x.rows));
    for (int r = 0; r < x.rows; ++r) out[static_cast<std::size_t>(r)] = forward_with(x.row_vector(r), layers, cfg.d_bias);
    return out;
}

double mse(const Matrix& x, const std::vector<double>& y, const NetworkParams& params, const NetworkConfig& cfg) {
    auto pred = forward_batch(x, params, cfg);
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - y[i]) * (pred[i] - y[i]);
    return pred.empty() ? 0.0 : s / static_cast<double>(pred.size());
}

Gradients backward(const Matrix& x, const std::vector<double>& y, const NetworkParams& params,
                   const NetworkConfig& cfg) {
    auto layers = normalised(params);
    std::size_t depth = layers.size();
    std::vector<Matrix> d_norm;
    for (const auto& m : layers) d_norm.emplace_back(m.rows, m.cols);
    double scale = 1.0 / (1.0 - cfg.d_bias);
    Gradients g;
    for (const auto& m : layers) g.active.emplace_back(static_cast<std::size_t>(m.rows), 0);
    if (x.rows == 0) {
        for (const auto& m : layers) g.raw.emplace_back(m.rows, m.cols);
        return g;
    }
    double inv_batch = 1.0 / x.rows;

    std::vector<std::vector<double>> acts(depth + 1);
    std::vector<std::vector<double>> pre(depth);
    for (int r = 0; r < x.rows; ++r) {
        acts[0] = x.row_vector(r);
        for (std::size_t l = 0; l < depth; ++l) {
            const Matrix& m = layers[l];
            pre[l].assign(static_cast<std::size_t>(m.rows), 0.0);
            acts[l + 1].assign(static_cast<std::size_t>(m.rows), 0.0);
            for (int i = 0; i < m.rows; ++i) {
                double z = -cfg.d_bias;
                const double* w = m.row(i);
                for (int c = 0; c < m.cols; ++c) z += w[c] * acts[l][static_cast<std::size_t>(c)];
                pre[l][static_cast<std::size_t>(i)] = z;
                if (z > 0.0) ++g.active[l][static_cast<std::size_t>(i)];
                acts[l + 1][static_cast<std::size_t>(i)] = z > 0.0 ? scale * z : 0.0;
            }
        }
        const auto& h = acts[depth];
        // Prefix/suffix products of (1 - h) give d yhat / d h_u without division.
        std::size_t units = h.size();
        std::vector<double> prefix(units + 1, 1.0), suffix(units + 1, 1.0);
        for (std::size_t u = 0; u < units; ++u) prefix[u + 1] = prefix[u] * (1.0 - h[u]);
        for (std::size_t u = units; u-- > 0;) suffix[u] = suffix[u + 1] * (1.0 - h[u]);
        double yhat = 1.0 - prefix[units];
        g.predictions.push_back(yhat);
        double err = yhat - y[static_cast<std::size_t>(r)];
        g.mse += err * err * inv_batch;
        double d_yhat = 2.0 * err * inv_batch;
        if (d_yhat == 0.0) continue;

        std::vector<double> d_act(units);
        for (std::size_t u = 0; u < units; ++u) d_act[u] = d_yhat * prefix[u] * suffix[u + 1];
        for (std::size_t l = depth; l-- > 0;) {
            const Matrix& m = layers[l];
            Matrix& dm = d_norm[l];
            std::vector<double> d_in(static_cast<std::size_t>(m.cols), 0.0);
            for (int i = 0; i < m.rows; ++i) {
                if (pre[l][static_cast<std::size_t>(i)] <= 0.0) continue;
                double dz = d_act[static_cast<std::size_t>(i)] * scale;
                if (dz == 0.0) continue;
                const double* w = m.row(i);
                double* dw = dm.row(i);
                for (int c = 0; c < m.cols; ++c) {
                    dw[c] += dz * acts[l][static_cast<std::size_t>(c)];
                    d_in[static_cast<std::size_t>(c)] += dz * w[c];
                }
            }
            d_act = std::move(d_in);
        }
    }
    // Back through the row softmax: dR_rj = M_rj (dM_rj - sum_k M_rk dM_rk).
    for (std::size_t l = 0; l < depth; ++l) {
        const Matrix& m = layers[l];
        const Matrix& dm = d_norm[l];
        Matrix dr(m.rows, m.cols);
        for (int i = 0; i < m.rows; ++i) {
            double dot = 0.0;
            for (int c = 0; c < m.cols; ++c) dot += m(i, c) * dm(i, c);
            for (int c = 0; c < m.cols; ++c) dr(i, c) = m(i, c) * (dm(i, c) - dot);
        }
        g.raw.push_back(std::move(dr));
    }
    return g;
}

void reseed_unit(NetworkParams& params, int layer, int unit, double init_scale, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, init_scale);
    auto l = static_cast<std::size_t>(layer);
    Matrix& raw = params.raw.at(l);
    for (int c = 0; c < raw.cols; ++c) {
        raw(unit, c) = normal(rng);
        params.adam.m[l](unit, c) = 0.0;
        params.adam.v[l](unit, c) = 0.0;
    }
}

void adamw_step(NetworkParams& params, const Gradients& grads, double lr, const AdamWOptions& o) {
    ++params.adam.step;
    double t = static_cast<double>(params.adam.step);
    double c1 = 1.0 - std::pow(o.beta1, t);
    double c2 = 1.0 - std::pow(o.beta2, t);
    for (std::size_t l = 0; l < params.raw.size(); ++l) {
        auto& w = params.raw[l].data;
        auto& m = params.adam.m[l].data;
        auto& v = params.adam.v[l].data;
        const auto& g = grads.raw[l].data;
        for (std::size_t i = 0; i < w.size(); ++i) {
            m[i] = o.beta1 * m[i] + (1.0 - o.beta1) * g[i];
            v[i] = o.beta2 * v[i] + (1.0 - o.beta2) * g[i] * g[i];
            double mhat = m[i] / c1;
            double vhat = v[i] / c2;
            w[i] -= lr * (mhat / (std::sqrt(vhat) + o.eps) + o.weight_decay * w[i]);
        }
    }
}

Matrix program_tensor(const NetworkParams& params) {
    auto layers = normalised(params);
    Matrix p = layers.front();
    for (std::size_t l = 1; l < layers.size(); ++l) p = matmul(layers[l], p);
    return p;
}

LogicProgram extract_rules(const NetworkParams& params, const BodyAtomSpace& space, double threshold) {
    if (params.inputs() != space.size()) throw ConfigError("network input width does not match the body-atom space");
    Matrix p = program_tensor(params);
    LogicProgram program;
    Atom head = space.head();
    for (int r = 0; r < p.rows; ++r) {
        Rule rule{head, {}};
        for (int c = 0; c < p.cols; ++c)
            if (p(r, c) > threshold) rule.body.push_back(space.atoms[static_cast<std::size_t>(c)]);
        if (!rule.body.empty()) program.rules.push_back(std::move(rule));
    }
    return dedup_rules(program);
}

}  // namespace gilp
