#include "gilp/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "gilp/error.hpp"

namespace gilp {

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) throw LogicError("matmul shape mismatch");
    Matrix c(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) {
        double* out = c.row(i);
        for (int k = 0; k < a.cols; ++k) {
            double v = a(i, k);
            if (v == 0.0) continue;
            const double* br = b.row(k);
            for (int j = 0; j < b.cols; ++j) out[j] += v * br[j];
        }
    }
    return c;
}

double squared_distance(const double* a, const double* b, int dim) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

Clustering::Clustering(Matrix centroids, double alpha) : centroids_(std::move(centroids)), alpha_(alpha) {
    if (centroids_.rows < 1) throw ConfigError("clustering needs at least one centroid");
}

int Clustering::assign(const double* e) const {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k(); ++i) {
        double d = squared_distance(e, centroids_.row(i), dim());
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

std::vector<int> Clustering::assign_all(const Matrix& embeddings) const {
    std::vector<int> out(static_cast<std::size_t>(embeddings.rows));
    for (int r = 0; r < embeddings.rows; ++r) out[static_cast<std::size_t>(r)] = assign(embeddings.row(r));
    return out;
}

std::vector<double> Clustering::soft_assign(const double* e) const {
    std::vector<double> g(static_cast<std::size_t>(k()));
    double lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k(); ++i) {
        g[static_cast<std::size_t>(i)] = squared_distance(e, centroids_.row(i), dim());
        lo = std::min(lo, g[static_cast<std::size_t>(i)]);
    }
    double z = 0.0;
    for (auto& v : g) z += v = std::exp(-alpha_ * (v - lo));
    for (auto& v : g) v /= z;
    return g;
}

double Clustering::loss(const Matrix& embeddings) const {
    double total = 0.0;
    for (int r = 0; r < embeddings.rows; ++r) {
        auto g = soft_assign(embeddings.row(r));
        for (int i = 0; i < k(); ++i)
            total += g[static_cast<std::size_t>(i)] * squared_distance(embeddings.row(r), centroids_.row(i), dim());
    }
    return total;
}

// With L_e = sum_i f_i G_i and G = softmax(-alpha f):
// dL_e/dc_k = G_k * (1 - alpha * (f_k - L_e)) * 2 * (c_k - e).
Matrix Clustering::gradient(const Matrix& embeddings) const {
    Matrix grad(k(), dim());
    std::vector<double> f(static_cast<std::size_t>(k()));
    for (int r = 0; r < embeddings.rows; ++r) {
        const double* e = embeddings.row(r);
        auto g = soft_assign(e);
        double le = 0.0;
        for (int i = 0; i < k(); ++i) {
            f[static_cast<std::size_t>(i)] = squared_distance(e, centroids_.row(i), dim());
            le += g[static_cast<std::size_t>(i)] * f[static_cast<std::size_t>(i)];
        }
        for (int i = 0; i < k(); ++i) {
            double coef = g[static_cast<std::size_t>(i)] * (1.0 - alpha_ * (f[static_cast<std::size_t>(i)] - le)) * 2.0;
            if (coef == 0.0) continue;
            const double* c = centroids_.row(i);
            double* out = grad.row(i);
            for (int j = 0; j < dim(); ++j) out[j] += coef * (c[j] - e[j]);
        }
    }
    return grad;
}

void Clustering::step(const Matrix& embeddings, double lr, double weight) {
    if (embeddings.rows == 0) return;
    Matrix g = gradient(embeddings);
    double scale = lr * weight / embeddings.rows;
    for (std::size_t i = 0; i < g.data.size(); ++i) centroids_.data[i] -= scale * g.data[i];
}

Clustering init_clustering(const Matrix& embeddings, int k, double alpha, std::uint64_t seed, int lloyd_iterations) {
    if (k < 1) throw ConfigError("cluster count must be positive");
    if (embeddings.rows == 0) throw DataError("no embeddings to cluster");
    if (k > embeddings.rows) throw ConfigError("more clusters than embeddings");
    for (double v : embeddings.data)
        if (!std::isfinite(v)) throw DataError("embedding contains a non-finite value");
    std::mt19937_64 rng(seed);
    int n = embeddings.rows;
    int dim = embeddings.cols;
    Matrix c(k, dim);
    std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    int first = std::uniform_int_distribution<int>(0, n - 1)(rng);
    std::copy(embeddings.row(first), embeddings.row(first) + dim, c.row(0));
    for (int i = 1; i < k; ++i) {
        double total = 0.0;
        for (int r = 0; r < n; ++r) {
            auto& d = d2[static_cast<std::size_t>(r)];
            d = std::min(d, squared_distance(embeddings.row(r), c.row(i - 1), dim));
            total += d;
        }
        int pick = 0;
        if (total > 0.0) {
            double u = std::uniform_real_distribution<double>(0.0, total)(rng);
            for (pick = 0; pick < n - 1; ++pick) {
                u -= d2[static_cast<std::size_t>(pick)];
                if (u <= 0.0) break;
            }
        } else {
            pick = std::uniform_int_distribution<int>(0, n - 1)(rng);
        }
        std::copy(embeddings.row(pick), embeddings.row(pick) + dim, c.row(i));
    }
    Clustering cl(c, alpha);
    for (int it = 0; it < lloyd_iterations; ++it) {
        auto a = cl.assign_all(embeddings);
        Matrix sum(k, dim);
        std::vector<int> count(static_cast<std::size_t>(k), 0);
        for (int r = 0; r < n; ++r) {
            int ci = a[static_cast<std::size_t>(r)];
            ++count[static_cast<std::size_t>(ci)];
            for (int j = 0; j < dim; ++j) sum(ci, j) += embeddings(r, j);
        }
        for (int i = 0; i < k; ++i)
            if (count[static_cast<std::size_t>(i)] > 0)
                for (int j = 0; j < dim; ++j) cl.centroids()(i, j) = sum(i, j) / count[static_cast<std::size_t>(i)];
    }
    return cl;
}

}  // namespace gilp
