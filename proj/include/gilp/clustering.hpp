#pragma once

#include <cstdint>
#include <vector>

#include "gilp/matrix.hpp"

namespace gilp {

/// K centroids over an embedding space, with a differentiable clustering
/// loss sum_e sum_i f_i(e) * G_i(e), where f_i is the squared distance to
/// centroid i and G = softmax(-alpha * f).
class Clustering {
public:
    Clustering() = default;
    Clustering(Matrix centroids, double alpha);

    int k() const { return centroids_.rows; }
    int dim() const { return centroids_.cols; }
    double alpha() const { return alpha_; }
    const Matrix& centroids() const { return centroids_; }
    Matrix& centroids() { return centroids_; }

    /// Index of the nearest centroid; ties go to the lowest index.
    int assign(const double* e) const;
    std::vector<int> assign_all(const Matrix& embeddings) const;

    /// Soft assignment G(e).
    std::vector<double> soft_assign(const double* e) const;

    double loss(const Matrix& embeddings) const;
    /// dLoss/dCentroids, same shape as the centroid matrix.
    Matrix gradient(const Matrix& embeddings) const;

    /// One gradient step on weight * loss / |E|.
    void step(const Matrix& embeddings, double lr, double weight);

private:
    Matrix centroids_;
    double alpha_ = 20.0;
};

/// k-means++ seeding followed by `lloyd_iterations` rounds of Lloyd updates.
Clustering init_clustering(const Matrix& embeddings, int k, double alpha, std::uint64_t seed,
                           int lloyd_iterations = 10);

double squared_distance(const double* a, const double* b, int dim);

}  // namespace gilp
