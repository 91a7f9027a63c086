#pragma once

#include <cstddef>
#include <vector>

namespace gilp {

/// Dense row-major matrix of doubles.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {}

    double& operator()(int r, int c) { return data[index(r, c)]; }
    double operator()(int r, int c) const { return data[index(r, c)]; }
    double* row(int r) { return data.data() + index(r, 0); }
    const double* row(int r) const { return data.data() + index(r, 0); }

    std::vector<double> row_vector(int r) const { return {row(r), row(r) + cols}; }

    static Matrix from_rows(const std::vector<std::vector<double>>& rows_in) {
        Matrix m(static_cast<int>(rows_in.size()), rows_in.empty() ? 0 : static_cast<int>(rows_in[0].size()));
        for (int r = 0; r < m.rows; ++r)
            for (int c = 0; c < m.cols; ++c) m(r, c) = rows_in[static_cast<std::size_t>(r)].at(static_cast<std::size_t>(c));
        return m;
    }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t index(int r, int c) const {
        return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c);
    }
};

/// C = A * B
Matrix matmul(const Matrix& a, const Matrix& b);

}  // namespace gilp
