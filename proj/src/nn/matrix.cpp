#include "adaptswarm/nn/matrix.hpp"

#include <cmath>

#include "adaptswarm/errors.hpp"

namespace adaptswarm::nn {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) {
        throw DimensionError("matrix data length " + std::to_string(data_.size()) +
                             " does not match shape " + shape_string());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::row_vector(std::span<const double> values) {
    return Matrix(1, values.size(), std::vector<double>(values.begin(), values.end()));
}

std::string Matrix::shape_string() const {
    return "(" + std::to_string(rows_) + "x" + std::to_string(cols_) + ")";
}

Vector matvec(const Matrix& m, std::span<const double> x) {
    if (x.size() != m.cols()) {
        throw DimensionError("cannot multiply matrix " + m.shape_string() + " by vector of length " +
                             std::to_string(x.size()));
    }
    Vector y(m.rows(), 0.0);
    const double* w = m.values().data();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        double acc = 0.0;
        const double* wr = w + r * m.cols();
        for (std::size_t c = 0; c < m.cols(); ++c) acc += wr[c] * x[c];
        y[r] = acc;
    }
    return y;
}

void matvec_transposed_accumulate(const Matrix& m, std::span<const double> g, std::span<double> y) {
    if (g.size() != m.rows() || y.size() != m.cols()) {
        throw DimensionError("transposed product shape mismatch: matrix " + m.shape_string() +
                             ", gradient " + std::to_string(g.size()) + ", output " +
                             std::to_string(y.size()));
    }
    const double* w = m.values().data();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const double gr = g[r];
        if (gr == 0.0) continue;
        const double* wr = w + r * m.cols();
        for (std::size_t c = 0; c < m.cols(); ++c) y[c] += wr[c] * gr;
    }
}

void outer_accumulate(std::span<double> g, std::span<const double> a, std::span<const double> b) {
    if (g.size() != a.size() * b.size()) {
        throw DimensionError("outer product target has " + std::to_string(g.size()) +
                             " entries, expected " + std::to_string(a.size()) + "x" +
                             std::to_string(b.size()));
    }
    for (std::size_t r = 0; r < a.size(); ++r) {
        const double ar = a[r];
        if (ar == 0.0) continue;
        double* gr = g.data() + r * b.size();
        for (std::size_t c = 0; c < b.size(); ++c) gr[c] += ar * b[c];
    }
}

void fill_uniform(std::span<double> values, double limit, Rng& rng) {
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& v : values) v = dist(rng);
}

bool all_finite(std::span<const double> values) {
    for (double v : values) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

}  // namespace adaptswarm::nn
