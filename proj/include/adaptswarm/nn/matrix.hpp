#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "adaptswarm/rng.hpp"

namespace adaptswarm::nn {

using Vector = std::vector<double>;

/// Dense row-major 2-D array of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    static Matrix identity(std::size_t n);
    /// Single-row matrix holding `values`.
    static Matrix row_vector(std::span<const double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }

    std::string shape_string() const;

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// y = M·x
Vector matvec(const Matrix& m, std::span<const double> x);
/// y += Mᵀ·g
void matvec_transposed_accumulate(const Matrix& m, std::span<const double> g, std::span<double> y);
/// G += a·bᵀ, G given as its flat row-major storage of shape (len(a), len(b)).
void outer_accumulate(std::span<double> g, std::span<const double> a, std::span<const double> b);

/// Fills `values` with U(-limit, limit) draws.
void fill_uniform(std::span<double> values, double limit, Rng& rng);

bool all_finite(std::span<const double> values);

}  // namespace adaptswarm::nn
