#pragma once

#include <span>

#include "adaptswarm/nn/matrix.hpp"

namespace adaptswarm::nn {

/// Probabilities below this are clamped before taking logarithms.
inline constexpr double kProbabilityFloor = 1e-12;

struct LossResult {
    double value = 0.0;
    Vector gradient;       // ∂loss/∂prediction
    bool clamped = false;  // cross-entropy only: prediction[index] was below the floor
};

/// Mean of squared residuals.
LossResult mse(std::span<const double> prediction, std::span<const double> target);

/// −weight·ln(prediction[index]) for a probability vector `prediction`.
LossResult cross_entropy(std::span<const double> prediction, std::size_t index, double weight);

}  // namespace adaptswarm::nn
