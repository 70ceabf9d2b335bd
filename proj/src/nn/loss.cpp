#include "adaptswarm/nn/loss.hpp"

#include <cmath>

#include "adaptswarm/errors.hpp"

namespace adaptswarm::nn {

LossResult mse(std::span<const double> prediction, std::span<const double> target) {
    if (prediction.size() != target.size() || prediction.empty()) {
        throw DimensionError("mse needs equal non-empty vectors, got " + std::to_string(prediction.size()) +
                             " and " + std::to_string(target.size()));
    }
    const double n = static_cast<double>(prediction.size());
    LossResult out;
    out.gradient.resize(prediction.size());
    for (std::size_t i = 0; i < prediction.size(); ++i) {
        const double residual = prediction[i] - target[i];
        out.value += residual * residual;
        out.gradient[i] = 2.0 * residual / n;
    }
    out.value /= n;
    return out;
}

LossResult cross_entropy(std::span<const double> prediction, std::size_t index, double weight) {
    if (index >= prediction.size()) {
        throw DimensionError("cross-entropy index " + std::to_string(index) + " outside prediction of length " +
                             std::to_string(prediction.size()));
    }
    LossResult out;
    out.gradient.assign(prediction.size(), 0.0);
    double p = prediction[index];
    if (p <= kProbabilityFloor) {
        p = kProbabilityFloor;
        out.clamped = true;
    }
    out.value = -weight * std::log(p);
    out.gradient[index] = -weight / p;
    return out;
}

}  // namespace adaptswarm::nn
