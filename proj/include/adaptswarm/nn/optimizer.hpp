#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "adaptswarm/nn/network.hpp"

namespace adaptswarm::nn {

enum class OptimizerKind { sgd, adam };

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::adam;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Optimizer hyperparameters plus per-parameter Adam moments. Moments are
/// shaped lazily from the first update.
struct OptimizerState {
    OptimizerConfig config;
    std::vector<Vector> m;
    std::vector<Vector> v;
    std::uint64_t step = 0;
};

/// sgd: p ← p − lr·g. adam: bias-corrected first/second moment update.
void optimizer_step(OptimizerState& state, std::span<const std::span<double>> params, const Gradients& grads);
void optimizer_step(OptimizerState& state, Network& net, const Gradients& grads);

}  // namespace adaptswarm::nn
