#include "adaptswarm/nn/optimizer.hpp"

#include <cmath>

#include "adaptswarm/errors.hpp"

namespace adaptswarm::nn {

void optimizer_step(OptimizerState& state, std::span<const std::span<double>> params, const Gradients& grads) {
    if (params.size() != grads.size()) {
        throw DimensionError("optimizer got " + std::to_string(grads.size()) + " gradient blocks for " +
                             std::to_string(params.size()) + " parameter blocks");
    }
    for (std::size_t b = 0; b < params.size(); ++b) {
        if (params[b].size() != grads[b].size()) {
            throw DimensionError("gradient block " + std::to_string(b) + " has length " +
                                 std::to_string(grads[b].size()) + ", parameters " + std::to_string(params[b].size()));
        }
    }

    const OptimizerConfig& c = state.config;
    ++state.step;
    if (c.kind == OptimizerKind::sgd) {
        for (std::size_t b = 0; b < params.size(); ++b) {
            for (std::size_t i = 0; i < params[b].size(); ++i) params[b][i] -= c.learning_rate * grads[b][i];
        }
        return;
    }

    if (state.m.empty()) {
        for (const auto& block : params) {
            state.m.emplace_back(block.size(), 0.0);
            state.v.emplace_back(block.size(), 0.0);
        }
    }
    if (state.m.size() != params.size()) throw DimensionError("optimizer moments do not mirror parameters");

    const double t = static_cast<double>(state.step);
    const double correction1 = 1.0 - std::pow(c.beta1, t);
    const double correction2 = 1.0 - std::pow(c.beta2, t);
    for (std::size_t b = 0; b < params.size(); ++b) {
        Vector& m = state.m[b];
        Vector& v = state.v[b];
        if (m.size() != params[b].size()) throw DimensionError("optimizer moments do not mirror parameters");
        for (std::size_t i = 0; i < m.size(); ++i) {
            const double g = grads[b][i];
            m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g;
            v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g * g;
            const double m_hat = m[i] / correction1;
            const double v_hat = v[i] / correction2;
            params[b][i] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
        }
    }
}

void optimizer_step(OptimizerState& state, Network& net, const Gradients& grads) {
    auto blocks = net.parameters();
    optimizer_step(state, blocks, grads);
}

}  // namespace adaptswarm::nn
