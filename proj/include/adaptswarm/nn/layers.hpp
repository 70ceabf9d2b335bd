#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "adaptswarm/nn/matrix.hpp"

namespace adaptswarm::nn {

enum class Activation { relu, linear, tanh, sigmoid, softmax };

std::string_view to_string(Activation a);
std::optional<Activation> parse_activation(std::string_view name);

/// Applies `kind` elementwise (softmax: across the whole vector, max-shifted).
Vector activate(Activation kind, std::span<const double> x);

/// Vector-Jacobian product of the activation. `pre` is the activation input,
/// `out` its output and `grad_out` ∂L/∂out. Returns ∂L/∂pre.
Vector activate_backward(Activation kind, std::span<const double> pre, std::span<const double> out,
                         std::span<const double> grad_out);

double sigmoid(double x);

struct DenseParams {
    Matrix weights;  // out × in
    Vector bias;     // out

    std::size_t inputs() const { return weights.cols(); }
    std::size_t outputs() const { return weights.rows(); }
    bool operator==(const DenseParams&) const = default;
};

/// y = W·x + b. The activation is applied by the caller.
Vector dense_forward(const DenseParams& p, std::span<const double> x);

/// Accumulates ∂L/∂W and ∂L/∂b for one input and returns ∂L/∂x.
Vector dense_backward(const DenseParams& p, std::span<const double> x, std::span<const double> grad_pre,
                      std::span<double> grad_weights, std::span<double> grad_bias);

/// Gated recurrent unit. Input-facing matrices are H × in, hidden-facing H × H.
struct GruParams {
    Matrix w_z, u_z;
    Vector b_z;
    Matrix w_r, u_r;
    Vector b_r;
    Matrix w_h, u_h;
    Vector b_h;

    static GruParams zeros(std::size_t inputs, std::size_t hidden);

    std::size_t inputs() const { return w_z.cols(); }
    std::size_t hidden() const { return w_z.rows(); }
    /// Throws DimensionError when the nine blocks disagree on shapes.
    void validate() const;
    bool operator==(const GruParams&) const = default;
};

/// Intermediate values of one GRU step, kept for backpropagation.
struct GruStepCache {
    Vector x, h_prev, z, r, candidate, reset_hidden, h;
};

/// z = σ(W_z x + U_z h + b_z), r = σ(W_r x + U_r h + b_r),
/// h̃ = tanh(W_h x + U_h (r ⊙ h) + b_h), h_t = (1 − z) ⊙ h + z ⊙ h̃.
Vector gru_step(const GruParams& p, std::span<const double> x, std::span<const double> h_prev,
                GruStepCache* cache = nullptr);

/// Runs gru_step over the rows of `sequence` starting from h0; returns the final state.
Vector gru_sequence_forward(const GruParams& p, const Matrix& sequence, std::span<const double> h0,
                            std::vector<GruStepCache>* caches = nullptr);

/// Gradient blocks for a GRU in the same order as GruParams' members.
struct GruGrads {
    Vector w_z, u_z, b_z, w_r, u_r, b_r, w_h, u_h, b_h;
    static GruGrads zeros_like(const GruParams& p);
};

/// Backpropagates ∂L/∂h_t through one step. Accumulates into `grads`,
/// writes ∂L/∂x (optional) and returns ∂L/∂h_prev.
Vector gru_step_backward(const GruParams& p, const GruStepCache& cache, std::span<const double> grad_h,
                         GruGrads& grads, std::span<double> grad_x);

}  // namespace adaptswarm::nn
