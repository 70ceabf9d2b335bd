#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "adaptswarm/nn/layers.hpp"

namespace adaptswarm::nn {

/// Flattens the observation window into one vector for a following dense
/// layer; passes the sequence through untouched when a GRU follows.
struct FlattenLayer {
    bool operator==(const FlattenLayer&) const = default;
};

struct DenseLayer {
    DenseParams params;
    Activation activation = Activation::linear;
    bool operator==(const DenseLayer&) const = default;
};

/// Consumes the whole input sequence and emits only the final hidden state.
struct GruLayer {
    GruParams params;
    bool operator==(const GruLayer&) const = default;
};

using Layer = std::variant<FlattenLayer, DenseLayer, GruLayer>;

/// Parameter-free description of one layer, used to build initialized networks.
struct LayerSpec {
    enum class Kind { flatten, dense, gru } kind = Kind::dense;
    std::size_t units = 0;
    Activation activation = Activation::linear;

    static LayerSpec flatten() { return {Kind::flatten, 0, Activation::linear}; }
    static LayerSpec dense(std::size_t units, Activation a) { return {Kind::dense, units, a}; }
    static LayerSpec gru(std::size_t hidden) { return {Kind::gru, hidden, Activation::tanh}; }
};

/// One gradient block per parameter block, in Network::parameters() order.
using Gradients = std::vector<Vector>;

void add_scaled(Gradients& into, const Gradients& g, double scale = 1.0);

class Network;

/// Per-layer intermediates recorded by a forward pass.
struct Tape {
    struct LayerRecord {
        Matrix input;       // sequence for GRU, single row otherwise
        Vector pre;         // dense pre-activation
        Vector output;
        std::vector<GruStepCache> steps;
    };

    const Network* owner = nullptr;
    std::uint64_t generation = 0;
    std::vector<LayerRecord> layers;
};

/// A feed-forward stack of flatten / dense / GRU layers over an input of
/// `input_steps` rows by `input_width` columns. GRU networks accept any
/// positive number of rows.
class Network {
public:
    Network() = default;
    Network(std::size_t input_width, std::vector<Layer> layers, std::size_t input_steps = 1);

    std::size_t input_width() const noexcept { return input_width_; }
    std::size_t input_steps() const noexcept { return input_steps_; }
    std::size_t output_width() const noexcept { return output_width_; }
    bool recurrent() const noexcept { return recurrent_; }
    const std::vector<Layer>& layers() const noexcept { return layers_; }

    Vector forward(const Matrix& input, Tape* tape = nullptr) const;
    Vector forward(std::span<const double> single_step) const;

    /// Reverse-mode gradients of the tape's forward pass given ∂L/∂output.
    /// Writes ∂L/∂input when `input_grad` is non-null.
    Gradients backprop(const Tape& tape, std::span<const double> output_grad,
                       Matrix* input_grad = nullptr) const;

    /// Mutable views of every parameter block. Invalidates outstanding tapes.
    std::vector<std::span<double>> parameters();
    std::vector<std::span<const double>> parameters() const;
    Gradients zero_gradients() const;
    std::size_t parameter_count() const;

    std::uint64_t generation() const noexcept { return generation_; }

    bool same_parameters(const Network& other) const { return layers_ == other.layers_; }

private:
    void validate();
    template <class Self, class Out>
    static void collect_blocks(Self& self, Out& out);

    std::size_t input_width_ = 0;
    std::size_t input_steps_ = 1;
    std::size_t output_width_ = 0;
    bool recurrent_ = false;
    std::vector<Layer> layers_;
    std::uint64_t generation_ = 0;
};

/// Builds a network with freshly initialized weights: dense weights
/// U(±√(6/(fan_in+fan_out))), GRU matrices U(±1/√H), all biases zero.
Network make_network(std::size_t input_width, const std::vector<LayerSpec>& specs, Rng& rng,
                     std::size_t input_steps = 1);

/// t ← (1 − τ)·t + τ·o for every parameter.
void soft_update(Network& target, const Network& online, double tau);

}  // namespace adaptswarm::nn
