#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "adaptswarm/nn/network.hpp"

namespace adaptswarm::agents {

enum class DuelingMode { uncentered, mean_centered };

std::string_view to_string(DuelingMode m);
std::optional<DuelingMode> parse_dueling_mode(std::string_view name);

/// uncentered: Q = v + adv. mean_centered: Q = v + adv − mean(adv).
nn::Vector dueling_aggregate(double value, std::span<const double> advantage, DuelingMode mode);

struct QTape {
    nn::Tape trunk;
    nn::Tape value;
    nn::Tape advantage;
};

/// An action-value function: either one network whose output is Q, or a
/// shared trunk feeding a scalar value head and an advantage head.
class QNetwork {
public:
    QNetwork() = default;
    explicit QNetwork(nn::Network net);
    QNetwork(nn::Network trunk, nn::Network value, nn::Network advantage, DuelingMode mode);

    bool dueling() const noexcept { return value_.has_value(); }
    DuelingMode mode() const noexcept { return mode_; }
    std::size_t input_width() const noexcept { return trunk_.input_width(); }
    std::size_t action_count() const noexcept;

    nn::Vector forward(const nn::Matrix& input, QTape* tape = nullptr) const;
    nn::Vector forward(std::span<const double> observation) const;

    /// Gradients of every parameter block given ∂L/∂Q, in parameters() order.
    nn::Gradients backprop(const QTape& tape, std::span<const double> q_grad,
                           nn::Matrix* input_grad = nullptr) const;

    std::vector<std::span<double>> parameters();
    std::vector<std::span<const double>> parameters() const;
    nn::Gradients zero_gradients() const;

    /// Trunk, then value and advantage heads when dueling.
    std::vector<const nn::Network*> networks() const;
    std::vector<nn::Network*> networks();

    const nn::Network& trunk() const noexcept { return trunk_; }
    const nn::Network& value_head() const { return *value_; }
    const nn::Network& advantage_head() const { return *advantage_; }

    bool same_parameters(const QNetwork& other) const;

private:
    nn::Network trunk_;
    std::optional<nn::Network> value_;
    std::optional<nn::Network> advantage_;
    DuelingMode mode_ = DuelingMode::mean_centered;
};

/// flatten → dense(hidden, relu) → dense(actions, linear)
QNetwork make_dqn_network(std::size_t obs, std::size_t actions, std::size_t hidden, Rng& rng);
/// trunk flatten → dense(hidden, relu); value head dense(1); advantage head dense(actions)
QNetwork make_dueling_network(std::size_t obs, std::size_t actions, std::size_t hidden, DuelingMode mode,
                              Rng& rng);
/// flatten → gru(hidden) → dense(hidden, relu) → dense(actions, linear), over windows of `steps` rows
QNetwork make_drqn_network(std::size_t obs, std::size_t actions, std::size_t hidden, std::size_t steps, Rng& rng);

}  // namespace adaptswarm::agents
