#include "adaptswarm/agents/q_network.hpp"

#include <numeric>

#include "adaptswarm/errors.hpp"

namespace adaptswarm::agents {

using nn::Activation;
using nn::LayerSpec;

std::string_view to_string(DuelingMode m) {
    return m == DuelingMode::uncentered ? "uncentered" : "mean_centered";
}

std::optional<DuelingMode> parse_dueling_mode(std::string_view name) {
    if (name == "uncentered") return DuelingMode::uncentered;
    if (name == "mean_centered") return DuelingMode::mean_centered;
    return std::nullopt;
}

nn::Vector dueling_aggregate(double value, std::span<const double> advantage, DuelingMode mode) {
    double mean = 0.0;
    if (mode == DuelingMode::mean_centered && !advantage.empty()) {
        mean = std::accumulate(advantage.begin(), advantage.end(), 0.0) / static_cast<double>(advantage.size());
    }
    nn::Vector q(advantage.begin(), advantage.end());
    for (double& x : q) x = value + (x - mean);
    return q;
}

QNetwork::QNetwork(nn::Network net) : trunk_(std::move(net)) {}

QNetwork::QNetwork(nn::Network trunk, nn::Network value, nn::Network advantage, DuelingMode mode)
    : trunk_(std::move(trunk)), value_(std::move(value)), advantage_(std::move(advantage)), mode_(mode) {
    if (value_->input_width() != trunk_.output_width() || advantage_->input_width() != trunk_.output_width()) {
        throw DimensionError("dueling heads must consume the trunk output");
    }
    if (value_->output_width() != 1) throw DimensionError("value head must output a scalar");
}

std::size_t QNetwork::action_count() const noexcept {
    return dueling() ? advantage_->output_width() : trunk_.output_width();
}

nn::Vector QNetwork::forward(const nn::Matrix& input, QTape* tape) const {
    nn::Vector features = trunk_.forward(input, tape ? &tape->trunk : nullptr);
    if (!dueling()) return features;
    const nn::Matrix row = nn::Matrix::row_vector(features);
    const nn::Vector v = value_->forward(row, tape ? &tape->value : nullptr);
    const nn::Vector adv = advantage_->forward(row, tape ? &tape->advantage : nullptr);
    return dueling_aggregate(v[0], adv, mode_);
}

nn::Vector QNetwork::forward(std::span<const double> observation) const {
    return forward(nn::Matrix::row_vector(observation));
}

nn::Gradients QNetwork::backprop(const QTape& tape, std::span<const double> q_grad, nn::Matrix* input_grad) const {
    if (!dueling()) return trunk_.backprop(tape.trunk, q_grad, input_grad);

    // ∂Q_a/∂v = 1 and ∂Q_a/∂adv_j = δ_aj (− 1/n when centred).
    const double total = std::accumulate(q_grad.begin(), q_grad.end(), 0.0);
    nn::Vector adv_grad(q_grad.begin(), q_grad.end());
    if (mode_ == DuelingMode::mean_centered) {
        const double mean = total / static_cast<double>(adv_grad.size());
        for (double& g : adv_grad) g -= mean;
    }
    const nn::Vector v_grad{total};

    nn::Matrix from_value, from_adv;
    nn::Gradients gv = value_->backprop(tape.value, v_grad, &from_value);
    nn::Gradients ga = advantage_->backprop(tape.advantage, adv_grad, &from_adv);
    nn::Vector feature_grad(from_value.values().begin(), from_value.values().end());
    for (std::size_t i = 0; i < feature_grad.size(); ++i) feature_grad[i] += from_adv.values()[i];

    nn::Gradients out = trunk_.backprop(tape.trunk, feature_grad, input_grad);
    for (auto& g : gv) out.push_back(std::move(g));
    for (auto& g : ga) out.push_back(std::move(g));
    return out;
}

std::vector<std::span<double>> QNetwork::parameters() {
    std::vector<std::span<double>> out;
    for (nn::Network* n : networks()) {
        for (auto block : n->parameters()) out.push_back(block);
    }
    return out;
}

std::vector<std::span<const double>> QNetwork::parameters() const {
    std::vector<std::span<const double>> out;
    for (const nn::Network* n : networks()) {
        for (auto block : n->parameters()) out.push_back(block);
    }
    return out;
}

nn::Gradients QNetwork::zero_gradients() const {
    nn::Gradients out;
    for (const nn::Network* n : networks()) {
        for (auto& g : n->zero_gradients()) out.push_back(std::move(g));
    }
    return out;
}

std::vector<const nn::Network*> QNetwork::networks() const {
    std::vector<const nn::Network*> out{&trunk_};
    if (dueling()) {
        out.push_back(&*value_);
        out.push_back(&*advantage_);
    }
    return out;
}

std::vector<nn::Network*> QNetwork::networks() {
    std::vector<nn::Network*> out{&trunk_};
    if (dueling()) {
        out.push_back(&*value_);
        out.push_back(&*advantage_);
    }
    return out;
}

bool QNetwork::same_parameters(const QNetwork& other) const {
    const auto a = networks();
    const auto b = other.networks();
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i]->same_parameters(*b[i])) return false;
    }
    return true;
}

QNetwork make_dqn_network(std::size_t obs, std::size_t actions, std::size_t hidden, Rng& rng) {
    return QNetwork(nn::make_network(
        obs, {LayerSpec::flatten(), LayerSpec::dense(hidden, Activation::relu), LayerSpec::dense(actions, Activation::linear)},
        rng));
}

QNetwork make_dueling_network(std::size_t obs, std::size_t actions, std::size_t hidden, DuelingMode mode,
                              Rng& rng) {
    nn::Network trunk = nn::make_network(obs, {LayerSpec::flatten(), LayerSpec::dense(hidden, Activation::relu)}, rng);
    nn::Network value = nn::make_network(hidden, {LayerSpec::dense(1, Activation::linear)}, rng);
    nn::Network adv = nn::make_network(hidden, {LayerSpec::dense(actions, Activation::linear)}, rng);
    return QNetwork(std::move(trunk), std::move(value), std::move(adv), mode);
}

QNetwork make_drqn_network(std::size_t obs, std::size_t actions, std::size_t hidden, std::size_t steps, Rng& rng) {
    return QNetwork(nn::make_network(obs,
                                     {LayerSpec::flatten(), LayerSpec::gru(hidden),
                                      LayerSpec::dense(hidden, Activation::relu),
                                      LayerSpec::dense(actions, Activation::linear)},
                                     rng, steps));
}

}  // namespace adaptswarm::agents
