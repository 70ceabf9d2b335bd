#include "adaptswarm/agents/policy_gradient.hpp"

#include <algorithm>
#include <cmath>

#include "adaptswarm/agents/returns.hpp"
#include "adaptswarm/nn/loss.hpp"

namespace adaptswarm::agents {

using nn::Activation;
using nn::LayerSpec;

nn::Network make_policy_network(std::size_t obs, std::size_t actions, std::size_t hidden, Rng& rng) {
    std::vector<LayerSpec> specs{LayerSpec::flatten()};
    if (hidden > 0) specs.push_back(LayerSpec::dense(hidden, Activation::relu));
    specs.push_back(LayerSpec::dense(actions, Activation::softmax));
    return nn::make_network(obs, specs, rng);
}

std::optional<TrainStats> train_batch_pgnn(PolicyLearner& learner, std::span<const std::vector<Transition>> episodes) {
    std::vector<nn::Vector> returns;
    std::size_t steps = 0;
    for (const std::vector<Transition>& ep : episodes) {
        if (ep.empty()) continue;
        nn::Vector rewards;
        rewards.reserve(ep.size());
        for (const Transition& t : ep) rewards.push_back(t.reward);
        returns.push_back(discounted_returns(rewards, learner.gamma));
        steps += ep.size();
    }
    if (steps < 2) return std::nullopt;
    const std::vector<nn::Vector> scaled = normalize_returns(returns);

    const double n = static_cast<double>(steps);
    TrainStats stats;
    nn::Gradients total = learner.policy.zero_gradients();
    std::size_t e = 0;
    for (const std::vector<Transition>& ep : episodes) {
        if (ep.empty()) continue;
        for (std::size_t t = 0; t < ep.size(); ++t) {
            nn::Tape tape;
            const nn::Vector pi = learner.policy.forward(nn::Matrix::row_vector(ep[t].state), &tape);
            const nn::LossResult ce =
                nn::cross_entropy(pi, static_cast<std::size_t>(ep[t].action), scaled[e][t] / n);
            stats.loss += ce.value;
            stats.mean_q += std::log(std::max(pi[static_cast<std::size_t>(ep[t].action)], nn::kProbabilityFloor)) / n;
            nn::add_scaled(total, learner.policy.backprop(tape, ce.gradient));
        }
        ++e;
    }
    auto params = learner.policy.parameters();
    nn::optimizer_step(learner.optimizer, params, total);
    return stats;
}

}  // namespace adaptswarm::agents
