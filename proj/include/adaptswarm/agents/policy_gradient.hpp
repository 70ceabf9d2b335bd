#pragma once

#include <optional>
#include <span>
#include <vector>

#include "adaptswarm/agents/q_learning.hpp"
#include "adaptswarm/agents/replay.hpp"
#include "adaptswarm/nn/optimizer.hpp"

namespace adaptswarm::agents {

/// Softmax policy trained by REINFORCE on normalized discounted returns.
struct PolicyLearner {
    nn::Network policy;
    nn::OptimizerState optimizer;
    double gamma = 0.95;
};

/// flatten → [dense(hidden, relu)] → dense(actions, softmax); the hidden
/// layer is present only when `hidden` > 0.
nn::Network make_policy_network(std::size_t obs, std::size_t actions, std::size_t hidden, Rng& rng);

/// loss = −(1/T)·Σ_t Ĝ_t·ln π(a_t | s_t) over all T steps of the batch, one
/// optimizer step. Skipped when the batch holds fewer than two steps.
std::optional<TrainStats> train_batch_pgnn(PolicyLearner& learner, std::span<const std::vector<Transition>> episodes);

}  // namespace adaptswarm::agents
