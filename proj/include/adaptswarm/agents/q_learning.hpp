#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "adaptswarm/agents/q_network.hpp"
#include "adaptswarm/agents/replay.hpp"
#include "adaptswarm/nn/optimizer.hpp"

namespace adaptswarm::agents {

struct TrainStats {
    double loss = 0.0;
    double mean_q = 0.0;
    std::optional<double> mae;  // undefined for learners without a Q estimate
};

/// Online and target action-value networks with their optimizer. Shared by
/// DQN, the dueling variant and DRQN.
struct QLearner {
    QNetwork online;
    QNetwork target;
    nn::OptimizerState optimizer;
    double gamma = 0.95;
    std::uint64_t target_period = 500;  // hard copy every this many updates
    std::uint64_t updates = 0;
};

QLearner make_q_learner(QNetwork online, const nn::OptimizerConfig& opt, double gamma, std::uint64_t target_period);

/// One regression example: Q(input)[action] toward r + γ·max Q_target(next_input).
struct QSample {
    nn::Matrix input;
    int action = 0;
    double reward = 0.0;
    nn::Matrix next_input;
    bool done = false;
};

/// y_i = r_i + γ·max_a′ Q_target(s′_i, a′)·(1 − done_i). Terminal entries never
/// evaluate s′.
nn::Vector bellman_targets(std::span<const Transition* const> batch, const QNetwork& target, double gamma);

/// MSE between Q_online(s, a) and the Bellman targets, one optimizer step,
/// then a hard target copy when the update count reaches the period.
TrainStats train_q(QLearner& learner, std::span<const QSample> batch);

/// Uniform minibatch from `buffer`. Skipped (nullopt) while the buffer holds
/// fewer than `batch_size` transitions. Serves both the plain and the
/// dueling network, which differ only inside QNetwork.
std::optional<TrainStats> train_step_dqn(QLearner& learner, const ReplayBuffer& buffer, std::size_t batch_size,
                                         Rng& rng);

/// Window minibatch: each window runs from a zero hidden state and is scored
/// at its final step; padded slots are left out of the unrolled sequence.
std::optional<TrainStats> train_step_drqn(QLearner& learner, const EpisodeReplay& replay, std::size_t batch_size,
                                          std::size_t length, Rng& rng);

}  // namespace adaptswarm::agents
