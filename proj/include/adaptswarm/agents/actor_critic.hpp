#pragma once

#include <optional>
#include <span>

#include "adaptswarm/agents/exploration.hpp"
#include "adaptswarm/agents/q_learning.hpp"
#include "adaptswarm/agents/replay.hpp"
#include "adaptswarm/nn/optimizer.hpp"

namespace adaptswarm::agents {

/// DDPG over a discrete action set: the actor emits a preference vector, the
/// critic scores [observation, preference].
struct ActorCritic {
    nn::Network actor;
    nn::Network critic;
    nn::Network actor_target;
    nn::Network critic_target;
    nn::OptimizerState actor_optimizer;
    nn::OptimizerState critic_optimizer;
    double gamma = 0.95;
    double tau = 0.005;
};

/// flatten → dense(hidden, relu) → dense(hidden, relu) → dense(actions, softmax)
nn::Network make_actor_network(std::size_t obs, std::size_t actions, std::size_t hidden, Rng& rng);
/// [obs ‖ preference] → dense(hidden, relu) → dense(hidden, relu) → dense(1, linear)
nn::Network make_critic_network(std::size_t obs, std::size_t actions, std::size_t hidden, Rng& rng);

ActorCritic make_actor_critic(std::size_t obs, std::size_t actions, std::size_t hidden,
                              const nn::OptimizerConfig& actor_opt, const nn::OptimizerConfig& critic_opt,
                              double gamma, double tau, Rng& rng);

nn::Vector critic_input(std::span<const double> observation, std::span<const double> preference);
double critic_value(const nn::Network& critic, std::span<const double> observation,
                    std::span<const double> preference);

struct DdpgChoice {
    int action = 0;
    nn::Vector preference;  // actor output plus OU noise
};

/// pref = actor(obs) + OU noise; the executed action is argmax(pref).
DdpgChoice select_action_ddpg(const nn::Network& actor, std::span<const double> observation, OUProcess& ou, Rng& rng);

/// ∂Q(s, μ(s))/∂θ_μ by the chain rule through the critic's action inputs.
/// Writes Q(s, μ(s)) to `q` when given.
nn::Gradients actor_ascent_gradient(const nn::Network& actor, const nn::Network& critic,
                                    std::span<const double> observation, double* q = nullptr);

/// Critic regression toward r + γ·Q′(s′, μ′(s′)), actor ascent on the
/// updated critic, then soft updates of both targets.
std::optional<TrainStats> train_step_ddpg(ActorCritic& ac, const ReplayBuffer& buffer, std::size_t batch_size,
                                          Rng& rng);

}  // namespace adaptswarm::agents
