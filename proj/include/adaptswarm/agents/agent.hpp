#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adaptswarm/agents/exploration.hpp"
#include "adaptswarm/agents/q_learning.hpp"
#include "adaptswarm/agents/q_network.hpp"
#include "adaptswarm/agents/replay.hpp"
#include "adaptswarm/env/environment.hpp"
#include "adaptswarm/nn/optimizer.hpp"

namespace adaptswarm::agents {

enum class Algorithm { dqn, ddqn, drqn, pgnn, ddpg };

inline constexpr std::array<Algorithm, 5> kAlgorithms{Algorithm::dqn, Algorithm::ddqn, Algorithm::drqn,
                                                      Algorithm::pgnn, Algorithm::ddpg};

std::string_view to_string(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string_view tag);
/// "dqn, ddqn, drqn, pgnn, ddpg"
std::string algorithm_list();

/// Hyperparameters of every learner. Each agent reads the subset it uses.
struct AgentConfig {
    double gamma = 0.95;
    EpsilonSchedule epsilon;
    std::size_t buffer_capacity = 50000;
    std::size_t batch_size = 32;
    std::uint64_t target_period = 500;
    std::size_t sequence_length = 8;
    std::size_t hidden_units = 20;
    DuelingMode dueling = DuelingMode::mean_centered;
    nn::OptimizerKind optimizer = nn::OptimizerKind::adam;
    double learning_rate = 1e-3;
    double actor_learning_rate = 1e-4;
    double critic_learning_rate = 1e-3;
    double tau = 0.005;
    double ou_theta = 0.15;
    double ou_sigma = 0.2;
    double ou_dt = 1.0;
    std::size_t pg_batch_episodes = 1;
    std::size_t pg_hidden_units = 0;  // 0: input feeds the softmax layer directly
    std::size_t train_every = 1;      // environment steps per gradient update
};

void validate(const AgentConfig& config);

struct Decision {
    int action = 0;
    double estimate = 0.0;  // Q(s, a) at selection; ln π(a | s) for the policy-gradient learner
    nn::Vector preference;  // DDPG only
};

class Agent {
public:
    virtual ~Agent() = default;

    virtual Algorithm algorithm() const = 0;
    virtual void begin_episode() = 0;
    virtual Decision act(const env::Observation& observation) = 0;
    /// Stores one transition and trains if the learner's cadence calls for it.
    virtual std::optional<TrainStats> record(const Transition& t) = 0;
    /// Receives the finished episode. Episodic learners train here.
    virtual std::optional<TrainStats> end_episode(std::vector<Transition> episode) = 0;

    /// The trained networks, in a fixed per-algorithm order.
    virtual std::vector<const nn::Network*> networks() const = 0;
    virtual std::vector<nn::Network*> networks() = 0;
    /// Copies online parameters into any target networks.
    virtual void sync_targets() = 0;
};

std::unique_ptr<Agent> make_agent(Algorithm algorithm, const AgentConfig& config, std::size_t observation_size,
                                  int action_count, std::uint64_t seed);

struct EpisodeMetrics {
    int episode = 0;
    int steps = 0;
    double total_reward = 0.0;
    double mean_q = 0.0;
    std::optional<double> mae;   // mean over the episode's train steps; unset without training
    std::optional<double> loss;
    double adaptation_time_s = 0.0;
    bool converged = false;
};

struct EpisodeResult {
    EpisodeMetrics metrics;
    std::vector<Transition> transitions;
};

/// Plays one episode from `start` (the observation returned by reset),
/// training as it goes.
EpisodeResult run_episode(Agent& agent, env::Environment& environment, const env::Observation& start);

/// "adaptswarm-agent 1 <algorithm> <config-hash> <network-count>\n", then per
/// network a little-endian u32 byte length and its save_params image.
std::vector<std::uint8_t> save_checkpoint(const Agent& agent, std::string_view config_hash);
/// Restores the networks of a checkpoint written for the same algorithm and
/// shapes, then resyncs targets. Returns the stored config hash.
std::string load_checkpoint(Agent& agent, std::span<const std::uint8_t> bytes);

}  // namespace adaptswarm::agents
