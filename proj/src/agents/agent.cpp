#include "adaptswarm/agents/agent.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "adaptswarm/agents/actor_critic.hpp"
#include "adaptswarm/agents/policy_gradient.hpp"
#include "adaptswarm/errors.hpp"
#include "adaptswarm/nn/loss.hpp"
#include "adaptswarm/nn/serialize.hpp"

namespace adaptswarm::agents {

std::string_view to_string(Algorithm a) {
    switch (a) {
        case Algorithm::dqn: return "dqn";
        case Algorithm::ddqn: return "ddqn";
        case Algorithm::drqn: return "drqn";
        case Algorithm::pgnn: return "pgnn";
        case Algorithm::ddpg: return "ddpg";
    }
    return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view tag) {
    for (Algorithm a : kAlgorithms) {
        if (to_string(a) == tag) return a;
    }
    return std::nullopt;
}

std::string algorithm_list() {
    std::string out;
    for (Algorithm a : kAlgorithms) {
        if (!out.empty()) out += ", ";
        out += to_string(a);
    }
    return out;
}

void validate(const AgentConfig& c) {
    if (!(c.gamma >= 0.0 && c.gamma < 1.0)) throw ConfigError("agent.gamma must lie in [0, 1)");
    const EpsilonSchedule& e = c.epsilon;
    if (!(e.min >= 0.0 && e.min <= e.start && e.start <= 1.0)) {
        throw ConfigError("epsilon schedule needs 0 <= epsilon_min <= epsilon_start <= 1");
    }
    if (c.buffer_capacity == 0) throw ConfigError("agent.buffer_capacity must be positive");
    if (c.batch_size == 0 || c.batch_size > c.buffer_capacity) {
        throw ConfigError("agent.batch_size must be positive and fit in the buffer");
    }
    if (c.target_period == 0) throw ConfigError("agent.target_period must be positive");
    if (c.sequence_length == 0) throw ConfigError("agent.sequence_length must be positive");
    if (c.hidden_units == 0) throw ConfigError("agent.hidden_units must be positive");
    for (double lr : {c.learning_rate, c.actor_learning_rate, c.critic_learning_rate}) {
        if (!(lr >= 0.0) || !std::isfinite(lr)) throw ConfigError("learning rates must be finite and non-negative");
    }
    if (!(c.tau >= 0.0 && c.tau <= 1.0)) throw ConfigError("agent.tau must lie in [0, 1]");
    if (c.ou_theta < 0.0 || c.ou_sigma < 0.0 || !(c.ou_dt > 0.0)) {
        throw ConfigError("OU parameters need theta >= 0, sigma >= 0, dt > 0");
    }
    if (c.pg_batch_episodes == 0) throw ConfigError("agent.pg_batch_episodes must be positive");
    if (c.train_every == 0) throw ConfigError("agent.train_every must be positive");
}

namespace {

nn::OptimizerConfig optimizer(const AgentConfig& c, double lr) {
    nn::OptimizerConfig o;
    o.kind = c.optimizer;
    o.learning_rate = lr;
    return o;
}

/// DQN and its dueling variant.
class QAgent final : public Agent {
public:
    QAgent(Algorithm algo, const AgentConfig& c, std::size_t obs, int actions, std::uint64_t seed)
        : algo_(algo), config_(c), rng_(seed), buffer_(c.buffer_capacity) {
        const auto n = static_cast<std::size_t>(actions);
        QNetwork net = algo == Algorithm::ddqn ? make_dueling_network(obs, n, c.hidden_units, c.dueling, rng_)
                                               : make_dqn_network(obs, n, c.hidden_units, rng_);
        learner_ = make_q_learner(std::move(net), optimizer(c, c.learning_rate), c.gamma, c.target_period);
    }

    Algorithm algorithm() const override { return algo_; }
    void begin_episode() override {}

    Decision act(const env::Observation& obs) override {
        const nn::Vector q = learner_.online.forward(obs);
        Decision d;
        d.action = select_action_greedy(q, config_.epsilon.at(steps_), rng_);
        d.estimate = q[static_cast<std::size_t>(d.action)];
        return d;
    }

    std::optional<TrainStats> record(const Transition& t) override {
        buffer_.push(t);
        if (++steps_ % config_.train_every != 0) return std::nullopt;
        return train_step_dqn(learner_, buffer_, config_.batch_size, rng_);
    }

    std::optional<TrainStats> end_episode(std::vector<Transition>) override { return std::nullopt; }

    std::vector<const nn::Network*> networks() const override { return learner_.online.networks(); }
    std::vector<nn::Network*> networks() override { return learner_.online.networks(); }
    void sync_targets() override { learner_.target = learner_.online; }

private:
    Algorithm algo_;
    AgentConfig config_;
    Rng rng_;
    ReplayBuffer buffer_;
    QLearner learner_;
    std::uint64_t steps_ = 0;
};

class DrqnAgent final : public Agent {
public:
    DrqnAgent(const AgentConfig& c, std::size_t obs, int actions, std::uint64_t seed)
        : config_(c), rng_(seed), replay_(c.buffer_capacity) {
        learner_ = make_q_learner(
            make_drqn_network(obs, static_cast<std::size_t>(actions), c.hidden_units, c.sequence_length, rng_),
            optimizer(c, c.learning_rate), c.gamma, c.target_period);
    }

    Algorithm algorithm() const override { return Algorithm::drqn; }
    void begin_episode() override { history_.clear(); }

    Decision act(const env::Observation& obs) override {
        history_.push_back(obs);
        while (history_.size() > config_.sequence_length) history_.pop_front();
        nn::Matrix window(history_.size(), obs.size());
        for (std::size_t i = 0; i < history_.size(); ++i) std::copy(history_[i].begin(), history_[i].end(), window.row(i).begin());
        const nn::Vector q = learner_.online.forward(window);
        Decision d;
        d.action = select_action_greedy(q, config_.epsilon.at(steps_), rng_);
        d.estimate = q[static_cast<std::size_t>(d.action)];
        return d;
    }

    std::optional<TrainStats> record(const Transition&) override {
        if (++steps_ % config_.train_every != 0) return std::nullopt;
        return train_step_drqn(learner_, replay_, config_.batch_size, config_.sequence_length, rng_);
    }

    std::optional<TrainStats> end_episode(std::vector<Transition> episode) override {
        replay_.add_episode(std::move(episode));
        return std::nullopt;
    }

    std::vector<const nn::Network*> networks() const override { return learner_.online.networks(); }
    std::vector<nn::Network*> networks() override { return learner_.online.networks(); }
    void sync_targets() override { learner_.target = learner_.online; }

private:
    AgentConfig config_;
    Rng rng_;
    EpisodeReplay replay_;
    QLearner learner_;
    std::deque<env::Observation> history_;
    std::uint64_t steps_ = 0;
};

class PgnnAgent final : public Agent {
public:
    PgnnAgent(const AgentConfig& c, std::size_t obs, int actions, std::uint64_t seed) : config_(c), rng_(seed) {
        learner_.policy = make_policy_network(obs, static_cast<std::size_t>(actions), c.pg_hidden_units, rng_);
        learner_.optimizer.config = optimizer(c, c.learning_rate);
        learner_.gamma = c.gamma;
    }

    Algorithm algorithm() const override { return Algorithm::pgnn; }
    void begin_episode() override {}

    Decision act(const env::Observation& obs) override {
        const nn::Vector pi = learner_.policy.forward(obs);
        Decision d;
        d.action = static_cast<int>(std::discrete_distribution<std::size_t>(pi.begin(), pi.end())(rng_));
        d.estimate = std::log(std::max(pi[static_cast<std::size_t>(d.action)], nn::kProbabilityFloor));
        return d;
    }

    std::optional<TrainStats> record(const Transition&) override { return std::nullopt; }

    std::optional<TrainStats> end_episode(std::vector<Transition> episode) override {
        pending_.push_back(std::move(episode));
        if (pending_.size() < config_.pg_batch_episodes) return std::nullopt;
        std::optional<TrainStats> stats = train_batch_pgnn(learner_, pending_);
        // A batch too short to normalize keeps accumulating.
        if (stats) pending_.clear();
        return stats;
    }

    std::vector<const nn::Network*> networks() const override { return {&learner_.policy}; }
    std::vector<nn::Network*> networks() override { return {&learner_.policy}; }
    void sync_targets() override {}

private:
    AgentConfig config_;
    Rng rng_;
    PolicyLearner learner_;
    std::vector<std::vector<Transition>> pending_;
};

class DdpgAgent final : public Agent {
public:
    DdpgAgent(const AgentConfig& c, std::size_t obs, int actions, std::uint64_t seed)
        : config_(c),
          rng_(seed),
          buffer_(c.buffer_capacity),
          ou_(static_cast<std::size_t>(actions), c.ou_theta, c.ou_sigma, c.ou_dt) {
        ac_ = make_actor_critic(obs, static_cast<std::size_t>(actions), c.hidden_units,
                                optimizer(c, c.actor_learning_rate), optimizer(c, c.critic_learning_rate), c.gamma,
                                c.tau, rng_);
    }

    Algorithm algorithm() const override { return Algorithm::ddpg; }
    void begin_episode() override { ou_.reset(); }

    Decision act(const env::Observation& obs) override {
        DdpgChoice choice = select_action_ddpg(ac_.actor, obs, ou_, rng_);
        Decision d;
        d.action = choice.action;
        d.estimate = critic_value(ac_.critic, obs, choice.preference);
        d.preference = std::move(choice.preference);
        return d;
    }

    std::optional<TrainStats> record(const Transition& t) override {
        buffer_.push(t);
        if (++steps_ % config_.train_every != 0) return std::nullopt;
        return train_step_ddpg(ac_, buffer_, config_.batch_size, rng_);
    }

    std::optional<TrainStats> end_episode(std::vector<Transition>) override { return std::nullopt; }

    std::vector<const nn::Network*> networks() const override { return {&ac_.actor, &ac_.critic}; }
    std::vector<nn::Network*> networks() override { return {&ac_.actor, &ac_.critic}; }
    void sync_targets() override {
        ac_.actor_target = ac_.actor;
        ac_.critic_target = ac_.critic;
    }

private:
    AgentConfig config_;
    Rng rng_;
    ReplayBuffer buffer_;
    OUProcess ou_;
    ActorCritic ac_;
    std::uint64_t steps_ = 0;
};

}  // namespace

std::unique_ptr<Agent> make_agent(Algorithm algorithm, const AgentConfig& config, std::size_t observation_size,
                                  int action_count, std::uint64_t seed) {
    validate(config);
    if (observation_size == 0 || action_count < 1) throw ConfigError("agent needs a nonempty observation and action set");
    switch (algorithm) {
        case Algorithm::dqn:
        case Algorithm::ddqn: return std::make_unique<QAgent>(algorithm, config, observation_size, action_count, seed);
        case Algorithm::drqn: return std::make_unique<DrqnAgent>(config, observation_size, action_count, seed);
        case Algorithm::pgnn: return std::make_unique<PgnnAgent>(config, observation_size, action_count, seed);
        case Algorithm::ddpg: return std::make_unique<DdpgAgent>(config, observation_size, action_count, seed);
    }
    throw ConfigError("unknown algorithm");
}

EpisodeResult run_episode(Agent& agent, env::Environment& environment, const env::Observation& start) {
    EpisodeResult out;
    EpisodeMetrics& m = out.metrics;
    double q_sum = 0.0, loss_sum = 0.0, mae_sum = 0.0;
    int trained = 0, mae_count = 0;
    auto absorb = [&](const std::optional<TrainStats>& s) {
        if (!s) return;
        ++trained;
        loss_sum += s->loss;
        if (s->mae) {
            ++mae_count;
            mae_sum += *s->mae;
        }
    };

    agent.begin_episode();
    env::Observation obs = start;
    for (bool done = false; !done;) {
        Decision d = agent.act(obs);
        env::StepResult r = environment.step(d.action);
        Transition t{std::move(obs), d.action, r.reward, r.observation, r.done, std::move(d.preference)};
        absorb(agent.record(t));

        ++m.steps;
        m.total_reward += r.reward;
        m.adaptation_time_s += r.info.duration;
        m.converged = r.info.converged;
        q_sum += d.estimate;
        done = r.done;
        obs = std::move(r.observation);
        out.transitions.push_back(std::move(t));
    }
    absorb(agent.end_episode(out.transitions));

    m.mean_q = q_sum / m.steps;
    if (trained > 0) m.loss = loss_sum / trained;
    if (mae_count > 0) m.mae = mae_sum / mae_count;
    return out;
}

namespace {

constexpr std::string_view kCheckpointMagic = "adaptswarm-agent";
constexpr int kCheckpointVersion = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

}  // namespace

std::vector<std::uint8_t> save_checkpoint(const Agent& agent, std::string_view config_hash) {
    const auto nets = agent.networks();
    const std::string header = std::string(kCheckpointMagic) + " " + std::to_string(kCheckpointVersion) + " " +
                               std::string(to_string(agent.algorithm())) + " " + std::string(config_hash) + " " +
                               std::to_string(nets.size()) + "\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    for (const nn::Network* n : nets) {
        const std::vector<std::uint8_t> body = nn::save_params(*n);
        put_u32(out, static_cast<std::uint32_t>(body.size()));
        out.insert(out.end(), body.begin(), body.end());
    }
    return out;
}

std::string load_checkpoint(Agent& agent, std::span<const std::uint8_t> bytes) {
    const auto newline = std::find(bytes.begin(), bytes.end(), std::uint8_t{'\n'});
    if (newline == bytes.end()) throw ParseError("checkpoint header is not terminated", bytes.size());
    const std::string header(bytes.begin(), newline);
    std::vector<std::string> fields;
    for (std::size_t pos = 0; pos <= header.size();) {
        const std::size_t end = std::min(header.find(' ', pos), header.size());
        fields.push_back(header.substr(pos, end - pos));
        pos = end + 1;
    }
    if (fields.size() != 5 || fields[0] != kCheckpointMagic) throw ParseError("not an agent checkpoint", 0);
    if (fields[1] != std::to_string(kCheckpointVersion)) {
        throw VersionError(std::atoi(fields[1].c_str()), kCheckpointVersion);
    }
    if (fields[2] != to_string(agent.algorithm())) {
        throw ConfigError("checkpoint holds a " + fields[2] + " agent, not " + std::string(to_string(agent.algorithm())));
    }

    auto targets = agent.networks();
    if (fields[4] != std::to_string(targets.size())) throw ParseError("checkpoint network count mismatch", 0);

    std::size_t pos = static_cast<std::size_t>(newline - bytes.begin()) + 1;
    std::vector<nn::Network> loaded;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (pos + 4 > bytes.size()) throw ParseError("truncated checkpoint", pos);
        std::uint32_t len = 0;
        for (int b = 0; b < 4; ++b) len |= static_cast<std::uint32_t>(bytes[pos + b]) << (8 * b);
        pos += 4;
        if (pos + len > bytes.size()) throw ParseError("truncated checkpoint", pos);
        nn::Network net = nn::load_params(bytes.subspan(pos, len));
        const nn::Network& want = *targets[i];
        if (net.input_width() != want.input_width() || net.output_width() != want.output_width() ||
            net.parameter_count() != want.parameter_count()) {
            throw DimensionError("checkpoint network " + std::to_string(i) + " has a different shape");
        }
        loaded.push_back(std::move(net));
        pos += len;
    }
    if (pos != bytes.size()) throw ParseError("trailing bytes after checkpoint", pos);
    for (std::size_t i = 0; i < targets.size(); ++i) *targets[i] = std::move(loaded[i]);
    agent.sync_targets();
    return fields[3];
}

}  // namespace adaptswarm::agents
