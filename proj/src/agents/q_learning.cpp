#include "adaptswarm/agents/q_learning.hpp"

#include <algorithm>
#include <cmath>

#include "adaptswarm/agents/exploration.hpp"
#include "adaptswarm/agents/returns.hpp"
#include "adaptswarm/errors.hpp"

namespace adaptswarm::agents {

QLearner make_q_learner(QNetwork online, const nn::OptimizerConfig& opt, double gamma, std::uint64_t target_period) {
    QLearner l;
    l.target = online;
    l.online = std::move(online);
    l.optimizer.config = opt;
    l.gamma = gamma;
    l.target_period = target_period;
    return l;
}

nn::Vector bellman_targets(std::span<const Transition* const> batch, const QNetwork& target, double gamma) {
    if (batch.empty()) throw PreconditionError("bellman_targets needs a nonempty batch");
    nn::Vector y;
    y.reserve(batch.size());
    for (const Transition* t : batch) {
        if (t->done) {
            y.push_back(t->reward);
            continue;
        }
        const nn::Vector q = target.forward(t->next_state);
        y.push_back(bellman_target(t->reward, q[argmax(q)], false, gamma));
    }
    return y;
}

TrainStats train_q(QLearner& learner, std::span<const QSample> batch) {
    if (batch.empty()) throw PreconditionError("train_q needs a nonempty batch");
    const double n = static_cast<double>(batch.size());
    const std::size_t actions = learner.online.action_count();

    TrainStats stats;
    double abs_err = 0.0;
    nn::Gradients total = learner.online.zero_gradients();
    for (const QSample& s : batch) {
        double next_max = 0.0;
        if (!s.done) {
            const nn::Vector nq = learner.target.forward(s.next_input);
            next_max = nq[argmax(nq)];
        }
        const double y = bellman_target(s.reward, next_max, s.done, learner.gamma);

        QTape tape;
        const nn::Vector q = learner.online.forward(s.input, &tape);
        const auto a = static_cast<std::size_t>(s.action);
        if (a >= actions) throw PreconditionError("stored action outside the network's action range");
        const double err = q[a] - y;
        stats.loss += err * err / n;
        stats.mean_q += q[a] / n;
        abs_err += std::abs(err);

        nn::Vector grad(actions, 0.0);
        grad[a] = 2.0 * err / n;
        nn::add_scaled(total, learner.online.backprop(tape, grad));
    }
    stats.mae = abs_err / n;

    auto params = learner.online.parameters();
    nn::optimizer_step(learner.optimizer, params, total);
    ++learner.updates;
    if (learner.target_period > 0 && learner.updates % learner.target_period == 0) learner.target = learner.online;
    return stats;
}

std::optional<TrainStats> train_step_dqn(QLearner& learner, const ReplayBuffer& buffer, std::size_t batch_size,
                                         Rng& rng) {
    if (batch_size == 0 || buffer.size() < batch_size) return std::nullopt;
    std::vector<QSample> batch;
    batch.reserve(batch_size);
    for (const Transition* t : buffer.sample(batch_size, rng)) {
        batch.push_back({nn::Matrix::row_vector(t->state), t->action, t->reward,
                         nn::Matrix::row_vector(t->next_state), t->done});
    }
    return train_q(learner, batch);
}

std::optional<TrainStats> train_step_drqn(QLearner& learner, const EpisodeReplay& replay, std::size_t batch_size,
                                          std::size_t length, Rng& rng) {
    if (batch_size == 0 || replay.episode_count() == 0) return std::nullopt;
    std::vector<QSample> batch;
    batch.reserve(batch_size);
    for (const SequenceWindow& w : replay.sample_sequences(batch_size, length, rng)) {
        const Transition& t = w.last();
        batch.push_back({w.states(), t.action, t.reward, w.next_states(), t.done});
    }
    return train_q(learner, batch);
}

}  // namespace adaptswarm::agents
