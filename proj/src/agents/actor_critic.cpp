#include "adaptswarm/agents/actor_critic.hpp"

#include <cmath>

#include "adaptswarm/agents/returns.hpp"
#include "adaptswarm/errors.hpp"

namespace adaptswarm::agents {

using nn::Activation;
using nn::LayerSpec;

nn::Network make_actor_network(std::size_t obs, std::size_t actions, std::size_t hidden, Rng& rng) {
    return nn::make_network(obs,
                            {LayerSpec::flatten(), LayerSpec::dense(hidden, Activation::relu),
                             LayerSpec::dense(hidden, Activation::relu), LayerSpec::dense(actions, Activation::softmax)},
                            rng);
}

nn::Network make_critic_network(std::size_t obs, std::size_t actions, std::size_t hidden, Rng& rng) {
    return nn::make_network(obs + actions,
                            {LayerSpec::flatten(), LayerSpec::dense(hidden, Activation::relu),
                             LayerSpec::dense(hidden, Activation::relu), LayerSpec::dense(1, Activation::linear)},
                            rng);
}

ActorCritic make_actor_critic(std::size_t obs, std::size_t actions, std::size_t hidden,
                              const nn::OptimizerConfig& actor_opt, const nn::OptimizerConfig& critic_opt,
                              double gamma, double tau, Rng& rng) {
    ActorCritic ac;
    ac.actor = make_actor_network(obs, actions, hidden, rng);
    ac.critic = make_critic_network(obs, actions, hidden, rng);
    ac.actor_target = ac.actor;
    ac.critic_target = ac.critic;
    ac.actor_optimizer.config = actor_opt;
    ac.critic_optimizer.config = critic_opt;
    ac.gamma = gamma;
    ac.tau = tau;
    return ac;
}

nn::Vector critic_input(std::span<const double> observation, std::span<const double> preference) {
    nn::Vector in(observation.begin(), observation.end());
    in.insert(in.end(), preference.begin(), preference.end());
    return in;
}

double critic_value(const nn::Network& critic, std::span<const double> observation,
                    std::span<const double> preference) {
    return critic.forward(critic_input(observation, preference))[0];
}

DdpgChoice select_action_ddpg(const nn::Network& actor, std::span<const double> observation, OUProcess& ou,
                              Rng& rng) {
    DdpgChoice c;
    c.preference = actor.forward(observation);
    if (ou.x.size() != c.preference.size()) throw DimensionError("OU process width differs from the action count");
    const nn::Vector& noise = ou_step(ou, rng);
    for (std::size_t i = 0; i < c.preference.size(); ++i) c.preference[i] += noise[i];
    c.action = static_cast<int>(argmax(c.preference));
    return c;
}

nn::Gradients actor_ascent_gradient(const nn::Network& actor, const nn::Network& critic,
                                    std::span<const double> observation, double* q) {
    nn::Tape actor_tape;
    const nn::Vector pref = actor.forward(nn::Matrix::row_vector(observation), &actor_tape);
    nn::Tape critic_tape;
    const nn::Vector value = critic.forward(nn::Matrix::row_vector(critic_input(observation, pref)), &critic_tape);
    if (q) *q = value[0];

    nn::Matrix input_grad;
    const nn::Vector one{1.0};
    critic.backprop(critic_tape, one, &input_grad);
    const auto row = input_grad.row(0);
    const nn::Vector pref_grad(row.begin() + static_cast<long>(observation.size()), row.end());
    return actor.backprop(actor_tape, pref_grad);
}

std::optional<TrainStats> train_step_ddpg(ActorCritic& ac, const ReplayBuffer& buffer, std::size_t batch_size,
                                          Rng& rng) {
    if (batch_size == 0 || buffer.size() < batch_size) return std::nullopt;
    const std::vector<const Transition*> batch = buffer.sample(batch_size, rng);
    const double n = static_cast<double>(batch.size());

    TrainStats stats;
    double abs_err = 0.0;
    nn::Gradients critic_grads = ac.critic.zero_gradients();
    for (const Transition* t : batch) {
        if (t->preference.empty()) throw PreconditionError("DDPG transition lacks its preference vector");
        double next = 0.0;
        if (!t->done) {
            const nn::Vector next_pref = ac.actor_target.forward(t->next_state);
            next = critic_value(ac.critic_target, t->next_state, next_pref);
        }
        const double y = bellman_target(t->reward, next, t->done, ac.gamma);

        nn::Tape tape;
        const double q = ac.critic.forward(nn::Matrix::row_vector(critic_input(t->state, t->preference)), &tape)[0];
        const double err = q - y;
        stats.loss += err * err / n;
        stats.mean_q += q / n;
        abs_err += std::abs(err);
        const nn::Vector g{2.0 * err / n};
        nn::add_scaled(critic_grads, ac.critic.backprop(tape, g));
    }
    stats.mae = abs_err / n;
    nn::optimizer_step(ac.critic_optimizer, ac.critic, critic_grads);

    // Minimising −Q: descend along the negated ascent direction.
    nn::Gradients actor_grads = ac.actor.zero_gradients();
    for (const Transition* t : batch) nn::add_scaled(actor_grads, actor_ascent_gradient(ac.actor, ac.critic, t->state), -1.0 / n);
    nn::optimizer_step(ac.actor_optimizer, ac.actor, actor_grads);

    nn::soft_update(ac.actor_target, ac.actor, ac.tau);
    nn::soft_update(ac.critic_target, ac.critic, ac.tau);
    return stats;
}

}  // namespace adaptswarm::agents
