#include "adaptswarm/agents/exploration.hpp"

#include <algorithm>
#include <cmath>

#include "adaptswarm/errors.hpp"

namespace adaptswarm::agents {

double EpsilonSchedule::at(std::uint64_t step) const {
    if (decay_steps == 0 || step >= decay_steps) return min;
    const double frac = static_cast<double>(step) / static_cast<double>(decay_steps);
    return std::max(min, start - (start - min) * frac);
}

std::size_t argmax(std::span<const double> values) {
    if (values.empty()) throw PreconditionError("argmax of an empty vector");
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) best = i;
    }
    return best;
}

int select_action_greedy(std::span<const double> q, double epsilon, Rng& rng) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw PreconditionError("epsilon must lie in [0, 1]");
    if (q.empty()) throw PreconditionError("empty action-value vector");
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    if (u < epsilon) {
        return static_cast<int>(std::uniform_int_distribution<std::size_t>(0, q.size() - 1)(rng));
    }
    return static_cast<int>(argmax(q));
}

OUProcess::OUProcess(std::size_t size, double theta_, double sigma_, double dt_)
    : theta(theta_), sigma(sigma_), dt(dt_), mu(size, 0.0), x(size, 0.0) {}

double OUProcess::stationary_variance() const {
    const double a = 1.0 - theta * dt;
    return sigma * sigma * dt / (1.0 - a * a);
}

const nn::Vector& ou_step(OUProcess& p, Rng& rng) {
    if (p.x.size() != p.mu.size()) throw DimensionError("OU state and mean differ in length");
    std::normal_distribution<double> noise(0.0, 1.0);
    const double scale = p.sigma * std::sqrt(p.dt);
    for (std::size_t i = 0; i < p.x.size(); ++i) {
        p.x[i] += p.theta * (p.mu[i] - p.x[i]) * p.dt + scale * noise(rng);
    }
    return p.x;
}

}  // namespace adaptswarm::agents
