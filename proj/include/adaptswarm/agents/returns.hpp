#pragma once

#include <vector>

#include "adaptswarm/nn/matrix.hpp"

namespace adaptswarm::agents {

/// y = r + γ·max_a′ Q(s′, a′), with the bootstrap term dropped on terminal steps.
inline double bellman_target(double reward, double next_max, bool done, double gamma) {
    return done ? reward : reward + gamma * next_max;
}

/// G_t = r_t + γ·G_{t+1}, computed backwards.
nn::Vector discounted_returns(const nn::Vector& rewards, double gamma);

inline constexpr double kReturnStdFloor = 1e-8;

/// (G − mean) / std over every step of every episode, population std floored
/// at kReturnStdFloor. Needs at least two steps in total.
std::vector<nn::Vector> normalize_returns(const std::vector<nn::Vector>& returns);

}  // namespace adaptswarm::agents
