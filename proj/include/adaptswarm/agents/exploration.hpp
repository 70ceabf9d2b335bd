#pragma once

#include <cstdint>
#include <span>

#include "adaptswarm/nn/matrix.hpp"
#include "adaptswarm/rng.hpp"

namespace adaptswarm::agents {

/// Linear decay from `start` to `min` over `decay_steps` steps, then flat.
struct EpsilonSchedule {
    double start = 1.0;
    double min = 0.05;
    std::uint64_t decay_steps = 5000;

    double at(std::uint64_t step) const;
};

/// Index of the largest value; ties go to the lowest index.
std::size_t argmax(std::span<const double> values);

/// With probability ε a uniform action, otherwise argmax(q). Always consumes
/// one uniform draw so the stream does not depend on ε.
int select_action_greedy(std::span<const double> q, double epsilon, Rng& rng);

/// Discrete Ornstein-Uhlenbeck process
/// x ← x + θ(μ − x)dt + σ√dt·N(0, 1), per component.
struct OUProcess {
    double theta = 0.15;
    double sigma = 0.2;
    double dt = 1.0;
    nn::Vector mu;
    nn::Vector x;

    OUProcess() = default;
    OUProcess(std::size_t size, double theta, double sigma, double dt);

    void reset() { x = mu; }
    /// Stationary variance of the discrete recursion, σ²dt / (1 − (1 − θdt)²).
    double stationary_variance() const;
};

const nn::Vector& ou_step(OUProcess& p, Rng& rng);

}  // namespace adaptswarm::agents
