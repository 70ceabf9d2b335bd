#pragma once

// Small environments with known solutions, shared by the unit and acceptance suites.

#include <algorithm>
#include <array>

#include "adaptswarm/env/environment.hpp"
#include "adaptswarm/errors.hpp"

namespace adaptswarm::testing {

/// Deterministic five-state chain. Action 0 moves left (clamped at 0),
/// action 1 moves right; entering state 4 pays 1 and ends the episode.
class ChainEnv final : public env::Environment {
public:
    static constexpr int kStates = 5;
    static constexpr int kGoal = kStates - 1;

    explicit ChainEnv(int max_steps = 20) : max_steps_(max_steps) {}

    env::Observation reset(std::uint64_t) override {
        state_ = 0;
        steps_ = 0;
        return encode(state_);
    }

    env::StepResult step(int action) override {
        if (action < 0 || action > 1) throw PreconditionError("chain action must be 0 or 1");
        state_ = next_state(state_, action);
        ++steps_;
        env::StepResult r;
        r.reward = reward(state_);
        r.info.converged = state_ == kGoal;
        r.info.applied = true;
        r.info.duration = 1.0;
        r.done = r.info.converged || steps_ >= max_steps_;
        r.observation = encode(state_);
        return r;
    }

    std::size_t observation_size() const override { return kStates; }
    int action_count() const override { return 2; }
    int max_steps() const override { return max_steps_; }

    static int next_state(int s, int a) { return a == 1 ? std::min(s + 1, kGoal) : std::max(s - 1, 0); }
    static double reward(int s_next) { return s_next == kGoal ? 1.0 : 0.0; }
    static env::Observation encode(int s) {
        env::Observation o(kStates, 0.0);
        o[static_cast<std::size_t>(s)] = 1.0;
        return o;
    }

private:
    int max_steps_;
    int state_ = 0;
    int steps_ = 0;
};

/// Exact Q* of the chain by value iteration. Row kGoal stays zero (terminal).
inline std::array<std::array<double, 2>, ChainEnv::kStates> chain_value_iteration(double gamma) {
    std::array<std::array<double, 2>, ChainEnv::kStates> q{};
    for (int sweep = 0; sweep < 1000; ++sweep) {
        auto next = q;
        for (int s = 0; s < ChainEnv::kGoal; ++s) {
            for (int a = 0; a < 2; ++a) {
                const int s2 = ChainEnv::next_state(s, a);
                const double future = s2 == ChainEnv::kGoal ? 0.0 : std::max(q[s2][0], q[s2][1]);
                next[s][a] = ChainEnv::reward(s2) + gamma * future;
            }
        }
        if (next == q) break;
        q = next;
    }
    return q;
}

/// One-step two-armed bandit: arm 0 pays 1, arm 1 pays 0.
class BanditEnv final : public env::Environment {
public:
    env::Observation reset(std::uint64_t) override { return {1.0}; }
    env::StepResult step(int action) override {
        if (action < 0 || action > 1) throw PreconditionError("bandit arm must be 0 or 1");
        env::StepResult r;
        r.reward = action == 0 ? 1.0 : 0.0;
        r.done = true;
        r.info.applied = true;
        r.observation = {1.0};
        return r;
    }
    std::size_t observation_size() const override { return 1; }
    int action_count() const override { return 2; }
    int max_steps() const override { return 1; }
};

}  // namespace adaptswarm::testing
