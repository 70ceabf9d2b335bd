#pragma once

#include <cstddef>
#include <deque>
#include <vector>

#include "adaptswarm/env/environment.hpp"
#include "adaptswarm/nn/matrix.hpp"
#include "adaptswarm/rng.hpp"

namespace adaptswarm::agents {

struct Transition {
    env::Observation state;
    int action = 0;
    double reward = 0.0;
    env::Observation next_state;
    bool done = false;
    nn::Vector preference;  // DDPG only: the noisy actor output that picked `action`
};

/// Fixed-capacity ring of transitions; the oldest entry is overwritten first.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Transition t);
    std::size_t size() const noexcept { return ring_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }
    /// i = 0 is the oldest stored transition.
    const Transition& at(std::size_t i) const;

    /// Uniform draws with replacement. Throws PreconditionError if batch > size().
    std::vector<const Transition*> sample(std::size_t batch, Rng& rng) const;

private:
    std::size_t capacity_;
    std::size_t head_ = 0;  // next slot to overwrite once full
    std::vector<Transition> ring_;
};

/// L consecutive steps of one episode. Leading slots are null when the
/// episode is shorter than L.
struct SequenceWindow {
    std::vector<const Transition*> steps;

    std::size_t padding() const;
    std::size_t valid() const { return steps.size() - padding(); }
    const Transition& last() const { return *steps.back(); }
    /// The valid states as rows, oldest first.
    nn::Matrix states() const;
    /// The window one step later: states shifted by one plus the final
    /// next_state, growing by a row while padding remains.
    nn::Matrix next_states() const;
};

/// Completed episodes kept whole for sequence sampling. Whole episodes are
/// evicted oldest first once the transition count exceeds the capacity.
class EpisodeReplay {
public:
    explicit EpisodeReplay(std::size_t capacity);

    void add_episode(std::vector<Transition> episode);
    std::size_t episode_count() const noexcept { return episodes_.size(); }
    std::size_t transition_count() const noexcept { return transitions_; }
    const std::vector<Transition>& episode(std::size_t i) const { return episodes_.at(i); }

    /// Windows drawn uniformly over every valid (episode, start offset) pair.
    /// An episode of length n contributes max(1, n − L + 1) windows. Returns an
    /// empty batch when nothing is stored.
    std::vector<SequenceWindow> sample_sequences(std::size_t batch, std::size_t length, Rng& rng) const;

private:
    std::size_t capacity_;
    std::size_t transitions_ = 0;
    std::deque<std::vector<Transition>> episodes_;
};

}  // namespace adaptswarm::agents
