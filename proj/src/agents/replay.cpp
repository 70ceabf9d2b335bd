#include "adaptswarm/agents/replay.hpp"

#include <algorithm>

#include "adaptswarm/errors.hpp"

namespace adaptswarm::agents {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ConfigError("replay capacity must be positive");
}

void ReplayBuffer::push(Transition t) {
    if (ring_.size() < capacity_) {
        ring_.push_back(std::move(t));
        return;
    }
    ring_[head_] = std::move(t);
    head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
    if (i >= ring_.size()) throw PreconditionError("replay index out of range");
    return ring_[(head_ + i) % ring_.size()];
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t batch, Rng& rng) const {
    if (batch > ring_.size()) {
        throw PreconditionError("cannot sample " + std::to_string(batch) + " from " + std::to_string(ring_.size()));
    }
    std::vector<const Transition*> out;
    out.reserve(batch);
    std::uniform_int_distribution<std::size_t> pick(0, ring_.size() - 1);
    for (std::size_t i = 0; i < batch; ++i) out.push_back(&ring_[pick(rng)]);
    return out;
}

std::size_t SequenceWindow::padding() const {
    return static_cast<std::size_t>(std::count(steps.begin(), steps.end(), nullptr));
}

nn::Matrix SequenceWindow::states() const {
    const std::size_t pad = padding();
    const std::size_t width = last().state.size();
    nn::Matrix m(steps.size() - pad, width);
    for (std::size_t i = pad; i < steps.size(); ++i) std::copy_n(steps[i]->state.begin(), width, m.row(i - pad).begin());
    return m;
}

nn::Matrix SequenceWindow::next_states() const {
    const std::size_t pad = padding();
    const std::size_t width = last().state.size();
    // With padding left the history still grows; otherwise the oldest row drops out.
    const std::size_t first = pad > 0 ? pad : pad + 1;
    nn::Matrix m(steps.size() - first + 1, width);
    std::size_t r = 0;
    for (std::size_t i = first; i < steps.size(); ++i, ++r) std::copy_n(steps[i]->state.begin(), width, m.row(r).begin());
    std::copy_n(last().next_state.begin(), width, m.row(r).begin());
    return m;
}

EpisodeReplay::EpisodeReplay(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ConfigError("episode replay capacity must be positive");
}

void EpisodeReplay::add_episode(std::vector<Transition> episode) {
    if (episode.empty()) return;
    transitions_ += episode.size();
    episodes_.push_back(std::move(episode));
    while (transitions_ > capacity_ && episodes_.size() > 1) {
        transitions_ -= episodes_.front().size();
        episodes_.pop_front();
    }
}

std::vector<SequenceWindow> EpisodeReplay::sample_sequences(std::size_t batch, std::size_t length,
                                                            Rng& rng) const {
    if (length == 0) throw PreconditionError("sequence length must be positive");
    std::vector<SequenceWindow> out;
    if (episodes_.empty()) return out;

    std::vector<std::size_t> cumulative;
    cumulative.reserve(episodes_.size());
    std::size_t total = 0;
    for (const auto& ep : episodes_) {
        total += ep.size() >= length ? ep.size() - length + 1 : 1;
        cumulative.push_back(total);
    }

    std::uniform_int_distribution<std::size_t> pick(0, total - 1);
    out.reserve(batch);
    for (std::size_t b = 0; b < batch; ++b) {
        const std::size_t draw = pick(rng);
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), draw);
        const auto e = static_cast<std::size_t>(it - cumulative.begin());
        const std::size_t offset = draw - (e == 0 ? 0 : cumulative[e - 1]);
        const std::vector<Transition>& ep = episodes_[e];

        SequenceWindow w;
        w.steps.assign(length, nullptr);
        if (ep.size() >= length) {
            for (std::size_t i = 0; i < length; ++i) w.steps[i] = &ep[offset + i];
        } else {
            const std::size_t pad = length - ep.size();
            for (std::size_t i = 0; i < ep.size(); ++i) w.steps[pad + i] = &ep[i];
        }
        out.push_back(std::move(w));
    }
    return out;
}

}  // namespace adaptswarm::agents
