#include "adaptswarm/raft/gate.hpp"

#include <algorithm>
#include <cmath>

#include "adaptswarm/errors.hpp"

namespace adaptswarm::raft {

void validate(const FaultProfile& p) {
    if (!(p.drop_probability >= 0.0 && p.drop_probability <= 1.0)) {
        throw ConfigError("faults.drop_probability must lie in [0, 1]");
    }
    if (p.min_delay > p.max_delay) throw ConfigError("faults.min_delay exceeds faults.max_delay");
}

void validate(const GateConfig& c) {
    if (c.rounds_per_step == 0) throw ConfigError("gate.rounds_per_step must be positive");
    if (c.ballot_timeout == 0) throw ConfigError("gate.ballot_timeout must be positive");
    if (c.election_timeout_min == 0 || c.election_timeout_min > c.election_timeout_max) {
        throw ConfigError("gate election timeout range is empty");
    }
    if (c.heartbeat_interval == 0 || c.heartbeat_interval >= c.election_timeout_min) {
        throw ConfigError("gate.heartbeat_interval must be positive and below the election timeout");
    }
    if (c.election_give_up_terms == 0) throw ConfigError("gate.election_give_up_terms must be positive");
}

bool Bus::send(Message msg, std::uint64_t now, const FaultProfile& faults, Rng& rng) {
    ++stats_.sent;
    const double draw = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const std::uint64_t delay = std::uniform_int_distribution<std::uint64_t>(faults.min_delay, faults.max_delay)(rng);
    if (draw < faults.drop_probability || isolated_.contains(msg.from) || isolated_.contains(msg.to)) {
        ++stats_.dropped;
        return false;
    }
    queue_.push(Envelope{now + 1 + delay, seq_++, std::move(msg)});
    return true;
}

std::vector<Message> Bus::deliver(std::uint64_t now) {
    std::vector<Message> out;
    while (!queue_.empty() && queue_.top().due <= now) {
        Message m = queue_.top().msg;
        queue_.pop();
        if (isolated_.contains(m.from) || isolated_.contains(m.to)) {
            ++stats_.dropped;
            continue;
        }
        ++stats_.delivered;
        out.push_back(std::move(m));
    }
    return out;
}

void Bus::isolate(int node, bool isolated) {
    if (isolated) {
        isolated_.insert(node);
    } else {
        isolated_.erase(node);
    }
}

Gate::Gate(std::vector<int> managers, GateConfig config, FaultProfile faults, std::uint64_t seed)
    : config_(config), faults_(std::move(faults)), rng_(seed), monitor_(std::make_unique<SafetyMonitor>()) {
    validate(config_);
    validate(faults_);
    if (managers.empty()) throw ConfigError("the gate needs at least one manager");
    std::sort(managers.begin(), managers.end());
    for (int id : managers) {
        peers_.emplace_back(id, managers, draw_timeout());
        peers_.back().set_observer(monitor_.get());
    }
    peers_.front().bootstrap_leader(1);
    for (std::size_t i = 1; i < peers_.size(); ++i) peers_[i].bootstrap_follower(1, peers_.front().id());
}

std::uint64_t Gate::draw_timeout() {
    return std::uniform_int_distribution<std::uint64_t>(config_.election_timeout_min, config_.election_timeout_max)(rng_);
}

Peer* Gate::peer(int node) {
    for (Peer& p : peers_) {
        if (p.id() == node) return &p;
    }
    return nullptr;
}

const Peer* Gate::peer(int node) const {
    for (const Peer& p : peers_) {
        if (p.id() == node) return &p;
    }
    return nullptr;
}

bool Gate::is_manager(int node) const { return peer(node) != nullptr; }

int Gate::alive_managers() const {
    return static_cast<int>(std::count_if(peers_.begin(), peers_.end(), [](const Peer& p) { return p.alive(); }));
}

std::optional<int> Gate::leader() const {
    const Peer* best = nullptr;
    for (const Peer& p : peers_) {
        if (p.alive() && p.role() == PeerRole::leader && (!best || p.term() > best->term())) best = &p;
    }
    return best ? std::optional<int>(best->id()) : std::nullopt;
}

std::uint64_t Gate::max_term() const {
    std::uint64_t t = 0;
    for (const Peer& p : peers_) t = std::max(t, p.term());
    return t;
}

void Gate::send_all(std::vector<Message> msgs) {
    for (Message& m : msgs) bus_.send(std::move(m), now_, faults_, rng_);
}

ProposalRef Gate::propose(const sim::Action& action) {
    const auto id = leader();
    if (!id) throw NotLeader("no alive leader to open a ballot");
    ProposalRef ref;
    send_all(peer(*id)->propose(action, feasible_, now_, &ref));
    return ref;
}

BallotStatus Gate::ballot(const ProposalRef& ref) const {
    const Peer* p = peer(ref.proposer);
    const Ballot* b = p ? p->ballot(ref) : nullptr;
    BallotStatus s;
    if (!b) {
        s.outcome = BallotOutcome::rejected;
        s.reason = BallotReason::not_leader;
        return s;
    }
    s.outcome = b->outcome;
    s.reason = b->reason;
    s.log_index = b->log_index;
    s.approvals = b->approvals();
    if (s.outcome == BallotOutcome::pending && (!p->alive() || p->role() != PeerRole::leader)) {
        s.outcome = BallotOutcome::rejected;
        s.reason = BallotReason::not_leader;
    }
    return s;
}

void Gate::round() {
    ++now_;
    for (const Message& m : bus_.deliver(now_)) {
        Peer* target = peer(m.to);
        if (!target || !target->alive()) continue;
        send_all(target->receive(m, feasible_, now_));
    }
    for (Peer& p : peers_) {
        if (!p.alive()) continue;
        send_all(p.on_round(config_.heartbeat_interval));
        if (p.election_due()) {
            p.set_election_timeout(draw_timeout());
            send_all(p.start_election());
        }
    }
    const int alive = alive_managers();
    for (Peer& p : peers_) {
        if (p.alive() && p.role() == PeerRole::leader) send_all(p.tally(now_, alive, config_.ballot_timeout));
    }
    monitor_->observe(peers_);
}

void Gate::rounds(std::uint64_t n) {
    for (std::uint64_t i = 0; i < n; ++i) round();
}

std::pair<int, std::uint64_t> Gate::run_election() {
    const std::uint64_t start = max_term();
    // Bound the loop by rounds as well so a frozen term cannot spin forever.
    const std::uint64_t round_limit = (config_.election_give_up_terms + 1) * (config_.election_timeout_max + 1) * 4;
    for (std::uint64_t r = 0;; ++r) {
        if (const auto id = leader()) return {*id, peer(*id)->term()};
        if (max_term() > start + config_.election_give_up_terms || r > round_limit) {
            throw ElectionFailed("no leader elected within " + std::to_string(config_.election_give_up_terms) +
                                 " terms (" + std::to_string(alive_managers()) + " of " +
                                 std::to_string(peers_.size()) + " managers alive)");
        }
        round();
    }
}

void Gate::crash(int node) {
    if (Peer* p = peer(node)) p->crash();
}

void Gate::restart(int node) {
    Peer* p = peer(node);
    if (p && !p->alive()) p->restart(draw_timeout());
}

const Peer* Gate::authority() const {
    if (const auto id = leader()) return peer(*id);
    const Peer* best = nullptr;
    for (const Peer& p : peers_) {
        if (p.alive() && (!best || p.commit_index() > best->commit_index())) best = &p;
    }
    return best;
}

std::uint64_t Gate::commit_index() const {
    const Peer* p = authority();
    return p ? p->commit_index() : 0;
}

std::vector<LogEntry> Gate::committed_after(std::uint64_t after) const {
    const Peer* p = authority();
    if (!p || p->commit_index() <= after) return {};
    const auto& log = p->log();
    return {log.begin() + static_cast<long>(after), log.begin() + static_cast<long>(p->commit_index())};
}

}  // namespace adaptswarm::raft
