#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <vector>

#include "adaptswarm/raft/monitor.hpp"
#include "adaptswarm/raft/peer.hpp"
#include "adaptswarm/rng.hpp"

namespace adaptswarm::raft {

struct ScheduledCrash {
    std::uint64_t tick = 0;
    int node = 0;
};

struct FaultProfile {
    double drop_probability = 0.0;
    std::uint64_t min_delay = 0;  // extra rounds beyond the next one
    std::uint64_t max_delay = 0;
    std::vector<ScheduledCrash> crashes;
};

/// Validates ranges; throws ConfigError.
void validate(const FaultProfile& profile);

struct GateConfig {
    std::uint64_t rounds_per_step = 10;
    std::uint64_t ballot_timeout = 6;
    std::uint64_t election_timeout_min = 10;
    std::uint64_t election_timeout_max = 20;
    std::uint64_t heartbeat_interval = 3;
    std::uint64_t election_give_up_terms = 100;
};

void validate(const GateConfig& config);

/// Message transport between peers. Drop and delay are decided when a
/// message is sent; delivery is ordered by (due round, send order).
class Bus {
public:
    struct Stats {
        std::uint64_t sent = 0;
        std::uint64_t dropped = 0;
        std::uint64_t delivered = 0;
    };

    /// Returns false when the message was dropped.
    bool send(Message msg, std::uint64_t now, const FaultProfile& faults, Rng& rng);
    std::vector<Message> deliver(std::uint64_t now);

    void isolate(int node, bool isolated);
    std::size_t in_flight() const { return queue_.size(); }
    const Stats& stats() const { return stats_; }

private:
    struct Envelope {
        std::uint64_t due;
        std::uint64_t seq;
        Message msg;
    };
    struct Later {
        bool operator()(const Envelope& a, const Envelope& b) const {
            return a.due != b.due ? a.due > b.due : a.seq > b.seq;
        }
    };

    std::priority_queue<Envelope, std::vector<Envelope>, Later> queue_;
    std::set<int> isolated_;
    std::uint64_t seq_ = 0;
    Stats stats_;
};

struct BallotStatus {
    BallotOutcome outcome = BallotOutcome::pending;
    BallotReason reason = BallotReason::none;
    std::uint64_t log_index = 0;
    int approvals = 0;
};

/// The consensus layer in front of the cluster: a set of manager peers, the
/// bus between them and a round clock.
class Gate {
public:
    Gate(std::vector<int> managers, GateConfig config, FaultProfile faults, std::uint64_t seed);

    Gate(const Gate&) = delete;
    Gate& operator=(const Gate&) = delete;
    Gate(Gate&&) = default;
    Gate& operator=(Gate&&) = default;

    /// Alive peer that believes it leads, preferring the highest term.
    std::optional<int> leader() const;
    std::uint64_t max_term() const;
    std::uint64_t now() const { return now_; }

    void set_feasibility(Feasibility feasible) { feasible_ = std::move(feasible); }

    /// Opens a ballot at the current leader. Throws NotLeader when no alive
    /// peer leads.
    ProposalRef propose(const sim::Action& action);
    BallotStatus ballot(const ProposalRef& ref) const;

    /// One round: deliver due messages, advance timers, tally ballots.
    void round();
    void rounds(std::uint64_t n);

    /// Runs rounds until an alive leader exists. Throws ElectionFailed when
    /// terms advance past the give-up bound without one.
    std::pair<int, std::uint64_t> run_election();

    void crash(int node);
    void restart(int node);
    void isolate(int node, bool isolated) { bus_.isolate(node, isolated); }
    bool is_manager(int node) const;
    int alive_managers() const;

    /// Entries committed at the most authoritative alive peer from
    /// `after` + 1 onward.
    std::vector<LogEntry> committed_after(std::uint64_t after) const;
    std::uint64_t commit_index() const;

    const std::vector<Peer>& peers() const { return peers_; }
    const Bus& bus() const { return bus_; }
    const SafetyMonitor& monitor() const { return *monitor_; }
    const GateConfig& config() const { return config_; }
    const FaultProfile& faults() const { return faults_; }

private:
    Peer* peer(int node);
    const Peer* peer(int node) const;
    std::uint64_t draw_timeout();
    void send_all(std::vector<Message> msgs);
    const Peer* authority() const;

    GateConfig config_;
    FaultProfile faults_;
    Rng rng_;
    std::vector<Peer> peers_;
    Bus bus_;
    std::unique_ptr<SafetyMonitor> monitor_;
    Feasibility feasible_;
    std::uint64_t now_ = 0;
};

}  // namespace adaptswarm::raft
