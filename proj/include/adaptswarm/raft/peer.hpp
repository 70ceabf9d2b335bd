#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "adaptswarm/sim/cluster.hpp"

namespace adaptswarm::raft {

/// Raised when no leader emerges within the configured number of terms.
class ElectionFailed : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a non-leader tries to open a ballot.
class NotLeader : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

enum class PeerRole { follower, candidate, leader };

std::string_view to_string(PeerRole role);

struct ProposalRef {
    std::uint64_t term = 0;
    std::uint64_t index = 0;
    int proposer = -1;
    auto operator<=>(const ProposalRef&) const = default;
};

/// Replicated log entry. Leaders open each term with an entry that carries
/// no action.
struct LogEntry {
    std::uint64_t term = 0;
    std::optional<sim::Action> action;
    ProposalRef origin;
    bool operator==(const LogEntry&) const = default;
};

enum class MessageKind { propose, vote, vote_request, vote_grant, heartbeat, append_ack };

std::string_view to_string(MessageKind kind);

struct Message {
    MessageKind kind = MessageKind::heartbeat;
    int from = -1;
    int to = -1;
    std::uint64_t term = 0;  // sender's current term

    // propose / vote
    ProposalRef proposal;
    sim::Action action;
    bool approve = false;

    // vote_request
    std::uint64_t last_log_index = 0;
    std::uint64_t last_log_term = 0;

    // vote_grant
    bool granted = false;

    // heartbeat (append entries)
    std::uint64_t prev_index = 0;
    std::uint64_t prev_term = 0;
    std::uint64_t leader_commit = 0;
    std::vector<LogEntry> entries;

    // append_ack
    bool success = false;
    std::uint64_t match_index = 0;
};

enum class BallotOutcome { pending, committed, rejected };
enum class BallotReason { none, vote_denied, vote_timeout, not_leader };

std::string_view to_string(BallotOutcome outcome);
std::string_view to_string(BallotReason reason);

struct Ballot {
    ProposalRef ref;
    sim::Action action;
    std::map<int, bool> votes;
    BallotOutcome outcome = BallotOutcome::pending;
    BallotReason reason = BallotReason::none;
    std::uint64_t opened_at = 0;
    std::uint64_t log_index = 0;  // set when a committed ballot is appended

    int approvals() const;
};

/// Local feasibility verdict of `peer` on `action`.
using Feasibility = std::function<bool(int peer, const sim::Action& action)>;

/// Receives protocol events for safety bookkeeping.
class Observer {
public:
    virtual ~Observer() = default;
    virtual void on_leader(int peer, std::uint64_t term) = 0;
    virtual void on_grant(int voter, std::uint64_t term, int candidate) = 0;
    virtual void on_tally(const Ballot& ballot, int quorum) = 0;
    virtual void on_truncate(int peer, std::uint64_t new_size, std::uint64_t commit_index) = 0;
};

/// One manager's Raft state machine. Every transition consumes an event and
/// returns the messages it wants sent; delivery is the caller's business.
class Peer {
public:
    Peer(int id, std::vector<int> managers, std::uint64_t election_timeout);

    int id() const { return id_; }
    std::uint64_t term() const { return term_; }
    PeerRole role() const { return role_; }
    std::optional<int> voted_for() const { return voted_for_; }
    const std::vector<LogEntry>& log() const { return log_; }
    std::uint64_t commit_index() const { return commit_index_; }
    bool alive() const { return alive_; }
    std::uint64_t election_timeout() const { return election_timeout_; }
    std::uint64_t elapsed() const { return elapsed_; }
    int quorum() const { return static_cast<int>(managers_.size()) / 2 + 1; }
    const std::vector<int>& managers() const { return managers_; }

    void set_observer(Observer* observer) { observer_ = observer; }

    /// Installs this peer as the leader of `term` without an election.
    void bootstrap_leader(std::uint64_t term);
    void bootstrap_follower(std::uint64_t term, int leader);

    std::vector<Message> receive(const Message& msg, const Feasibility& feasible, std::uint64_t now);

    /// Timer advance for one round. Followers and candidates start an election
    /// when the timeout elapses; leaders broadcast every `heartbeat_interval`.
    std::vector<Message> on_round(std::uint64_t heartbeat_interval);

    std::vector<Message> start_election();
    void set_election_timeout(std::uint64_t rounds) { election_timeout_ = rounds; }
    bool election_due() const { return role_ != PeerRole::leader && elapsed_ >= election_timeout_; }

    std::vector<Message> propose(const sim::Action& action, const Feasibility& feasible, std::uint64_t now,
                                 ProposalRef* ref);

    /// Decides pending ballots that have a majority either way, heard from
    /// every alive manager, or timed out.
    std::vector<Message> tally(std::uint64_t now, int alive_managers, std::uint64_t ballot_timeout);

    const Ballot* ballot(const ProposalRef& ref) const;

    void crash();
    void restart(std::uint64_t election_timeout);

private:
    std::vector<Message> on_propose(const Message& msg, const Feasibility& feasible);
    std::vector<Message> on_vote(const Message& msg);
    std::vector<Message> on_vote_request(const Message& msg);
    std::vector<Message> on_vote_grant(const Message& msg);
    std::vector<Message> on_heartbeat(const Message& msg);
    std::vector<Message> on_append_ack(const Message& msg);

    void adopt_term(std::uint64_t term);
    void step_down(std::uint64_t term);
    std::vector<Message> become_leader();
    Message append_for(int follower) const;
    std::vector<Message> broadcast_append() const;
    void advance_commit();
    std::uint64_t last_log_term() const { return log_.empty() ? 0 : log_.back().term; }
    void prune_ballots();

    int id_;
    std::vector<int> managers_;
    bool alive_ = true;

    std::uint64_t term_ = 0;
    PeerRole role_ = PeerRole::follower;
    std::optional<int> voted_for_;
    std::vector<LogEntry> log_;
    std::uint64_t commit_index_ = 0;

    std::uint64_t election_timeout_;
    std::uint64_t elapsed_ = 0;
    std::uint64_t since_heartbeat_ = 0;

    std::set<int> grants_;
    std::map<int, std::uint64_t> next_index_;
    std::map<int, std::uint64_t> match_index_;
    std::uint64_t proposal_seq_ = 0;
    std::map<ProposalRef, Ballot> ballots_;
    std::map<std::pair<std::uint64_t, std::uint64_t>, bool> ballot_votes_;

    Observer* observer_ = nullptr;
};

}  // namespace adaptswarm::raft
