#include "adaptswarm/raft/peer.hpp"

#include <algorithm>

namespace adaptswarm::raft {

namespace {

constexpr std::size_t kMaxEntriesPerAppend = 64;
constexpr std::size_t kBallotHistory = 256;

}  // namespace

std::string_view to_string(PeerRole role) {
    switch (role) {
        case PeerRole::follower: return "follower";
        case PeerRole::candidate: return "candidate";
        case PeerRole::leader: return "leader";
    }
    return "?";
}

std::string_view to_string(MessageKind kind) {
    switch (kind) {
        case MessageKind::propose: return "propose";
        case MessageKind::vote: return "vote";
        case MessageKind::vote_request: return "vote_request";
        case MessageKind::vote_grant: return "vote_grant";
        case MessageKind::heartbeat: return "heartbeat";
        case MessageKind::append_ack: return "append_ack";
    }
    return "?";
}

std::string_view to_string(BallotOutcome outcome) {
    switch (outcome) {
        case BallotOutcome::pending: return "pending";
        case BallotOutcome::committed: return "committed";
        case BallotOutcome::rejected: return "rejected";
    }
    return "?";
}

std::string_view to_string(BallotReason reason) {
    switch (reason) {
        case BallotReason::none: return "none";
        case BallotReason::vote_denied: return "vote_denied";
        case BallotReason::vote_timeout: return "vote_timeout";
        case BallotReason::not_leader: return "not_leader";
    }
    return "?";
}

int Ballot::approvals() const {
    return static_cast<int>(std::count_if(votes.begin(), votes.end(), [](const auto& v) { return v.second; }));
}

Peer::Peer(int id, std::vector<int> managers, std::uint64_t election_timeout)
    : id_(id), managers_(std::move(managers)), election_timeout_(election_timeout) {}

void Peer::bootstrap_leader(std::uint64_t term) {
    term_ = term;
    voted_for_ = id_;
    role_ = PeerRole::leader;
    for (int m : managers_) {
        next_index_[m] = log_.size() + 1;
        match_index_[m] = 0;
    }
    match_index_[id_] = log_.size();
    if (observer_) observer_->on_leader(id_, term_);
}

void Peer::bootstrap_follower(std::uint64_t term, int leader) {
    term_ = term;
    voted_for_ = leader;
    role_ = PeerRole::follower;
}

void Peer::adopt_term(std::uint64_t term) {
    if (term <= term_) return;
    term_ = term;
    voted_for_.reset();
    ballot_votes_.clear();
    if (role_ != PeerRole::follower) step_down(term);
}

void Peer::step_down(std::uint64_t term) {
    term_ = std::max(term_, term);
    if (role_ == PeerRole::leader) {
        for (auto& [ref, b] : ballots_) {
            if (b.outcome == BallotOutcome::pending) {
                b.outcome = BallotOutcome::rejected;
                b.reason = BallotReason::not_leader;
            }
        }
    }
    role_ = PeerRole::follower;
    elapsed_ = 0;
}

std::vector<Message> Peer::receive(const Message& msg, const Feasibility& feasible, std::uint64_t) {
    if (!alive_) return {};
    switch (msg.kind) {
        case MessageKind::propose: return on_propose(msg, feasible);
        case MessageKind::vote: return on_vote(msg);
        case MessageKind::vote_request: return on_vote_request(msg);
        case MessageKind::vote_grant: return on_vote_grant(msg);
        case MessageKind::heartbeat: return on_heartbeat(msg);
        case MessageKind::append_ack: return on_append_ack(msg);
    }
    return {};
}

std::vector<Message> Peer::on_round(std::uint64_t heartbeat_interval) {
    if (!alive_) return {};
    if (role_ == PeerRole::leader) {
        if (++since_heartbeat_ >= heartbeat_interval) {
            since_heartbeat_ = 0;
            return broadcast_append();
        }
        return {};
    }
    ++elapsed_;
    return {};
}

std::vector<Message> Peer::start_election() {
    ++term_;
    role_ = PeerRole::candidate;
    voted_for_ = id_;
    ballot_votes_.clear();
    elapsed_ = 0;
    grants_ = {id_};
    if (observer_) observer_->on_grant(id_, term_, id_);
    if (static_cast<int>(grants_.size()) >= quorum()) return become_leader();

    std::vector<Message> out;
    for (int m : managers_) {
        if (m == id_) continue;
        Message req;
        req.kind = MessageKind::vote_request;
        req.from = id_;
        req.to = m;
        req.term = term_;
        req.last_log_index = log_.size();
        req.last_log_term = last_log_term();
        out.push_back(std::move(req));
    }
    return out;
}

std::vector<Message> Peer::on_vote_request(const Message& msg) {
    adopt_term(msg.term);
    const bool up_to_date = msg.last_log_term > last_log_term() ||
                            (msg.last_log_term == last_log_term() && msg.last_log_index >= log_.size());
    const bool grant = msg.term == term_ && role_ == PeerRole::follower &&
                       (!voted_for_ || *voted_for_ == msg.from) && up_to_date;
    if (grant) {
        voted_for_ = msg.from;
        elapsed_ = 0;
        if (observer_) observer_->on_grant(id_, term_, msg.from);
    }
    Message reply;
    reply.kind = MessageKind::vote_grant;
    reply.from = id_;
    reply.to = msg.from;
    reply.term = term_;
    reply.granted = grant;
    return {reply};
}

std::vector<Message> Peer::on_vote_grant(const Message& msg) {
    if (msg.term > term_) {
        adopt_term(msg.term);
        return {};
    }
    if (role_ != PeerRole::candidate || msg.term != term_ || !msg.granted) return {};
    grants_.insert(msg.from);
    if (static_cast<int>(grants_.size()) >= quorum()) return become_leader();
    return {};
}

std::vector<Message> Peer::become_leader() {
    role_ = PeerRole::leader;
    since_heartbeat_ = 0;
    for (int m : managers_) {
        next_index_[m] = log_.size() + 1;
        match_index_[m] = 0;
    }
    if (observer_) observer_->on_leader(id_, term_);
    // An entry of the new term lets earlier entries commit through it.
    log_.push_back(LogEntry{term_, std::nullopt, {}});
    match_index_[id_] = log_.size();
    advance_commit();
    return broadcast_append();
}

Message Peer::append_for(int follower) const {
    Message m;
    m.kind = MessageKind::heartbeat;
    m.from = id_;
    m.to = follower;
    m.term = term_;
    const std::uint64_t next = next_index_.at(follower);
    m.prev_index = next - 1;
    m.prev_term = m.prev_index == 0 ? 0 : log_[m.prev_index - 1].term;
    const std::size_t end = std::min(log_.size(), static_cast<std::size_t>(m.prev_index) + kMaxEntriesPerAppend);
    m.entries.assign(log_.begin() + static_cast<long>(m.prev_index), log_.begin() + static_cast<long>(end));
    m.leader_commit = commit_index_;
    return m;
}

std::vector<Message> Peer::broadcast_append() const {
    std::vector<Message> out;
    for (int m : managers_) {
        if (m != id_) out.push_back(append_for(m));
    }
    return out;
}

std::vector<Message> Peer::on_heartbeat(const Message& msg) {
    Message ack;
    ack.kind = MessageKind::append_ack;
    ack.from = id_;
    ack.to = msg.from;
    if (msg.term < term_) {
        ack.term = term_;
        return {ack};
    }
    adopt_term(msg.term);
    if (role_ != PeerRole::follower) step_down(msg.term);
    elapsed_ = 0;
    ack.term = term_;

    if (msg.prev_index > log_.size() ||
        (msg.prev_index > 0 && log_[msg.prev_index - 1].term != msg.prev_term)) {
        ack.match_index = std::min<std::uint64_t>(log_.size(), msg.prev_index == 0 ? 0 : msg.prev_index - 1);
        return {ack};
    }
    for (std::size_t i = 0; i < msg.entries.size(); ++i) {
        const std::size_t idx = msg.prev_index + i + 1;
        if (idx <= log_.size() && log_[idx - 1].term != msg.entries[i].term) {
            log_.resize(idx - 1);
            if (observer_) observer_->on_truncate(id_, log_.size(), commit_index_);
        }
        if (idx > log_.size()) log_.push_back(msg.entries[i]);
    }
    const std::uint64_t last_new = msg.prev_index + msg.entries.size();
    if (msg.leader_commit > commit_index_) commit_index_ = std::max(commit_index_, std::min(msg.leader_commit, last_new));
    ack.success = true;
    ack.match_index = last_new;
    return {ack};
}

std::vector<Message> Peer::on_append_ack(const Message& msg) {
    if (msg.term > term_) {
        adopt_term(msg.term);
        return {};
    }
    if (role_ != PeerRole::leader || msg.term != term_) return {};
    if (msg.success) {
        match_index_[msg.from] = std::max(match_index_[msg.from], msg.match_index);
        next_index_[msg.from] = match_index_[msg.from] + 1;
        advance_commit();
        if (next_index_[msg.from] <= log_.size()) return {append_for(msg.from)};
        return {};
    }
    const std::uint64_t current = next_index_[msg.from];
    next_index_[msg.from] = std::max<std::uint64_t>(1, std::min(current - 1, msg.match_index + 1));
    return {append_for(msg.from)};
}

void Peer::advance_commit() {
    for (std::uint64_t n = log_.size(); n > commit_index_; --n) {
        if (log_[n - 1].term != term_) break;
        int replicated = 0;
        for (int m : managers_) {
            const std::uint64_t match = m == id_ ? log_.size() : match_index_[m];
            if (match >= n) ++replicated;
        }
        if (replicated >= quorum()) {
            commit_index_ = n;
            return;
        }
    }
}

std::vector<Message> Peer::propose(const sim::Action& action, const Feasibility& feasible, std::uint64_t now,
                                   ProposalRef* ref) {
    if (!alive_ || role_ != PeerRole::leader) {
        throw NotLeader("peer " + std::to_string(id_) + " is not the leader");
    }
    Ballot b;
    b.ref = {term_, ++proposal_seq_, id_};
    b.action = action;
    b.opened_at = now;
    b.votes[id_] = feasible ? feasible(id_, action) : true;
    if (ref) *ref = b.ref;

    std::vector<Message> out;
    for (int m : managers_) {
        if (m == id_) continue;
        Message p;
        p.kind = MessageKind::propose;
        p.from = id_;
        p.to = m;
        p.term = term_;
        p.proposal = b.ref;
        p.action = action;
        out.push_back(std::move(p));
    }
    ballots_.emplace(b.ref, std::move(b));
    prune_ballots();
    return out;
}

std::vector<Message> Peer::on_propose(const Message& msg, const Feasibility& feasible) {
    Message vote;
    vote.kind = MessageKind::vote;
    vote.from = id_;
    vote.to = msg.from;
    vote.proposal = msg.proposal;
    if (msg.term < term_) {
        vote.term = term_;
        vote.approve = false;
        return {vote};
    }
    adopt_term(msg.term);
    if (role_ != PeerRole::follower) step_down(msg.term);
    elapsed_ = 0;
    vote.term = term_;
    const auto key = std::make_pair(msg.proposal.term, msg.proposal.index);
    auto it = ballot_votes_.find(key);
    if (it == ballot_votes_.end()) {
        it = ballot_votes_.emplace(key, feasible ? feasible(id_, msg.action) : true).first;
    }
    vote.approve = it->second;
    return {vote};
}

std::vector<Message> Peer::on_vote(const Message& msg) {
    if (msg.term > term_) {
        adopt_term(msg.term);
        return {};
    }
    auto it = ballots_.find(msg.proposal);
    if (it == ballots_.end() || it->second.outcome != BallotOutcome::pending) return {};
    it->second.votes.emplace(msg.from, msg.approve);
    return {};
}

std::vector<Message> Peer::tally(std::uint64_t now, int alive_managers, std::uint64_t ballot_timeout) {
    std::vector<Message> out;
    const int n = static_cast<int>(managers_.size());
    for (auto& [ref, b] : ballots_) {
        if (b.outcome != BallotOutcome::pending) continue;
        const int yes = b.approvals();
        const int no = static_cast<int>(b.votes.size()) - yes;
        const bool all_heard = static_cast<int>(b.votes.size()) >= alive_managers;
        const bool timed_out = now - b.opened_at >= ballot_timeout;
        if (role_ != PeerRole::leader || ref.term != term_) {
            b.outcome = BallotOutcome::rejected;
            b.reason = BallotReason::not_leader;
        } else if (yes >= quorum()) {
            b.outcome = BallotOutcome::committed;
            log_.push_back(LogEntry{term_, b.action, ref});
            b.log_index = log_.size();
            match_index_[id_] = log_.size();
            advance_commit();
            auto msgs = broadcast_append();
            out.insert(out.end(), msgs.begin(), msgs.end());
        } else if (no > n - quorum() || all_heard) {
            b.outcome = BallotOutcome::rejected;
            b.reason = BallotReason::vote_denied;
        } else if (timed_out) {
            b.outcome = BallotOutcome::rejected;
            b.reason = BallotReason::vote_timeout;
        } else {
            continue;
        }
        if (observer_) observer_->on_tally(b, quorum());
    }
    return out;
}

const Ballot* Peer::ballot(const ProposalRef& ref) const {
    auto it = ballots_.find(ref);
    return it == ballots_.end() ? nullptr : &it->second;
}

void Peer::prune_ballots() {
    while (ballots_.size() > kBallotHistory && ballots_.begin()->second.outcome != BallotOutcome::pending) {
        ballots_.erase(ballots_.begin());
    }
}

void Peer::crash() {
    alive_ = false;
}

void Peer::restart(std::uint64_t election_timeout) {
    alive_ = true;
    // Term, vote and log survive the crash; volatile leadership does not.
    if (role_ == PeerRole::leader) step_down(term_);
    role_ = PeerRole::follower;
    elapsed_ = 0;
    election_timeout_ = election_timeout;
}

}  // namespace adaptswarm::raft
