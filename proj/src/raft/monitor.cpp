#include "adaptswarm/raft/monitor.hpp"

#include <algorithm>

namespace adaptswarm::raft {

void SafetyMonitor::flag(std::string message) {
    if (violations_.size() < 64) violations_.push_back(std::move(message));
}

void SafetyMonitor::on_leader(int peer, std::uint64_t term) {
    auto [it, inserted] = leaders_.emplace(term, peer);
    if (!inserted && it->second != peer) {
        flag("election safety: peers " + std::to_string(it->second) + " and " + std::to_string(peer) +
             " both led term " + std::to_string(term));
    }
}

void SafetyMonitor::on_grant(int voter, std::uint64_t term, int candidate) {
    auto [it, inserted] = grants_.emplace(std::make_pair(voter, term), candidate);
    if (!inserted && it->second != candidate) {
        flag("vote uniqueness: peer " + std::to_string(voter) + " granted two votes in term " +
             std::to_string(term));
    }
}

void SafetyMonitor::on_tally(const Ballot& ballot, int quorum) {
    if (ballot.outcome == BallotOutcome::committed && ballot.approvals() < quorum) {
        flag("majority rule: ballot (" + std::to_string(ballot.ref.term) + "," + std::to_string(ballot.ref.index) +
             ") committed with " + std::to_string(ballot.approvals()) + " approvals");
    }
}

void SafetyMonitor::on_truncate(int peer, std::uint64_t new_size, std::uint64_t commit_index) {
    if (new_size < commit_index) {
        flag("commit safety: peer " + std::to_string(peer) + " truncated committed entries down to " +
             std::to_string(new_size));
    }
    auto& v = verified_[peer];
    v = std::min(v, new_size);
}

void SafetyMonitor::observe(const std::vector<Peer>& peers) {
    for (const Peer& p : peers) {
        const auto& log = p.log();
        const std::uint64_t commit = std::min<std::uint64_t>(p.commit_index(), log.size());
        auto& verified = verified_[p.id()];
        for (std::uint64_t i = verified; i < commit; ++i) {
            if (i < committed_.size()) {
                if (committed_[i].entry != log[i]) {
                    flag("commit safety: peer " + std::to_string(p.id()) + " committed a different entry at index " +
                         std::to_string(i + 1));
                }
            } else {
                committed_.push_back({log[i], p.term()});
            }
        }
        verified = std::max(verified, commit);
    }
    for (const Peer& p : peers) {
        if (!p.alive() || p.role() != PeerRole::leader) continue;
        if (!checked_leaders_.emplace(std::make_pair(p.id(), p.term()), true).second) continue;
        for (std::size_t i = 0; i < committed_.size(); ++i) {
            if (p.term() <= committed_[i].observed_term) continue;
            if (i >= p.log().size() || p.log()[i] != committed_[i].entry) {
                flag("commit safety: leader " + std::to_string(p.id()) + " of term " + std::to_string(p.term()) +
                     " lacks committed index " + std::to_string(i + 1));
                break;
            }
        }
    }
}

}  // namespace adaptswarm::raft
