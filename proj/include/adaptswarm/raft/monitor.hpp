#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "adaptswarm/raft/peer.hpp"

namespace adaptswarm::raft {

/// Records protocol events and flags any breach of election safety, vote
/// uniqueness, the majority rule or commit safety.
class SafetyMonitor : public Observer {
public:
    void on_leader(int peer, std::uint64_t term) override;
    void on_grant(int voter, std::uint64_t term, int candidate) override;
    void on_tally(const Ballot& ballot, int quorum) override;
    void on_truncate(int peer, std::uint64_t new_size, std::uint64_t commit_index) override;

    /// Checks committed prefixes of all peers against what was seen before,
    /// and that every leader holds all entries committed in earlier terms.
    void observe(const std::vector<Peer>& peers);

    bool ok() const { return violations_.empty(); }
    const std::vector<std::string>& violations() const { return violations_; }
    std::size_t committed_entries() const { return committed_.size(); }
    std::size_t elections() const { return leaders_.size(); }

private:
    struct Committed {
        LogEntry entry;
        std::uint64_t observed_term;  // term of the peer that first reported it
    };

    void flag(std::string message);

    std::map<std::uint64_t, int> leaders_;
    std::map<std::pair<int, std::uint64_t>, int> grants_;
    std::vector<Committed> committed_;  // by log index − 1
    std::map<int, std::uint64_t> verified_;         // per peer, prefix already compared
    std::map<std::pair<int, std::uint64_t>, bool> checked_leaders_;
    std::vector<std::string> violations_;
};

}  // namespace adaptswarm::raft
