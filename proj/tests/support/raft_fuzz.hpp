#pragma once

// Randomized gate workload: lossy, delayed links, leader crashes and restarts,
// proposals every step. Safety is judged by the gate's own monitor plus a
// check that no rejected ballot ever reaches a log.

#include <string>
#include <vector>

#include "adaptswarm/raft/gate.hpp"
#include "adaptswarm/raft/monitor.hpp"

namespace adaptswarm::testing {

inline bool in_any_log(const raft::Gate& g, const raft::ProposalRef& ref) {
    for (const raft::Peer& p : g.peers()) {
        for (const raft::LogEntry& e : p.log()) {
            if (e.origin == ref && e.action) return true;
        }
    }
    return false;
}

struct FuzzOutcome {
    bool monitor_ok = true;
    std::vector<std::string> violations;
    int rejected_in_log = 0;
    int committed = 0;
    int leader_crashes = 0;
};

/// One run on 3 managers (even seeds) or 5 (odd seeds). Drop probability is
/// drawn from [0, 0.3], extra delay from 0..3 rounds, and the leader is
/// crashed at a scheduled step plus at random afterwards.
inline FuzzOutcome fuzz_gate(std::uint64_t seed, int steps = 40) {
    Rng chaos(seed * 7 + 1);
    const int n = seed % 2 ? 5 : 3;
    std::vector<int> ids;
    for (int i = 0; i < n; ++i) ids.push_back(i);
    raft::FaultProfile f;
    f.drop_probability = 0.3 * static_cast<double>(chaos() % 101) / 100.0;
    f.max_delay = chaos() % 4;
    raft::Gate g(ids, {}, f, seed);
    g.set_feasibility([&chaos](int, const sim::Action&) { return chaos() % 5 != 0; });
    const sim::Action action{sim::ActionKind::scale_out, 0};
    const int scheduled_crash = static_cast<int>(chaos() % 10);

    FuzzOutcome out;
    for (int step = 0; step < steps; ++step) {
        if (const auto l = g.leader(); l && (step == scheduled_crash || chaos() % 6 == 0)) {
            g.crash(*l);
            ++out.leader_crashes;
        }
        if (chaos() % 4 == 0) g.restart(static_cast<int>(chaos() % static_cast<std::uint64_t>(n)));
        if (g.leader()) {
            const auto ref = g.propose(action);
            g.rounds(5);
            const auto s = g.ballot(ref);
            if (s.outcome == raft::BallotOutcome::rejected && in_any_log(g, ref)) ++out.rejected_in_log;
            if (s.outcome == raft::BallotOutcome::committed) ++out.committed;
        } else {
            g.rounds(5);
        }
    }
    out.monitor_ok = g.monitor().ok();
    out.violations = g.monitor().violations();
    return out;
}

}  // namespace adaptswarm::testing
