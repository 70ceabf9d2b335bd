#include "adaptswarm/env/environment.hpp"

#include <algorithm>

#include "adaptswarm/errors.hpp"

namespace adaptswarm::env {

void validate(const EnvConfig& c) {
    sim::validate(c.cluster);
    raft::validate(c.gate);
    raft::validate(c.faults);
    const RewardConfig& r = c.reward;
    if (r.c_conv < 0 || r.c_fail < 0 || r.c_step < 0 || r.c_viol < 0) {
        throw ConfigError("reward constants must be non-negative");
    }
    const sim::DurationTable& d = c.durations;
    if (d.noop < 0 || d.horizontal < 0 || d.vertical < 0 || d.compose < 0 || d.recover < 0) {
        throw ConfigError("action durations must be non-negative");
    }
    const int services = static_cast<int>(c.cluster.services.size());
    for (int s : {c.binding.horizontal, c.binding.vertical, c.binding.compose}) {
        if (s < 0 || s >= services) throw ConfigError("action binding names unknown service " + std::to_string(s));
    }
    if (c.max_steps < 1) throw ConfigError("env.max_steps must be at least 1");
    if (!(c.gamma >= 0.0 && c.gamma < 1.0)) throw ConfigError("env.gamma must lie in [0, 1)");
    for (const raft::ScheduledCrash& crash : c.faults.crashes) {
        if (crash.node < 0 || crash.node >= c.cluster.node_count()) {
            throw ConfigError("scheduled crash names unknown node " + std::to_string(crash.node));
        }
    }
}

sim::Action action_for(int index, const ActionBinding& b) {
    using K = sim::ActionKind;
    switch (index) {
        case 0: return {K::noop, 0};
        case 1: return {K::scale_out, b.horizontal};
        case 2: return {K::scale_in, b.horizontal};
        case 3: return {K::scale_up_cpu, b.vertical};
        case 4: return {K::scale_down_cpu, b.vertical};
        case 5: return {K::scale_up_mem, b.vertical};
        case 6: return {K::scale_down_mem, b.vertical};
        case 7: return {K::compose_split, b.compose};
        case 8: return {K::compose_merge, b.compose};
        case 9: return {K::auto_recover, 0};
        default: break;
    }
    throw PreconditionError("action index " + std::to_string(index) + " outside [0, 9]");
}

std::size_t observation_size(const sim::ClusterConfig& c) {
    return static_cast<std::size_t>(c.max_nodes) * 4 + c.services.size() * 2;
}

Observation build_observation(const sim::ClusterState& cluster) {
    const sim::ClusterConfig& c = cluster.config;
    Observation obs(observation_size(c), 0.0);
    for (std::size_t i = 0; i < cluster.nodes.size() && i < static_cast<std::size_t>(c.max_nodes); ++i) {
        if (!cluster.nodes[i].alive || i >= cluster.last.nodes.size()) continue;
        const sim::NodeMetrics& m = cluster.last.nodes[i];
        obs[i * 4 + 0] = m.cpu_util;
        obs[i * 4 + 1] = m.mem_util;
        obs[i * 4 + 2] = m.disk_util;
        obs[i * 4 + 3] = m.net_util;
    }
    const std::size_t base = static_cast<std::size_t>(c.max_nodes) * 4;
    for (std::size_t s = 0; s < cluster.services.size(); ++s) {
        obs[base + s * 2] = static_cast<double>(cluster.services[s].replica_count()) / c.max_replicas;
        obs[base + s * 2 + 1] = s < cluster.last.services.size() ? cluster.last.services[s].cpu_util : 0.0;
    }
    return obs;
}

double compute_reward(bool rejected, double violation, bool converged, const RewardConfig& r) {
    return (converged ? r.c_conv : 0.0) - (rejected ? r.c_fail : 0.0) - r.c_step - r.c_viol * violation;
}

double max_violation(const sim::ClusterConfig& c) {
    const double per_service = std::max(sim::kUtilCeiling - c.slo.high, c.slo.low);
    return per_service * static_cast<double>(c.services.size());
}

SwarmEnvironment::SwarmEnvironment(EnvConfig config) : config_(std::move(config)) { validate(config_); }

Observation SwarmEnvironment::reset(std::uint64_t seed) {
    cluster_ = sim::init_cluster(config_.cluster, seed);
    previous_ = cluster_;
    std::vector<int> managers;
    for (const sim::NodeState& n : cluster_->nodes) {
        if (n.is_manager()) managers.push_back(n.id);
    }
    gate_.reset();
    gate_.emplace(managers, config_.gate, config_.faults, seed ^ 0x9e3779b97f4a7c15ULL);
    applied_index_ = 0;
    steps_ = 0;
    done_ = false;
    sync_membership();
    return build_observation(*cluster_);
}

void SwarmEnvironment::apply_scheduled_crashes() {
    for (const raft::ScheduledCrash& crash : config_.faults.crashes) {
        if (crash.tick == cluster_->clock && cluster_->nodes[static_cast<std::size_t>(crash.node)].alive) {
            sim::inject_failure(*cluster_, crash.node);
        }
    }
}

void SwarmEnvironment::sync_membership() {
    for (const sim::NodeState& n : cluster_->nodes) {
        if (!gate_->is_manager(n.id)) continue;
        if (n.alive) {
            gate_->restart(n.id);
        } else {
            gate_->crash(n.id);
        }
    }
    sim::set_leader(*cluster_, gate_->leader());
}

StepResult SwarmEnvironment::step(int action) {
    if (done_) throw ProtocolError("step called on a finished episode; call reset first");
    if (action < 0 || action >= kActionCount) {
        throw PreconditionError("action index " + std::to_string(action) + " outside [0, 9]");
    }
    const sim::Action act = action_for(action, config_.binding);

    apply_scheduled_crashes();
    sync_membership();

    // Followers judge against the previous tick's view, the leader against the current one.
    gate_->set_feasibility([this](int peer, const sim::Action& a) {
        const sim::ClusterState& view = gate_->leader() == peer ? *cluster_ : *previous_;
        return sim::check_action(view, a).applied;
    });

    std::optional<raft::ProposalRef> ref;
    if (gate_->leader()) ref = gate_->propose(act);
    gate_->rounds(config_.gate.rounds_per_step);

    std::optional<sim::ActionOutcome> own;
    for (const raft::LogEntry& entry : gate_->committed_after(applied_index_)) {
        ++applied_index_;
        if (!entry.action) continue;
        const sim::ActionOutcome out = sim::apply_action(*cluster_, *entry.action, config_.durations);
        if (ref && entry.origin == *ref) own = out;
    }

    StepInfo info;
    info.duration = config_.durations.seconds(act.kind);
    if (!ref) {
        info.outcome = "not_leader";
    } else if (own) {
        info.applied = own->applied;
        info.outcome = own->applied ? "applied" : std::string(sim::to_string(*own->reason));
    } else {
        const raft::BallotStatus s = gate_->ballot(*ref);
        if (s.outcome == raft::BallotOutcome::committed) {
            info.outcome = "commit_pending";
        } else if (s.outcome == raft::BallotOutcome::pending) {
            info.outcome = "vote_timeout";
        } else {
            info.outcome = std::string(raft::to_string(s.reason));
        }
    }
    const bool rejected = !info.applied;

    previous_ = cluster_;
    sim::tick(*cluster_);
    sync_membership();

    ++steps_;
    info.converged = sim::is_converged(*cluster_, rejected);
    info.violation = sim::slo_violation(cluster_->last, config_.cluster.slo);
    info.sparse_reward = info.converged ? config_.reward.c_conv : 0.0;

    StepResult result;
    result.reward = compute_reward(rejected, info.violation, info.converged, config_.reward);
    done_ = info.converged || steps_ >= config_.max_steps;
    result.done = done_;
    result.observation = build_observation(*cluster_);
    result.info = std::move(info);
    return result;
}

}  // namespace adaptswarm::env
