#include <algorithm>
#include <cmath>

#include "adaptswarm/errors.hpp"
#include "adaptswarm/sim/cluster.hpp"
#include "placement.hpp"

namespace adaptswarm::sim {

namespace detail {

namespace {
constexpr double kSlack = 1e-9;
}

Ledger::Ledger(const ClusterState& state) : state_(state) {
    const std::size_t n = state.nodes.size();
    util_.assign(n, 0.0);
    cpu_.assign(n, 0.0);
    mem_.assign(n, 0.0);
    if (state.last.nodes.size() == n) {
        for (std::size_t i = 0; i < n; ++i) util_[i] = state.last.nodes[i].cpu_util;
    }
    for (const ServiceState& s : state.services) {
        for (const Replica& r : s.replicas) {
            cpu_[static_cast<std::size_t>(r.node)] += s.cpu_limit;
            mem_[static_cast<std::size_t>(r.node)] += s.mem_limit;
        }
    }
}

std::optional<int> Ledger::place(double cpu_limit, double mem_limit) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < state_.nodes.size(); ++i) {
        const NodeState& node = state_.nodes[i];
        if (!node.alive) continue;
        if (cpu_[i] + cpu_limit > node.cpu_capacity + kSlack) continue;
        if (mem_[i] + mem_limit > node.mem_capacity + kSlack) continue;
        if (!best || util_[i] < util_[*best]) best = i;
    }
    if (!best) return std::nullopt;
    cpu_[*best] += cpu_limit;
    mem_[*best] += mem_limit;
    util_[*best] += cpu_limit / state_.nodes[*best].cpu_capacity;
    return static_cast<int>(*best);
}

void Ledger::release(int node, double cpu_limit, double mem_limit) {
    const auto i = static_cast<std::size_t>(node);
    cpu_[i] -= cpu_limit;
    mem_[i] -= mem_limit;
    util_[i] = std::max(0.0, util_[i] - cpu_limit / state_.nodes[i].cpu_capacity);
}

std::size_t removal_victim(const ServiceState& service, const Ledger& ledger) {
    for (std::size_t i = 0; i < service.replicas.size(); ++i) {
        if (!service.replicas[i].healthy) return i;
    }
    std::size_t victim = 0;
    for (std::size_t i = 1; i < service.replicas.size(); ++i) {
        if (ledger.util(service.replicas[i].node) >= ledger.util(service.replicas[victim].node)) victim = i;
    }
    return victim;
}

void refresh_health(ClusterState& state) {
    for (ServiceState& s : state.services) {
        for (Replica& r : s.replicas) r.healthy = state.nodes[static_cast<std::size_t>(r.node)].alive;
    }
}

}  // namespace detail

std::string_view to_string(ActionKind kind) {
    switch (kind) {
        case ActionKind::noop: return "NoOpPreserveState";
        case ActionKind::scale_out: return "ScaleOut";
        case ActionKind::scale_in: return "ScaleIn";
        case ActionKind::scale_up_cpu: return "ScaleUpCpu";
        case ActionKind::scale_down_cpu: return "ScaleDownCpu";
        case ActionKind::scale_up_mem: return "ScaleUpMem";
        case ActionKind::scale_down_mem: return "ScaleDownMem";
        case ActionKind::compose_split: return "ComposeSplit";
        case ActionKind::compose_merge: return "ComposeMerge";
        case ActionKind::auto_recover: return "AutoRecover";
    }
    return "?";
}

std::string_view to_string(RejectReason reason) {
    switch (reason) {
        case RejectReason::at_bound: return "at_bound";
        case RejectReason::insufficient_capacity: return "insufficient_capacity";
        case RejectReason::no_failed_node: return "no_failed_node";
    }
    return "?";
}

double DurationTable::seconds(ActionKind kind) const {
    switch (kind) {
        case ActionKind::noop: return noop;
        case ActionKind::scale_out:
        case ActionKind::scale_in: return horizontal;
        case ActionKind::scale_up_cpu:
        case ActionKind::scale_down_cpu:
        case ActionKind::scale_up_mem:
        case ActionKind::scale_down_mem: return vertical;
        case ActionKind::compose_split:
        case ActionKind::compose_merge: return compose;
        case ActionKind::auto_recover: return recover;
    }
    return 0.0;
}

namespace {

using detail::Ledger;

constexpr double kSlack = 1e-9;

bool fits_everywhere(const ClusterState& s) {
    for (const NodeState& n : s.nodes) {
        if (reserved_cpu(s, n.id) > n.cpu_capacity + kSlack) return false;
        if (reserved_mem(s, n.id) > n.mem_capacity + kSlack) return false;
    }
    return true;
}

void reclaim_disk(ClusterState& s) {
    for (NodeState& n : s.nodes) {
        if (n.alive) n.disk_used = std::max(0.0, n.disk_used - s.config.disk_reclaim);
    }
}

void remove_replicas(ServiceState& svc, int count, Ledger& ledger) {
    for (int k = 0; k < count; ++k) {
        const std::size_t victim = detail::removal_victim(svc, ledger);
        ledger.release(svc.replicas[victim].node, svc.cpu_limit, svc.mem_limit);
        svc.replicas.erase(svc.replicas.begin() + static_cast<long>(victim));
    }
}

std::optional<RejectReason> resize(ClusterState& s, ServiceState& svc, bool cpu, bool up) {
    const ClusterConfig& c = s.config;
    double& limit = cpu ? svc.cpu_limit : svc.mem_limit;
    const double lo = cpu ? c.cpu_limit_min : c.mem_limit_min;
    const double hi = cpu ? c.cpu_limit_max : c.mem_limit_max;
    if (up ? limit >= hi - kSlack : limit <= lo + kSlack) return RejectReason::at_bound;
    limit = up ? std::min(hi, limit * (1.0 + c.vertical_step)) : std::max(lo, limit * (1.0 - c.vertical_step));
    if (!fits_everywhere(s)) return RejectReason::insufficient_capacity;
    return std::nullopt;
}

std::optional<RejectReason> mutate(ClusterState& s, const Action& a) {
    const ClusterConfig& c = s.config;
    if (a.kind == ActionKind::noop) return std::nullopt;
    if (a.kind == ActionKind::auto_recover) {
        for (const NodeState& n : s.nodes) {
            if (!n.alive) {
                recover(s, n.id);
                return std::nullopt;
            }
        }
        return RejectReason::no_failed_node;
    }

    if (a.service < 0 || static_cast<std::size_t>(a.service) >= s.services.size()) {
        throw PreconditionError("action targets unknown service " + std::to_string(a.service));
    }
    ServiceState& svc = s.services[static_cast<std::size_t>(a.service)];
    Ledger ledger(s);

    switch (a.kind) {
        case ActionKind::scale_out: {
            if (svc.replica_count() >= c.max_replicas) return RejectReason::at_bound;
            const auto node = ledger.place(svc.cpu_limit, svc.mem_limit);
            if (!node) return RejectReason::insufficient_capacity;
            svc.replicas.push_back({*node, true});
            reclaim_disk(s);
            return std::nullopt;
        }
        case ActionKind::scale_in:
            if (svc.replica_count() <= c.min_replicas) return RejectReason::at_bound;
            remove_replicas(svc, 1, ledger);
            reclaim_disk(s);
            return std::nullopt;
        case ActionKind::scale_up_cpu: return resize(s, svc, true, true);
        case ActionKind::scale_down_cpu: return resize(s, svc, true, false);
        case ActionKind::scale_up_mem: return resize(s, svc, false, true);
        case ActionKind::scale_down_mem: return resize(s, svc, false, false);
        case ActionKind::compose_split: {
            const int r = svc.replica_count();
            if (svc.split || 2 * r > c.max_replicas || svc.cpu_limit / 2.0 < c.cpu_limit_min - kSlack ||
                svc.mem_limit / 2.0 < c.mem_limit_min - kSlack) {
                return RejectReason::at_bound;
            }
            svc.cpu_limit /= 2.0;
            svc.mem_limit /= 2.0;
            Ledger halved(s);
            for (int k = 0; k < r; ++k) {
                const auto node = halved.place(svc.cpu_limit, svc.mem_limit);
                if (!node) return RejectReason::insufficient_capacity;
                svc.replicas.push_back({*node, true});
            }
            svc.split = true;
            reclaim_disk(s);
            return std::nullopt;
        }
        case ActionKind::compose_merge: {
            if (!svc.split || svc.cpu_limit * 2.0 > c.cpu_limit_max + kSlack ||
                svc.mem_limit * 2.0 > c.mem_limit_max + kSlack) {
                return RejectReason::at_bound;
            }
            const int r = svc.replica_count();
            const int keep = std::max(c.min_replicas, (r + 1) / 2);
            remove_replicas(svc, r - keep, ledger);
            svc.cpu_limit *= 2.0;
            svc.mem_limit *= 2.0;
            if (!fits_everywhere(s)) return RejectReason::insufficient_capacity;
            svc.split = false;
            reclaim_disk(s);
            return std::nullopt;
        }
        default: break;
    }
    return std::nullopt;
}

}  // namespace

ActionOutcome apply_action(ClusterState& state, const Action& action, const DurationTable& durations) {
    ClusterState next = state;
    ActionOutcome out;
    out.duration = durations.seconds(action.kind);
    out.reason = mutate(next, action);
    out.applied = !out.reason;
    if (out.applied) state = std::move(next);
    return out;
}

ActionOutcome check_action(const ClusterState& state, const Action& action) {
    ClusterState scratch = state;
    ActionOutcome out;
    out.duration = DurationTable{}.seconds(action.kind);
    out.reason = mutate(scratch, action);
    out.applied = !out.reason;
    return out;
}

void recover(ClusterState& state, int node_id) {
    if (node_id < 0 || static_cast<std::size_t>(node_id) >= state.nodes.size()) {
        throw PreconditionError("unknown node id " + std::to_string(node_id));
    }
    state.nodes[static_cast<std::size_t>(node_id)].alive = true;
    detail::refresh_health(state);
    Ledger ledger(state);
    for (ServiceState& s : state.services) {
        for (Replica& r : s.replicas) {
            if (r.healthy) continue;
            const auto node = ledger.place(s.cpu_limit, s.mem_limit);
            if (!node) continue;
            ledger.release(r.node, s.cpu_limit, s.mem_limit);
            r.node = *node;
            r.healthy = true;
        }
    }
}

}  // namespace adaptswarm::sim
