#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adaptswarm/rng.hpp"
#include "adaptswarm/sim/config.hpp"

namespace adaptswarm::sim {

enum class Role { leader, manager, worker };

std::string_view to_string(Role role);

struct NodeState {
    int id = 0;
    Role role = Role::worker;
    bool alive = true;
    double cpu_capacity = 0.0;
    double mem_capacity = 0.0;
    double disk_capacity = 0.0;
    double net_capacity = 0.0;
    double disk_used = 0.0;  // fraction of disk_capacity

    bool is_manager() const { return role != Role::worker; }
    bool operator==(const NodeState&) const = default;
};

struct Replica {
    int node = 0;
    bool healthy = true;
    bool operator==(const Replica&) const = default;
};

struct ServiceState {
    int id = 0;
    double cpu_limit = 0.0;
    double mem_limit = 0.0;
    bool split = false;
    std::vector<Replica> replicas;

    int replica_count() const { return static_cast<int>(replicas.size()); }
    int healthy_count() const;
    bool operator==(const ServiceState&) const = default;
};

struct NodeMetrics {
    double cpu_util = 0.0;   // [0, 1.2]
    double mem_util = 0.0;   // [0, 1.2]
    double disk_util = 0.0;  // [0, 1]
    double net_util = 0.0;   // [0, 1.2]
    bool operator==(const NodeMetrics&) const = default;
};

struct ServiceMetrics {
    double demand = 0.0;    // millicores
    double cpu_util = 0.0;  // [0, 1.2]
    bool operator==(const ServiceMetrics&) const = default;
};

struct MetricsSample {
    std::uint64_t clock = 0;
    std::vector<NodeMetrics> nodes;
    std::vector<ServiceMetrics> services;
    bool operator==(const MetricsSample&) const = default;
};

inline constexpr double kUtilCeiling = 1.2;

struct ClusterState {
    ClusterConfig config;
    std::vector<NodeState> nodes;
    std::vector<ServiceState> services;
    std::uint64_t clock = 0;
    Rng rng;
    MetricsSample last;

    std::optional<int> leader() const;
    /// Everything except the configuration, compared exactly.
    bool same_state(const ClusterState& other) const;
};

/// All nodes alive, node 0 the leader, replicas placed, clock 0 and an
/// initial metrics sample. Throws ConfigError on an invalid config.
ClusterState init_cluster(const ClusterConfig& config, std::uint64_t seed);

/// base + amplitude·sin(2πt/period) + σ·N(0,1), times the spike multiplier on
/// a spike, clamped at zero. Always consumes one normal and one uniform draw.
double demand(const WorkloadModel& model, std::uint64_t t, Rng& rng);

/// Advances the clock one tick: node failures, fresh demand, fresh metrics.
const MetricsSample& tick(ClusterState& state);

/// Recomputes metrics for the current placement from given demands without
/// drawing from the generator.
MetricsSample measure(const ClusterState& state, const std::vector<double>& demands);

enum class ActionKind {
    noop,
    scale_out,
    scale_in,
    scale_up_cpu,
    scale_down_cpu,
    scale_up_mem,
    scale_down_mem,
    compose_split,
    compose_merge,
    auto_recover,
};

inline constexpr int kActionKinds = 10;

std::string_view to_string(ActionKind kind);

struct Action {
    ActionKind kind = ActionKind::noop;
    int service = 0;  // ignored by noop and auto_recover
    bool operator==(const Action&) const = default;
};

enum class RejectReason { at_bound, insufficient_capacity, no_failed_node };

std::string_view to_string(RejectReason reason);

/// Simulated seconds charged per action.
struct DurationTable {
    double noop = 1.0;
    double horizontal = 5.0;
    double vertical = 3.0;
    double compose = 8.0;
    double recover = 10.0;

    double seconds(ActionKind kind) const;
};

struct ActionOutcome {
    bool applied = false;
    std::optional<RejectReason> reason;
    double duration = 0.0;
};

/// Applies the action if it is feasible. A rejected action leaves the state
/// untouched; rejection is reported as data, not thrown.
ActionOutcome apply_action(ClusterState& state, const Action& action, const DurationTable& durations = {});

/// Dry run of apply_action on a copy.
ActionOutcome check_action(const ClusterState& state, const Action& action);

/// Kills a node; its replicas become unhealthy. Throws PreconditionError on an
/// unknown id.
void inject_failure(ClusterState& state, int node_id);

/// Revives a node and reschedules every unhealthy replica onto alive nodes.
void recover(ClusterState& state, int node_id);

void set_leader(ClusterState& state, std::optional<int> node_id);

bool is_converged(const ClusterState& state, const SloBand& slo, bool action_rejected);
bool is_converged(const ClusterState& state, bool action_rejected);

/// Σ_services max(0, util − high) + max(0, low − util) over the last sample.
double slo_violation(const MetricsSample& sample, const SloBand& slo);

/// Deterministic text dump of the full state including generator state.
std::string snapshot(const ClusterState& state);

double reserved_cpu(const ClusterState& state, int node_id);
double reserved_mem(const ClusterState& state, int node_id);

}  // namespace adaptswarm::sim
