#include "adaptswarm/sim/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "adaptswarm/errors.hpp"
#include "adaptswarm/text.hpp"
#include "placement.hpp"

namespace adaptswarm::sim {

std::string_view to_string(Role role) {
    switch (role) {
        case Role::leader: return "leader";
        case Role::manager: return "manager";
        case Role::worker: return "worker";
    }
    return "?";
}

int ServiceState::healthy_count() const {
    return static_cast<int>(std::count_if(replicas.begin(), replicas.end(), [](const Replica& r) { return r.healthy; }));
}

std::optional<int> ClusterState::leader() const {
    for (const NodeState& n : nodes) {
        if (n.role == Role::leader) return n.id;
    }
    return std::nullopt;
}

bool ClusterState::same_state(const ClusterState& other) const {
    return nodes == other.nodes && services == other.services && clock == other.clock && rng == other.rng &&
           last == other.last;
}

double demand(const WorkloadModel& model, std::uint64_t t, Rng& rng) {
    const double noise = std::normal_distribution<double>(0.0, 1.0)(rng);
    const double spike_draw = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double d = model.base +
               model.amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / model.period) +
               model.noise_sigma * noise;
    if (spike_draw < model.spike_probability) d *= model.spike_multiplier;
    return std::max(0.0, d);
}

namespace {

double service_util(const ServiceState& s, double demand_mc) {
    const int healthy = s.healthy_count();
    if (healthy == 0) return demand_mc > 0.0 ? kUtilCeiling : 0.0;
    return std::clamp(demand_mc / (healthy * s.cpu_limit), 0.0, kUtilCeiling);
}

std::vector<double> draw_demands(ClusterState& state) {
    std::vector<double> d;
    d.reserve(state.config.services.size());
    for (const ServiceConfig& s : state.config.services) d.push_back(demand(s.workload, state.clock, state.rng));
    return d;
}

}  // namespace

MetricsSample measure(const ClusterState& state, const std::vector<double>& demands) {
    if (demands.size() != state.services.size()) {
        throw DimensionError("measure got " + std::to_string(demands.size()) + " demands for " +
                             std::to_string(state.services.size()) + " services");
    }
    const ClusterConfig& c = state.config;
    MetricsSample m;
    m.clock = state.clock;
    m.services.resize(state.services.size());

    std::vector<double> cpu_load(state.nodes.size(), 0.0), mem_load(state.nodes.size(), 0.0);
    for (std::size_t i = 0; i < state.services.size(); ++i) {
        const ServiceState& s = state.services[i];
        const double util = service_util(s, demands[i]);
        m.services[i] = {demands[i], util};
        const double resident = s.mem_limit * (c.mem_base + c.mem_ratio * std::min(util, 1.0));
        for (const Replica& r : s.replicas) {
            if (!r.healthy) continue;
            cpu_load[static_cast<std::size_t>(r.node)] += util * s.cpu_limit;
            mem_load[static_cast<std::size_t>(r.node)] += resident;
        }
    }

    m.nodes.resize(state.nodes.size());
    for (std::size_t n = 0; n < state.nodes.size(); ++n) {
        const NodeState& node = state.nodes[n];
        if (!node.alive) continue;
        NodeMetrics& out = m.nodes[n];
        out.cpu_util = std::clamp(cpu_load[n] / node.cpu_capacity, 0.0, kUtilCeiling);
        out.mem_util = std::clamp(mem_load[n] / node.mem_capacity, 0.0, kUtilCeiling);
        out.disk_util = std::clamp(node.disk_used, 0.0, 1.0);
        out.net_util = std::clamp(cpu_load[n] * c.net_per_millicore / node.net_capacity, 0.0, kUtilCeiling);
    }
    return m;
}

ClusterState init_cluster(const ClusterConfig& config, std::uint64_t seed) {
    validate(config);
    ClusterState state;
    state.config = config;
    state.rng.seed(seed);

    for (int id = 0; id < config.node_count(); ++id) {
        NodeState n;
        n.id = id;
        n.role = id == 0 ? Role::leader : (id < config.managers ? Role::manager : Role::worker);
        n.cpu_capacity = config.cpu_capacity;
        n.mem_capacity = config.mem_capacity;
        n.disk_capacity = config.disk_capacity;
        n.net_capacity = config.net_capacity;
        n.disk_used = config.disk_initial;
        state.nodes.push_back(n);
    }

    for (std::size_t i = 0; i < config.services.size(); ++i) {
        const ServiceConfig& sc = config.services[i];
        ServiceState s;
        s.id = static_cast<int>(i);
        s.cpu_limit = sc.cpu_limit;
        s.mem_limit = sc.mem_limit;
        state.services.push_back(s);
    }
    detail::Ledger ledger(state);
    for (ServiceState& s : state.services) {
        for (int k = 0; k < config.services[static_cast<std::size_t>(s.id)].initial_replicas; ++k) {
            const auto node = ledger.place(s.cpu_limit, s.mem_limit);
            if (!node) throw ConfigError("initial replicas of service " + std::to_string(s.id) + " do not fit");
            s.replicas.push_back({*node, true});
        }
    }

    state.last = measure(state, draw_demands(state));
    return state;
}

const MetricsSample& tick(ClusterState& state) {
    ++state.clock;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (NodeState& n : state.nodes) {
        const double draw = unit(state.rng);
        if (n.alive && draw < state.config.p_fail) inject_failure(state, n.id);
    }
    const std::vector<double> demands = draw_demands(state);
    for (NodeState& n : state.nodes) {
        if (n.alive) n.disk_used = std::min(1.0, n.disk_used + state.config.disk_growth);
    }
    state.last = measure(state, demands);
    return state.last;
}

void inject_failure(ClusterState& state, int node_id) {
    if (node_id < 0 || static_cast<std::size_t>(node_id) >= state.nodes.size()) {
        throw PreconditionError("unknown node id " + std::to_string(node_id));
    }
    state.nodes[static_cast<std::size_t>(node_id)].alive = false;
    detail::refresh_health(state);
}

void set_leader(ClusterState& state, std::optional<int> node_id) {
    for (NodeState& n : state.nodes) {
        if (n.role == Role::leader) n.role = Role::manager;
    }
    if (!node_id) return;
    if (*node_id < 0 || static_cast<std::size_t>(*node_id) >= state.nodes.size() ||
        !state.nodes[static_cast<std::size_t>(*node_id)].is_manager()) {
        throw PreconditionError("leader must be a manager node, got " + std::to_string(*node_id));
    }
    state.nodes[static_cast<std::size_t>(*node_id)].role = Role::leader;
}

double slo_violation(const MetricsSample& sample, const SloBand& slo) {
    double v = 0.0;
    for (const ServiceMetrics& s : sample.services) {
        v += std::max(0.0, s.cpu_util - slo.high) + std::max(0.0, slo.low - s.cpu_util);
    }
    return v;
}

bool is_converged(const ClusterState& state, const SloBand& slo, bool action_rejected) {
    if (action_rejected) return false;
    for (const ServiceMetrics& s : state.last.services) {
        if (s.cpu_util < slo.low || s.cpu_util > slo.high) return false;
    }
    for (const ServiceState& s : state.services) {
        for (const Replica& r : s.replicas) {
            // A replica on a dead node is unhealthy, so this also covers evacuation.
            if (!r.healthy) return false;
        }
    }
    return true;
}

bool is_converged(const ClusterState& state, bool action_rejected) {
    return is_converged(state, state.config.slo, action_rejected);
}

double reserved_cpu(const ClusterState& state, int node_id) {
    double total = 0.0;
    for (const ServiceState& s : state.services) {
        for (const Replica& r : s.replicas) {
            if (r.node == node_id) total += s.cpu_limit;
        }
    }
    return total;
}

double reserved_mem(const ClusterState& state, int node_id) {
    double total = 0.0;
    for (const ServiceState& s : state.services) {
        for (const Replica& r : s.replicas) {
            if (r.node == node_id) total += s.mem_limit;
        }
    }
    return total;
}

std::string snapshot(const ClusterState& state) {
    std::ostringstream out;
    out << "clock " << state.clock << '\n';
    for (const NodeState& n : state.nodes) {
        out << "node " << n.id << ' ' << to_string(n.role) << " alive=" << n.alive
            << " cpu=" << format_double(n.cpu_capacity) << " mem=" << format_double(n.mem_capacity)
            << " disk=" << format_double(n.disk_capacity) << " net=" << format_double(n.net_capacity)
            << " disk_used=" << format_double(n.disk_used) << '\n';
    }
    for (const ServiceState& s : state.services) {
        out << "service " << s.id << " cpu_limit=" << format_double(s.cpu_limit)
            << " mem_limit=" << format_double(s.mem_limit) << " split=" << s.split << " replicas=";
        for (std::size_t i = 0; i < s.replicas.size(); ++i) {
            out << (i ? "," : "") << s.replicas[i].node << (s.replicas[i].healthy ? "" : "!");
        }
        out << '\n';
    }
    out << "sample " << state.last.clock << '\n';
    for (std::size_t i = 0; i < state.last.nodes.size(); ++i) {
        const NodeMetrics& m = state.last.nodes[i];
        out << "  node " << i << ' ' << format_double(m.cpu_util) << ' ' << format_double(m.mem_util) << ' '
            << format_double(m.disk_util) << ' ' << format_double(m.net_util) << '\n';
    }
    for (std::size_t i = 0; i < state.last.services.size(); ++i) {
        const ServiceMetrics& m = state.last.services[i];
        out << "  service " << i << ' ' << format_double(m.demand) << ' ' << format_double(m.cpu_util) << '\n';
    }
    out << "rng " << state.rng << '\n';
    return out.str();
}

}  // namespace adaptswarm::sim
