#include "adaptswarm/sim/config.hpp"

#include <cmath>

#include "adaptswarm/errors.hpp"

namespace adaptswarm::sim {

ClusterConfig default_cluster_config() {
    ClusterConfig c;
    ServiceConfig front;
    front.name = "svc0";
    front.workload = {600.0, 150.0, 120.0, 20.0, 0.01, 1.5};
    front.initial_replicas = 1;
    front.cpu_limit = 250.0;
    front.mem_limit = 256.0;

    ServiceConfig back;
    back.name = "svc1";
    back.workload = {300.0, 60.0, 90.0, 15.0, 0.01, 1.5};
    back.initial_replicas = 1;
    back.cpu_limit = 200.0;
    back.mem_limit = 256.0;

    c.services = {front, back};
    return c;
}

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

bool positive(double v) { return std::isfinite(v) && v > 0.0; }
bool unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

}  // namespace

void validate(const ClusterConfig& c) {
    require(c.managers >= 1, "cluster.managers must be at least 1");
    require(c.workers >= 0, "cluster.workers must be non-negative");
    require(c.max_nodes >= c.node_count(), "cluster.max_nodes is smaller than managers + workers");
    require(positive(c.cpu_capacity) && positive(c.mem_capacity) && positive(c.disk_capacity) &&
                positive(c.net_capacity),
            "node capacities must be positive");
    require(!c.services.empty(), "cluster.services must name at least one service");
    require(c.min_replicas >= 1, "cluster.min_replicas must be at least 1");
    require(c.max_replicas >= c.min_replicas, "cluster.max_replicas is below min_replicas");
    require(positive(c.cpu_limit_min) && c.cpu_limit_max >= c.cpu_limit_min, "invalid cpu limit range");
    require(positive(c.mem_limit_min) && c.mem_limit_max >= c.mem_limit_min, "invalid memory limit range");
    require(std::isfinite(c.vertical_step) && c.vertical_step > 0.0 && c.vertical_step < 1.0,
            "cluster.vertical_step must lie in (0, 1)");
    require(unit(c.p_fail), "cluster.p_fail must lie in [0, 1]");
    require(unit(c.disk_initial) && unit(c.disk_growth) && unit(c.disk_reclaim), "disk rates must lie in [0, 1]");
    require(std::isfinite(c.mem_base) && c.mem_base >= 0.0 && std::isfinite(c.mem_ratio) && c.mem_ratio >= 0.0,
            "memory model coefficients must be non-negative");
    require(std::isfinite(c.net_per_millicore) && c.net_per_millicore >= 0.0,
            "cluster.net_per_millicore must be non-negative");
    require(std::isfinite(c.slo.low) && std::isfinite(c.slo.high) && c.slo.low >= 0.0 && c.slo.low < c.slo.high,
            "slo band needs 0 <= low < high");

    for (const ServiceConfig& s : c.services) {
        const std::string where = "service '" + s.name + "': ";
        const WorkloadModel& w = s.workload;
        require(std::isfinite(w.base) && std::isfinite(w.amplitude), where + "workload base/amplitude not finite");
        require(positive(w.period), where + "workload period must be positive");
        require(std::isfinite(w.noise_sigma) && w.noise_sigma >= 0.0, where + "noise sigma must be non-negative");
        require(unit(w.spike_probability), where + "spike probability must lie in [0, 1]");
        require(std::isfinite(w.spike_multiplier) && w.spike_multiplier >= 0.0,
                where + "spike multiplier must be non-negative");
        require(s.initial_replicas >= c.min_replicas && s.initial_replicas <= c.max_replicas,
                where + "initial replicas outside [min_replicas, max_replicas]");
        require(s.cpu_limit >= c.cpu_limit_min && s.cpu_limit <= c.cpu_limit_max,
                where + "cpu limit outside the configured range");
        require(s.mem_limit >= c.mem_limit_min && s.mem_limit <= c.mem_limit_max,
                where + "memory limit outside the configured range");
    }
}

}  // namespace adaptswarm::sim
