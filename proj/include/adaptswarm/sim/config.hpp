#pragma once

#include <string>
#include <vector>

namespace adaptswarm::sim {

/// Demand generator for one service, in millicores.
struct WorkloadModel {
    double base = 100.0;
    double amplitude = 0.0;
    double period = 60.0;  // ticks
    double noise_sigma = 0.0;
    double spike_probability = 0.0;
    double spike_multiplier = 1.0;
};

struct ServiceConfig {
    std::string name;
    WorkloadModel workload;
    int initial_replicas = 1;
    double cpu_limit = 250.0;  // millicores per replica
    double mem_limit = 256.0;  // MB per replica
};

struct SloBand {
    double low = 0.2;
    double high = 0.8;
};

struct ClusterConfig {
    int managers = 3;
    int workers = 2;
    /// Node slots reserved in the observation vector.
    int max_nodes = 5;

    double cpu_capacity = 2000.0;  // millicores
    double mem_capacity = 4096.0;  // MB
    double disk_capacity = 100.0;  // GB
    double net_capacity = 125.0;   // MB/s

    std::vector<ServiceConfig> services;

    int min_replicas = 1;
    int max_replicas = 8;
    double cpu_limit_min = 50.0;
    double cpu_limit_max = 1000.0;
    double mem_limit_min = 64.0;
    double mem_limit_max = 2048.0;
    double vertical_step = 0.25;

    double p_fail = 0.002;
    double disk_initial = 0.1;
    double disk_growth = 0.001;   // fraction of capacity per tick
    double disk_reclaim = 0.02;   // fraction freed per applied scale event
    double mem_base = 0.3;        // resident fraction of the memory limit when idle
    double mem_ratio = 0.5;       // extra fraction per unit of cpu utilization
    double net_per_millicore = 0.02;  // MB/s per millicore of served demand

    SloBand slo;

    int node_count() const { return managers + workers; }
};

/// Three managers, two workers and two services that start overloaded.
ClusterConfig default_cluster_config();

/// Throws ConfigError naming the offending field.
void validate(const ClusterConfig& config);

}  // namespace adaptswarm::sim
