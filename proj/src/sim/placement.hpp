#pragma once

#include <optional>
#include <vector>

#include "adaptswarm/sim/cluster.hpp"

namespace adaptswarm::sim::detail {

/// Running view of node load and reservations while several replicas are
/// placed or removed within one operation.
class Ledger {
public:
    explicit Ledger(const ClusterState& state);

    /// Alive node with the lowest projected cpu_util that still fits the
    /// limits; ties go to the lowest id. Reserves the slot on success.
    std::optional<int> place(double cpu_limit, double mem_limit);
    void release(int node, double cpu_limit, double mem_limit);
    double util(int node) const { return util_[static_cast<std::size_t>(node)]; }

private:
    const ClusterState& state_;
    std::vector<double> util_;
    std::vector<double> cpu_;
    std::vector<double> mem_;
};

/// Index of the replica ScaleIn removes: unhealthy first, else the one on the
/// most loaded node (ties go to the later replica).
std::size_t removal_victim(const ServiceState& service, const Ledger& ledger);

void refresh_health(ClusterState& state);

}  // namespace adaptswarm::sim::detail
