#include <doctest.h>

#include <cmath>

#include "adaptswarm/errors.hpp"
#include "adaptswarm/sim/cluster.hpp"

using namespace adaptswarm;
using namespace adaptswarm::sim;

namespace {

ClusterConfig quiet_config() {
    ClusterConfig c = default_cluster_config();
    c.p_fail = 0.0;
    for (ServiceConfig& s : c.services) s.workload = {200.0, 0.0, 60.0, 0.0, 0.0, 1.0};
    return c;
}

ClusterState with_demands(ClusterState s, const std::vector<double>& demands) {
    s.last = measure(s, demands);
    return s;
}

// Independent recomputation of the placement rule over every node.
int brute_force_target(const ClusterState& s, const ServiceState& svc) {
    int best = -1;
    for (const NodeState& n : s.nodes) {
        if (!n.alive) continue;
        if (reserved_cpu(s, n.id) + svc.cpu_limit > n.cpu_capacity) continue;
        if (reserved_mem(s, n.id) + svc.mem_limit > n.mem_capacity) continue;
        const double u = s.last.nodes[static_cast<std::size_t>(n.id)].cpu_util;
        if (best < 0 || u < s.last.nodes[static_cast<std::size_t>(best)].cpu_util) best = n.id;
    }
    return best;
}

void check_invariants(const ClusterState& s) {
    for (const NodeState& n : s.nodes) {
        CHECK(reserved_cpu(s, n.id) <= n.cpu_capacity + 1e-9);
        CHECK(reserved_mem(s, n.id) <= n.mem_capacity + 1e-9);
    }
    for (const ServiceState& svc : s.services) {
        CHECK(svc.replica_count() >= s.config.min_replicas);
        CHECK(svc.replica_count() <= s.config.max_replicas);
        int on_dead = 0;
        for (const Replica& r : svc.replicas) {
            if (!s.nodes[static_cast<std::size_t>(r.node)].alive) ++on_dead;
        }
        CHECK(svc.replica_count() - svc.healthy_count() == on_dead);
    }
    for (const NodeMetrics& m : s.last.nodes) {
        CHECK(m.cpu_util >= 0.0);
        CHECK(m.cpu_util <= kUtilCeiling);
        CHECK(m.mem_util >= 0.0);
        CHECK(m.mem_util <= kUtilCeiling);
        CHECK(m.disk_util >= 0.0);
        CHECK(m.disk_util <= 1.0);
        CHECK(m.net_util >= 0.0);
        CHECK(m.net_util <= kUtilCeiling);
    }
    for (const ServiceMetrics& m : s.last.services) {
        CHECK(m.demand >= 0.0);
        CHECK(m.cpu_util >= 0.0);
        CHECK(m.cpu_util <= kUtilCeiling);
    }
}

}  // namespace

TEST_CASE("init_cluster") {
    const ClusterState s = init_cluster(default_cluster_config(), 7);
    CHECK(s.nodes.size() == 5);
    int leaders = 0, alive = 0;
    for (const NodeState& n : s.nodes) {
        leaders += n.role == Role::leader;
        alive += n.alive;
    }
    CHECK(leaders == 1);
    CHECK(alive == 5);
    CHECK(s.leader() == 0);
    CHECK(s.clock == 0);
    CHECK(s.services[0].replica_count() == 1);
    CHECK(s.services[1].replica_count() == 1);
    CHECK(s.last.clock == 0);

    CHECK(snapshot(init_cluster(default_cluster_config(), 7)) == snapshot(s));
    CHECK(snapshot(init_cluster(default_cluster_config(), 8)) != snapshot(s));

    ClusterConfig none = default_cluster_config();
    none.managers = 0;
    CHECK_THROWS_AS(init_cluster(none, 1), ConfigError);
}

TEST_CASE("demand") {
    Rng rng(3);
    const WorkloadModel flat{120.0, 0.0, 50.0, 0.0, 0.0, 1.0};
    for (std::uint64_t t = 0; t < 20; ++t) CHECK(demand(flat, t, rng) == 120.0);

    const WorkloadModel wave{100.0, 50.0, 40.0, 0.0, 0.0, 1.0};
    CHECK(demand(wave, 10, rng) == doctest::Approx(150.0).epsilon(1e-12));

    const WorkloadModel negative{-30.0, 0.0, 40.0, 0.0, 0.0, 1.0};
    CHECK(demand(negative, 0, rng) == 0.0);

    const WorkloadModel spiky{100.0, 0.0, 40.0, 0.0, 1.0, 1.5};
    CHECK(demand(spiky, 5, rng) == 150.0);
}

TEST_CASE("service utilization model") {
    ClusterConfig c = quiet_config();
    c.services.resize(1);
    c.services[0].cpu_limit = 100.0;
    c.services[0].initial_replicas = 4;
    ClusterState s = init_cluster(c, 1);
    CHECK(measure(s, {200.0}).services[0].cpu_util == 0.5);
    CHECK(measure(s, {0.0}).services[0].cpu_util == 0.0);

    c.services[0].initial_replicas = 1;
    s = init_cluster(c, 1);
    CHECK(measure(s, {150.0}).services[0].cpu_util == kUtilCeiling);

    inject_failure(s, s.services[0].replicas[0].node);
    CHECK(measure(s, {10.0}).services[0].cpu_util == kUtilCeiling);
    CHECK(measure(s, {0.0}).services[0].cpu_util == 0.0);
}

TEST_CASE("node metrics aggregate placed replicas") {
    ClusterConfig c = quiet_config();
    c.services.resize(1);
    c.services[0].cpu_limit = 500.0;
    c.services[0].initial_replicas = 2;
    const ClusterState s = init_cluster(c, 1);
    const MetricsSample m = measure(s, {500.0});
    // 0.5 util × 500 mc per replica on a 2000 mc node.
    CHECK(m.nodes[0].cpu_util == doctest::Approx(0.125));
    CHECK(m.nodes[1].cpu_util == doctest::Approx(0.125));
    CHECK(m.nodes[2].cpu_util == 0.0);
    CHECK(m.nodes[0].net_util == doctest::Approx(250.0 * c.net_per_millicore / c.net_capacity));
    CHECK(m.nodes[0].mem_util == doctest::Approx(256.0 * (c.mem_base + 0.5 * c.mem_ratio) / c.mem_capacity));
}

TEST_CASE("apply_action examples") {
    ClusterConfig c = quiet_config();
    c.services[0].initial_replicas = c.max_replicas;
    ClusterState s = init_cluster(c, 2);
    const std::string before = snapshot(s);
    const ActionOutcome bound = apply_action(s, {ActionKind::scale_out, 0});
    CHECK_FALSE(bound.applied);
    CHECK(bound.reason == RejectReason::at_bound);
    CHECK(snapshot(s) == before);

    const ActionOutcome recover_all_alive = apply_action(s, {ActionKind::auto_recover, 0});
    CHECK(recover_all_alive.reason == RejectReason::no_failed_node);
    CHECK(recover_all_alive.duration == 10.0);
    CHECK(snapshot(s) == before);

    c = quiet_config();
    c.services[0].initial_replicas = 2;
    s = with_demands(init_cluster(c, 2), {420.0, 90.0});
    const int expected = brute_force_target(s, s.services[0]);
    const ActionOutcome out = apply_action(s, {ActionKind::scale_out, 0});
    CHECK(out.applied);
    CHECK(out.duration == 5.0);
    REQUIRE(s.services[0].replica_count() == 3);
    CHECK(s.services[0].replicas.back().node == expected);
}

TEST_CASE("placement matches brute force across random states") {
    Rng pick(99);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        ClusterState s = init_cluster(default_cluster_config(), seed);
        for (int t = 0; t < 30; ++t) {
            const Action a{static_cast<ActionKind>(pick() % kActionKinds), static_cast<int>(pick() % 2)};
            if (a.kind == ActionKind::scale_out) {
                const int expected = brute_force_target(s, s.services[static_cast<std::size_t>(a.service)]);
                const ActionOutcome out = apply_action(s, a);
                if (expected < 0) {
                    CHECK_FALSE(out.applied);
                } else if (out.applied) {
                    CHECK(s.services[static_cast<std::size_t>(a.service)].replicas.back().node == expected);
                }
            } else {
                apply_action(s, a);
            }
            tick(s);
        }
    }
}

TEST_CASE("vertical and compose actions") {
    ClusterState s = init_cluster(quiet_config(), 4);
    CHECK(apply_action(s, {ActionKind::scale_up_cpu, 1}).applied);
    CHECK(s.services[1].cpu_limit == doctest::Approx(250.0));
    CHECK(apply_action(s, {ActionKind::scale_down_mem, 1}).applied);
    CHECK(s.services[1].mem_limit == doctest::Approx(192.0));

    CHECK(apply_action(s, {ActionKind::compose_merge, 0}).reason == RejectReason::at_bound);
    CHECK(apply_action(s, {ActionKind::scale_out, 0}).applied);
    CHECK(apply_action(s, {ActionKind::compose_split, 0}).applied);
    CHECK(s.services[0].replica_count() == 4);
    CHECK(s.services[0].cpu_limit == 125.0);
    CHECK(apply_action(s, {ActionKind::compose_split, 0}).reason == RejectReason::at_bound);
    CHECK(apply_action(s, {ActionKind::compose_merge, 0}).applied);
    CHECK(s.services[0].replica_count() == 2);
    CHECK(s.services[0].cpu_limit == 250.0);
    CHECK_FALSE(s.services[0].split);

    ClusterConfig tight = quiet_config();
    tight.cpu_capacity = 260.0;
    tight.managers = 1;
    tight.workers = 1;
    ClusterState t = init_cluster(tight, 1);
    CHECK(apply_action(t, {ActionKind::scale_up_cpu, 0}).reason == RejectReason::insufficient_capacity);
    CHECK(apply_action(t, {ActionKind::scale_out, 0}).reason == RejectReason::insufficient_capacity);
}

TEST_CASE("is_converged") {
    ClusterConfig c = quiet_config();
    c.services[0].cpu_limit = 400.0;
    c.services[1].cpu_limit = 400.0;
    ClusterState s = with_demands(init_cluster(c, 1), {200.0, 200.0});
    CHECK(is_converged(s, false));
    CHECK_FALSE(is_converged(s, true));

    CHECK_FALSE(is_converged(with_demands(s, {360.0, 200.0}), false));

    // Node 4 hosts nothing: a dead but evacuated node does not block convergence.
    inject_failure(s, 4);
    CHECK(is_converged(s, false));
    inject_failure(s, s.services[0].replicas[0].node);
    s = with_demands(s, {0.0, 200.0});
    s.last.services[0].cpu_util = 0.5;
    CHECK_FALSE(is_converged(s, false));
}

TEST_CASE("inject_failure and recover") {
    ClusterState s = init_cluster(quiet_config(), 5);
    const int node = s.services[0].replicas[0].node;
    inject_failure(s, node);
    CHECK_FALSE(s.nodes[static_cast<std::size_t>(node)].alive);
    CHECK_FALSE(s.services[0].replicas[0].healthy);

    recover(s, node);
    CHECK(s.nodes[static_cast<std::size_t>(node)].alive);
    for (const ServiceState& svc : s.services) {
        for (const Replica& r : svc.replicas) {
            CHECK(r.healthy);
            CHECK(s.nodes[static_cast<std::size_t>(r.node)].alive);
        }
    }

    // Recovering a different node moves replicas off the still-dead one.
    inject_failure(s, node);
    const int other = node == 4 ? 3 : 4;
    inject_failure(s, other);
    recover(s, other);
    CHECK(s.services[0].replicas[0].healthy);
    CHECK(s.services[0].replicas[0].node != node);

    CHECK_THROWS_AS(inject_failure(s, 17), PreconditionError);
    CHECK_THROWS_AS(recover(s, -1), PreconditionError);
}

TEST_CASE("auto_recover restarts the lowest dead node") {
    ClusterState s = init_cluster(quiet_config(), 6);
    inject_failure(s, 3);
    inject_failure(s, 1);
    CHECK(apply_action(s, {ActionKind::auto_recover, 0}).applied);
    CHECK(s.nodes[1].alive);
    CHECK_FALSE(s.nodes[3].alive);
}

TEST_CASE("tick advances the clock and failures follow p_fail") {
    ClusterConfig c = default_cluster_config();
    c.p_fail = 1.0;
    ClusterState s = init_cluster(c, 1);
    tick(s);
    CHECK(s.clock == 1);
    CHECK(s.last.clock == 1);
    for (const NodeState& n : s.nodes) CHECK_FALSE(n.alive);
    for (const ServiceState& svc : s.services) CHECK(svc.healthy_count() == 0);
    for (const ServiceMetrics& m : s.last.services) CHECK(m.cpu_util == kUtilCeiling);
}

TEST_CASE("random action sequences keep every invariant and are deterministic") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        ClusterConfig c = default_cluster_config();
        c.p_fail = 0.02;
        ClusterState a = init_cluster(c, seed);
        ClusterState b = init_cluster(c, seed);
        Rng pick(seed + 1000);
        for (int t = 0; t < 150; ++t) {
            const Action act{static_cast<ActionKind>(pick() % kActionKinds), static_cast<int>(pick() % 2)};
            const ClusterState before = a;
            const ActionOutcome out = apply_action(a, act);
            apply_action(b, act);
            if (!out.applied) CHECK(a.same_state(before));
            CHECK(check_action(before, act).applied == out.applied);
            check_invariants(a);
            tick(a);
            tick(b);
            check_invariants(a);
            CHECK(a.clock == before.clock + 1);
        }
        CHECK(snapshot(a) == snapshot(b));
    }
}
