#include <doctest.h>

#include <cmath>

#include "adaptswarm/env/environment.hpp"
#include "adaptswarm/errors.hpp"

using namespace adaptswarm;
using namespace adaptswarm::env;

namespace {

EnvConfig calm_config() {
    EnvConfig c;
    c.cluster.p_fail = 0.0;
    for (sim::ServiceConfig& s : c.cluster.services) {
        s.workload.noise_sigma = 0.0;
        s.workload.spike_probability = 0.0;
        s.workload.amplitude = 0.0;
    }
    return c;
}

// Two services comfortably inside the SLO band from the first tick.
EnvConfig balanced_config() {
    EnvConfig c = calm_config();
    c.cluster.services[0].workload.base = 500.0;
    c.cluster.services[0].initial_replicas = 2;
    c.cluster.services[0].cpu_limit = 500.0;
    c.cluster.services[1].workload.base = 200.0;
    c.cluster.services[1].cpu_limit = 400.0;
    return c;
}

}  // namespace

TEST_CASE("reset") {
    SwarmEnvironment env(EnvConfig{});
    const Observation a = env.reset(5);
    CHECK(a.size() == 24);
    CHECK(env.observation_size() == 5 * 4 + 2 * 2);
    SwarmEnvironment twin(EnvConfig{});
    CHECK(twin.reset(5) == a);
    env.reset(6);
    CHECK(env.cluster().last.services[0].demand != twin.cluster().last.services[0].demand);

    EnvConfig idle = calm_config();
    for (sim::ServiceConfig& s : idle.cluster.services) s.workload.base = 0.0;
    SwarmEnvironment quiet(idle);
    const Observation o = quiet.reset(1);
    for (std::size_t n = 0; n < 5; ++n) CHECK(o[n * 4] == 0.0);
}

TEST_CASE("build_observation") {
    sim::ClusterConfig c = calm_config().cluster;
    c.managers = 1;
    c.workers = 1;
    c.cpu_capacity = 100.0;
    c.cpu_limit_min = 10.0;
    c.services.resize(1);
    c.services[0].cpu_limit = 50.0;
    c.services[0].workload.base = 50.0;
    sim::ClusterState s = sim::init_cluster(c, 1);
    Observation o = build_observation(s);
    REQUIRE(o.size() == 5 * 4 + 2);
    CHECK(o[0] == 0.5);  // 50 of 100 millicores
    for (std::size_t i = 8; i < 20; ++i) CHECK(o[i] == 0.0);
    CHECK(o[20] == doctest::Approx(1.0 / c.max_replicas));
    CHECK(o[21] == 1.0);

    sim::inject_failure(s, 1);
    o = build_observation(s);
    for (std::size_t i = 4; i < 8; ++i) CHECK(o[i] == 0.0);
}

TEST_CASE("compute_reward examples") {
    const RewardConfig r;
    CHECK(compute_reward(true, 0.0, false, r) == -11.0);
    CHECK(compute_reward(false, 0.2, false, r) == doctest::Approx(-2.0));
    CHECK(compute_reward(false, 0.0, true, r) == 99.0);
    CHECK(compute_reward(false, 0.0, false, r) == -1.0);
}

TEST_CASE("action table and durations") {
    const ActionBinding b;
    CHECK(action_for(0, b).kind == sim::ActionKind::noop);
    CHECK(action_for(1, b) == sim::Action{sim::ActionKind::scale_out, 0});
    CHECK(action_for(3, b) == sim::Action{sim::ActionKind::scale_up_cpu, 1});
    CHECK(action_for(9, b).kind == sim::ActionKind::auto_recover);
    CHECK_THROWS_AS(action_for(10, b), PreconditionError);
    const sim::DurationTable d;
    CHECK(d.seconds(sim::ActionKind::noop) == 1.0);
    CHECK(d.seconds(sim::ActionKind::scale_out) == 5.0);
    CHECK(d.seconds(sim::ActionKind::scale_down_mem) == 3.0);
    CHECK(d.seconds(sim::ActionKind::compose_merge) == 8.0);
    CHECK(d.seconds(sim::ActionKind::auto_recover) == 10.0);
}

TEST_CASE("step: NoOp, denied actions and protocol errors") {
    SUBCASE("NoOp in band converges immediately") {
        SwarmEnvironment env(balanced_config());
        env.reset(3);
        const StepResult r = env.step(0);
        CHECK(r.info.applied);
        CHECK(r.info.converged);
        CHECK(r.done);
        CHECK(r.reward == 99.0);
        CHECK(r.info.duration == 1.0);
        CHECK_THROWS_AS(env.step(0), ProtocolError);
    }
    SUBCASE("NoOp without violation but unevacuated dead node costs one step") {
        EnvConfig c = balanced_config();
        c.cluster.services[0].initial_replicas = 3;
        c.cluster.services[0].workload.base = 600.0;
        c.faults.crashes = {{0, 2}};  // node 2 hosts a replica of svc0
        SwarmEnvironment env(c);
        env.reset(3);
        const StepResult r = env.step(0);
        CHECK(r.info.applied);
        CHECK(r.info.violation == 0.0);
        CHECK_FALSE(r.info.converged);
        CHECK(r.reward == -1.0);
    }
    SUBCASE("denied by vote: -c_fail and no cluster mutation") {
        SwarmEnvironment denied(calm_config());
        SwarmEnvironment idle(calm_config());
        denied.reset(4);
        idle.reset(4);
        const StepResult r = denied.step(2);  // ScaleIn at min replicas
        const StepResult n = idle.step(0);
        CHECK_FALSE(r.info.applied);
        CHECK(r.info.outcome == "vote_denied");
        CHECK(r.reward == doctest::Approx(-10.0 - 1.0 - 5.0 * r.info.violation));
        CHECK(n.info.applied);
        CHECK(sim::snapshot(denied.cluster()) == sim::snapshot(idle.cluster()));
    }
    SUBCASE("invalid index") {
        SwarmEnvironment env(EnvConfig{});
        env.reset(1);
        CHECK_THROWS_AS(env.step(10), PreconditionError);
        CHECK_THROWS_AS(env.step(-1), PreconditionError);
    }
}

TEST_CASE("episode termination and adaptation time") {
    EnvConfig c = calm_config();
    c.max_steps = 7;
    SwarmEnvironment env(c);
    env.reset(2);
    double total_duration = 0.0;
    const int actions[] = {1, 4, 6, 0, 7, 2, 9};
    const sim::DurationTable d;
    double expected = 0.0;
    StepResult r;
    for (int a : actions) {
        r = env.step(a);
        total_duration += r.info.duration;
        expected += d.seconds(action_for(a, c.binding).kind);
    }
    CHECK(r.done);
    CHECK_FALSE(r.info.converged);
    CHECK(env.steps() == 7);
    CHECK(total_duration == expected);

    // Optimal manual policy for the default scenario converges early.
    SwarmEnvironment solved(calm_config());
    solved.reset(2);
    int steps = 0;
    bool done = false;
    for (int a : {1, 1, 1, 3, 3, 3, 3, 0, 0}) {
        const StepResult s = solved.step(a);
        ++steps;
        if (s.done) {
            CHECK(s.info.converged);
            CHECK(s.reward > 0.0);
            done = true;
            break;
        }
    }
    CHECK(done);
    CHECK(steps <= 8);
}

TEST_CASE("leader crash triggers an election") {
    EnvConfig c = calm_config();
    c.faults.crashes = {{1, 0}};
    SwarmEnvironment env(c);
    env.reset(8);
    const auto term0 = env.gate().max_term();
    env.step(0);
    StepResult r = env.step(0);
    CHECK(r.info.outcome == "not_leader");
    int waited = 0;
    while (!env.gate().leader() && waited < 5) {
        env.step(0);
        ++waited;
    }
    CHECK(env.gate().leader().has_value());
    CHECK(env.gate().max_term() > term0);
    CHECK(env.cluster().leader() == env.gate().leader());
}

TEST_CASE("random episodes: invariants, bounds and determinism") {
    const EnvConfig c;
    const double v_max = max_violation(c.cluster);
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        SwarmEnvironment a(c), b(c);
        a.reset(seed);
        b.reset(seed);
        Rng pick(seed + 500);
        while (!a.done()) {
            const int act = static_cast<int>(pick() % kActionCount);
            const sim::ClusterState before = a.cluster();
            const std::uint64_t commit_before = a.gate().commit_index();
            const StepResult r = a.step(act);
            const StepResult s = b.step(act);
            CHECK(r.reward == s.reward);
            CHECK(r.observation == s.observation);
            CHECK(r.observation.size() == a.observation_size());
            for (double v : r.observation) {
                CHECK(std::isfinite(v));
                CHECK(v >= 0.0);
                CHECK(v <= sim::kUtilCeiling);
            }
            CHECK(r.reward <= c.reward.c_conv - c.reward.c_step);
            CHECK(r.reward >= -c.reward.c_step - c.reward.c_fail - c.reward.c_viol * v_max - 1e-12);
            CHECK(r.done == (r.info.converged || a.steps() >= c.max_steps));
            const bool nothing_committed = a.gate().commit_index() == commit_before;
            if (!r.info.applied && nothing_committed) {
                sim::ClusterState replay = before;
                sim::tick(replay);
                sim::set_leader(replay, a.cluster().leader());
                CHECK(replay.services == a.cluster().services);
                CHECK(replay.last == a.cluster().last);
            }
        }
        CHECK(a.gate().monitor().ok());
    }
}
