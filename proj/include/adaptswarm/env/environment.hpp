#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adaptswarm/raft/gate.hpp"
#include "adaptswarm/sim/cluster.hpp"

namespace adaptswarm::env {

using Observation = std::vector<double>;

inline constexpr int kActionCount = 10;

struct StepInfo {
    bool applied = false;
    std::string outcome = "applied";  // "applied" or the rejection reason
    double violation = 0.0;
    double duration = 0.0;  // simulated seconds
    bool converged = false;
    double sparse_reward = 0.0;
};

struct StepResult {
    Observation observation;
    double reward = 0.0;
    bool done = false;
    StepInfo info;
};

/// Episodic discrete-action environment.
class Environment {
public:
    virtual ~Environment() = default;
    virtual Observation reset(std::uint64_t seed) = 0;
    virtual StepResult step(int action) = 0;
    virtual std::size_t observation_size() const = 0;
    virtual int action_count() const = 0;
    virtual int max_steps() const = 0;
};

struct RewardConfig {
    double c_conv = 100.0;
    double c_fail = 10.0;
    double c_step = 1.0;
    double c_viol = 5.0;
};

/// Which service each family of service-level actions targets.
struct ActionBinding {
    int horizontal = 0;
    int vertical = 1;
    int compose = 0;
};

struct EnvConfig {
    sim::ClusterConfig cluster = sim::default_cluster_config();
    raft::GateConfig gate;
    raft::FaultProfile faults;
    RewardConfig reward;
    sim::DurationTable durations;
    ActionBinding binding;
    int max_steps = 200;
    double gamma = 0.95;
};

void validate(const EnvConfig& config);

/// Index → action in the fixed order NoOp, ScaleOut, ScaleIn, ScaleUpCpu,
/// ScaleDownCpu, ScaleUpMem, ScaleDownMem, ComposeSplit, ComposeMerge,
/// AutoRecover.
sim::Action action_for(int index, const ActionBinding& binding);

std::size_t observation_size(const sim::ClusterConfig& config);

/// Per node slot [cpu, mem, disk, net] (zeros for dead or absent nodes), then
/// per service [replicas / max_replicas, cpu_util].
Observation build_observation(const sim::ClusterState& cluster);

double compute_reward(bool rejected, double violation, bool converged, const RewardConfig& reward);

/// Largest violation the clamps allow.
double max_violation(const sim::ClusterConfig& config);

/// The simulated swarm behind a consensus gate.
class SwarmEnvironment final : public Environment {
public:
    explicit SwarmEnvironment(EnvConfig config);

    Observation reset(std::uint64_t seed) override;
    StepResult step(int action) override;
    std::size_t observation_size() const override { return env::observation_size(config_.cluster); }
    int action_count() const override { return kActionCount; }
    int max_steps() const override { return config_.max_steps; }

    const EnvConfig& config() const { return config_; }
    const sim::ClusterState& cluster() const { return *cluster_; }
    const raft::Gate& gate() const { return *gate_; }
    int steps() const { return steps_; }
    bool done() const { return done_; }

private:
    void sync_membership();
    void apply_scheduled_crashes();

    EnvConfig config_;
    std::optional<sim::ClusterState> cluster_;
    std::optional<sim::ClusterState> previous_;
    std::optional<raft::Gate> gate_;
    std::uint64_t applied_index_ = 0;
    int steps_ = 0;
    bool done_ = true;
};

}  // namespace adaptswarm::env
