#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "adaptswarm/harness/config.hpp"

namespace adaptswarm::harness {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitRuntime = 3 };

/// Values given on the command line of `run`; unset means "not given".
struct RunFlags {
    std::optional<std::string> algorithm;
    std::optional<int> episodes;
    std::optional<std::string> seeds;
    std::optional<std::string> config_path;
    std::optional<std::string> output_dir;
};

/// Flags over config file over $ADAPT_SWARM_OUT over "runs". Throws
/// ConfigError for unknown algorithms, a missing algorithm and invalid values.
ExperimentConfig resolve_run_config(const RunFlags& flags, const std::optional<std::string>& env_out);

struct CliContext {
    std::ostream* out = nullptr;
    std::ostream* err = nullptr;
    std::function<bool()> should_stop;
    std::optional<std::string> env_out;  // value of ADAPT_SWARM_OUT
};

/// Entry point of the adaptswarm tool; returns the process exit code.
int run_cli(const std::vector<std::string>& args, const CliContext& context);

}  // namespace adaptswarm::harness
