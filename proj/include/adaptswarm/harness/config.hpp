#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "adaptswarm/agents/agent.hpp"
#include "adaptswarm/env/environment.hpp"

namespace adaptswarm::harness {

struct ExperimentConfig {
    agents::Algorithm algorithm = agents::Algorithm::dqn;
    bool algorithm_set = false;  // false until a config file or flag names one
    int episodes = 200;
    std::vector<std::uint64_t> seeds{42};
    std::string output_dir;  // empty: resolved by the caller
    env::EnvConfig env;
    agents::AgentConfig agent;  // gamma is taken from env.gamma
};

/// Parses a JSON config document. Every key is optional; unknown keys and
/// wrongly typed values throw ConfigError naming the offending path.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::string& path);

/// Full config as canonical JSON (sorted keys, two-space indent).
std::string to_json(const ExperimentConfig& config);

/// FNV-1a 64 of to_json(config), as 16 lowercase hex digits.
std::string config_hash(const ExperimentConfig& config);

/// Range checks across all sections; throws ConfigError.
void validate(const ExperimentConfig& config);

/// Copies env.gamma into the agent section and returns the agent config used for runs.
agents::AgentConfig effective_agent_config(const ExperimentConfig& config);

/// "42" or "1,2,3" → seeds. Throws ConfigError on anything else.
std::vector<std::uint64_t> parse_seed_list(std::string_view text);

}  // namespace adaptswarm::harness
