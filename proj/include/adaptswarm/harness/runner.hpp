#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "adaptswarm/harness/config.hpp"

namespace adaptswarm::harness {

/// Raised when a run is stopped from outside before finishing.
class Interrupted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunOptions {
    std::function<bool()> should_stop;  // polled between episodes
    std::ostream* log = nullptr;        // progress lines; null for silence
    int log_every = 25;                 // episodes between progress lines
};

struct RunReport {
    std::string manifest_path;
    std::vector<std::string> csv_paths;
    std::map<std::uint64_t, double> wall_seconds;  // per seed
};

std::string csv_file_name(agents::Algorithm algorithm, std::uint64_t seed);
std::string manifest_file_name(agents::Algorithm algorithm);
std::string checkpoint_file_name(agents::Algorithm algorithm, std::uint64_t seed);

/// Library version stamped into manifests.
std::string code_version();

/// Runs every seed of the experiment into config.output_dir (created if
/// missing). Each seed gets a fresh environment and agent; episode e resets
/// the environment with derive_seed(seed, e). Rows are flushed as they are
/// produced.
///
/// The manifest is written with status "running" before the first episode
/// and rewritten as "completed" or "failed" at the end. On failure the
/// exception is rethrown after the manifest is finalized.
RunReport run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

}  // namespace adaptswarm::harness
