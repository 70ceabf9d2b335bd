#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "adaptswarm/harness/metrics.hpp"

namespace adaptswarm::harness {

inline constexpr std::size_t kSmoothingWindow = 20;
inline constexpr std::size_t kFinalWindow = 50;

/// Per-episode seed mean; unset where no seed has a value.
using Curve = std::vector<std::optional<double>>;

struct AlgorithmSummary {
    std::string algorithm;
    std::size_t seeds = 0;
    std::size_t episodes = 0;  // length of the shortest run
    std::array<Curve, kMetrics.size()> curves;  // indexed like kMetrics
    std::vector<double> smoothed_reward;        // trailing mean of the total_reward curve
    std::size_t episodes_to_best = 0;           // 1-based first maximum of smoothed_reward
    std::array<std::optional<double>, kMetrics.size()> final_means;
    double spearman = 0.0;  // episode index vs smoothed_reward
    double final_convergence_rate = 0.0;

    const Curve& curve(Metric m) const;
    std::optional<double> final_mean(Metric m) const;
};

std::size_t metric_index(Metric m);

/// Mean of the last `window` entries ending at each position (fewer at the start).
std::vector<double> trailing_mean(const std::vector<double>& values, std::size_t window);

/// Spearman rank correlation with average ranks for ties; 0 when either side
/// has no variance.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Summary of one algorithm from its per-seed runs. Runs are truncated to the
/// shortest one. Throws PreconditionError on empty input.
AlgorithmSummary summarize(const std::string& algorithm, const std::vector<std::vector<agents::EpisodeMetrics>>& runs);

/// Algorithm tag of a "<algo>_seed<N>.csv" file name, or nullopt.
std::optional<std::string> algorithm_of(const std::string& csv_path);

/// Reads the CSVs, groups them by algorithm tag and summarizes each group,
/// ordered by tag. Throws SchemaError on malformed files.
std::vector<AlgorithmSummary> aggregate(const std::vector<std::string>& csv_paths);

/// Canonical JSON rendering (curves included) for summary.json.
std::string summary_json(const std::vector<AlgorithmSummary>& summaries);

}  // namespace adaptswarm::harness
