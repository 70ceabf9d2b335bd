#pragma once

#include <string>
#include <vector>

#include "adaptswarm/harness/aggregate.hpp"

namespace adaptswarm::harness {

inline constexpr const char* kDeskScaleLabel =
    "Observed at desk scale; not a reproduction of published live-cluster figures.";

struct RankedEntry {
    std::string algorithm;
    std::optional<double> value;
};

/// Algorithms ordered best first on one statistic. Missing values go last;
/// ties fall back to alphabetical tag order.
std::vector<RankedEntry> rank(const std::vector<AlgorithmSummary>& summaries, Metric metric);

/// Text ranking table over the final-window means plus episodes-to-best and
/// Spearman. Requires at least two algorithms (PreconditionError otherwise).
std::string compare_report(const std::vector<AlgorithmSummary>& summaries);

struct ReportOutput {
    std::vector<std::string> inputs;
    std::vector<std::string> files;
    std::vector<std::string> warnings;
};

/// Aggregates every <algo>_seed<N>.csv in `in_dir` and writes summary.json,
/// report.txt, the charts and report.manifest.json into `out_dir`.
ReportOutput run_report(const std::string& in_dir, const std::string& out_dir);

}  // namespace adaptswarm::harness
