#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adaptswarm/harness/aggregate.hpp"

namespace adaptswarm::harness {

/// A self-contained SVG line chart of one metric, one series per algorithm,
/// or nullopt when no algorithm has a value for it. Algorithms without data
/// appear in the legend marked "no data".
std::optional<std::string> render_chart(const std::vector<AlgorithmSummary>& summaries, Metric metric);

std::string chart_file_name(Metric metric);

struct PlotOutput {
    std::vector<std::string> files;
    std::vector<std::string> warnings;
};

/// Writes one chart per metric into `outdir`; omitted charts become warnings.
PlotOutput emit_plots(const std::vector<AlgorithmSummary>& summaries, const std::string& outdir);

}  // namespace adaptswarm::harness
