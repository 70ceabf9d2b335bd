#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "adaptswarm/agents/agent.hpp"

namespace adaptswarm::harness {

inline constexpr std::string_view kCsvHeader =
    "episode,steps,total_reward,mean_q,mae,loss,adaptation_time_s,converged";

/// A metrics file whose header or cells do not match the schema.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One CSV line without the newline. Undefined values are empty cells;
/// reals use the shortest round-trip decimal form.
std::string csv_row(const agents::EpisodeMetrics& m);

std::vector<agents::EpisodeMetrics> parse_csv(std::string_view text, const std::string& source = "csv");
std::vector<agents::EpisodeMetrics> read_csv(const std::string& path);

/// The five per-episode series that get plotted and ranked.
enum class Metric { mean_q, total_reward, mae, adaptation_time_s, loss };

inline constexpr std::array<Metric, 5> kMetrics{Metric::mean_q, Metric::total_reward, Metric::mae,
                                                Metric::adaptation_time_s, Metric::loss};

std::string_view column_name(Metric m);
std::string_view title(Metric m);
bool higher_is_better(Metric m);
std::optional<double> value_of(const agents::EpisodeMetrics& e, Metric m);

}  // namespace adaptswarm::harness
