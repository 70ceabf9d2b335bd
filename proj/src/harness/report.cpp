#include "adaptswarm/harness/report.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "adaptswarm/errors.hpp"
#include "adaptswarm/harness/plots.hpp"
#include "adaptswarm/harness/runner.hpp"

namespace adaptswarm::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(const std::optional<double>& v) {
    if (!v) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", *v);
    return buf;
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

// Ranking keys beyond the plotted metrics.
struct Statistic {
    std::string name;
    bool higher_better;
    std::function<std::optional<double>(const AlgorithmSummary&)> get;
};

std::vector<Statistic> statistics() {
    std::vector<Statistic> out;
    for (const Metric m : kMetrics) {
        out.push_back({std::string(column_name(m)), higher_is_better(m),
                       [m](const AlgorithmSummary& s) { return s.final_mean(m); }});
    }
    out.push_back({"episodes_to_best", false, [](const AlgorithmSummary& s) -> std::optional<double> {
                       return static_cast<double>(s.episodes_to_best);
                   }});
    out.push_back({"spearman", true, [](const AlgorithmSummary& s) -> std::optional<double> { return s.spearman; }});
    return out;
}

std::vector<RankedEntry> rank_by(const std::vector<AlgorithmSummary>& summaries, const Statistic& stat) {
    std::vector<RankedEntry> out;
    for (const AlgorithmSummary& s : summaries) out.push_back({s.algorithm, stat.get(s)});
    std::sort(out.begin(), out.end(), [&](const RankedEntry& a, const RankedEntry& b) {
        if (a.value.has_value() != b.value.has_value()) return a.value.has_value();
        if (a.value && *a.value != *b.value) return stat.higher_better ? *a.value > *b.value : *a.value < *b.value;
        return a.algorithm < b.algorithm;
    });
    return out;
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

std::vector<RankedEntry> rank(const std::vector<AlgorithmSummary>& summaries, Metric metric) {
    return rank_by(summaries, statistics()[metric_index(metric)]);
}

std::string compare_report(const std::vector<AlgorithmSummary>& summaries) {
    if (summaries.size() < 2) throw PreconditionError("compare_report needs at least two algorithms");
    std::set<std::size_t> seed_counts, episode_counts;
    for (const AlgorithmSummary& s : summaries) {
        seed_counts.insert(s.seeds);
        episode_counts.insert(s.episodes);
    }
    auto uniform = [](const std::set<std::size_t>& v) {
        return v.size() == 1 ? std::to_string(*v.begin()) : std::string("varies by algorithm (see table)");
    };

    std::ostringstream out;
    out << "Algorithm comparison\n" << kDeskScaleLabel << "\n\n";
    out << "Seeds per algorithm: " << uniform(seed_counts) << "\n";
    out << "Episodes per seed: " << uniform(episode_counts) << "\n";
    out << "Metric values are means over the final " << kFinalWindow
        << " episodes of the seed-mean curve; episodes_to_best uses a " << kSmoothingWindow
        << "-episode trailing mean of total_reward.\n\n";

    const auto stats = statistics();
    out << "Ranking (best first)\n";
    out << pad("statistic", 20) << pad("better", 8);
    for (std::size_t i = 0; i < summaries.size(); ++i) out << pad("#" + std::to_string(i + 1), 20);
    out << "\n";
    std::vector<std::vector<RankedEntry>> rankings;
    for (const Statistic& st : stats) {
        rankings.push_back(rank_by(summaries, st));
        out << pad(st.name, 20) << pad(st.higher_better ? "higher" : "lower", 8);
        for (const RankedEntry& e : rankings.back()) out << pad(e.algorithm + " (" + fmt(e.value) + ")", 20);
        out << "\n";
    }

    out << "\nPer-algorithm values\n";
    out << pad("algorithm", 11) << pad("seeds", 7) << pad("episodes", 10);
    for (const Statistic& st : stats) out << pad(st.name, std::max<std::size_t>(st.name.size() + 2, 12));
    out << "converged_final\n";
    for (const AlgorithmSummary& s : summaries) {
        out << pad(s.algorithm, 11) << pad(std::to_string(s.seeds), 7) << pad(std::to_string(s.episodes), 10);
        for (const Statistic& st : stats) out << pad(fmt(st.get(s)), std::max<std::size_t>(st.name.size() + 2, 12));
        out << fmt(s.final_convergence_rate) << "\n";
    }

    out << "\nLeaders\n";
    for (std::size_t i = 0; i < stats.size(); ++i) {
        out << "  " << pad(stats[i].name + ":", 20) << rankings[i].front().algorithm << "\n";
    }
    const bool has_pgnn = std::any_of(summaries.begin(), summaries.end(),
                                      [](const AlgorithmSummary& s) { return s.algorithm == "pgnn"; });
    if (has_pgnn) {
        out << "\nNote: pgnn has no Q function. Its mean_q column holds the mean ln pi(a|s) of chosen actions and\n"
               "its loss is a return-weighted cross-entropy, so those two ranks do not compare like with like.\n";
    }
    const bool has_drqn = std::any_of(summaries.begin(), summaries.end(),
                                      [](const AlgorithmSummary& s) { return s.algorithm == "drqn"; });
    if (has_drqn) {
        out << "\nDRQN observation (reported, not gated)\n";
        for (std::size_t i = 0; i < 2; ++i) {
            const auto& r = rankings[i];
            const auto pos = std::find_if(r.begin(), r.end(), [](const RankedEntry& e) { return e.algorithm == "drqn"; });
            out << "  drqn ranks " << (pos - r.begin() + 1) << " of " << r.size() << " on " << stats[i].name
                << (pos == r.begin() ? " (highest)" : "") << "\n";
        }
    }
    return out.str();
}

ReportOutput run_report(const std::string& in_dir, const std::string& out_dir) {
    if (!fs::is_directory(in_dir)) throw ConfigError("report input " + in_dir + " is not a directory");
    ReportOutput result;
    std::vector<std::string> manifests;
    for (const auto& entry : fs::directory_iterator(in_dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (algorithm_of(name)) result.inputs.push_back(entry.path().string());
        if (name.size() > 14 && name.substr(name.size() - 14) == ".manifest.json") manifests.push_back(entry.path().string());
    }
    std::sort(result.inputs.begin(), result.inputs.end());
    std::sort(manifests.begin(), manifests.end());
    if (result.inputs.empty()) throw ConfigError("no <algorithm>_seed<N>.csv files in " + in_dir);

    const std::vector<AlgorithmSummary> summaries = aggregate(result.inputs);
    fs::create_directories(out_dir);

    const fs::path summary_path = fs::path(out_dir) / "summary.json";
    write_file(summary_path, summary_json(summaries));
    result.files.push_back(summary_path.string());

    const PlotOutput plots = emit_plots(summaries, out_dir);
    result.files.insert(result.files.end(), plots.files.begin(), plots.files.end());
    result.warnings.insert(result.warnings.end(), plots.warnings.begin(), plots.warnings.end());

    const fs::path report_path = fs::path(out_dir) / "report.txt";
    if (summaries.size() >= 2) {
        write_file(report_path, compare_report(summaries));
        result.files.push_back(report_path.string());
    } else {
        result.warnings.push_back("ranking table skipped: only one algorithm (" + summaries.front().algorithm +
                                  ") has results");
    }

    json runs = json::array();
    for (const std::string& m : manifests) {
        std::ifstream in(m);
        json doc;
        try {
            doc = json::parse(in);
        } catch (const json::exception&) {
            result.warnings.push_back("unreadable run manifest " + m);
            continue;
        }
        json item;
        item["manifest"] = fs::path(m).filename().string();
        item["status"] = doc.value("status", "unknown");
        item["config_hash"] = doc.value("config_hash", "");
        if (item["status"] != "completed") {
            result.warnings.push_back("run manifest " + fs::path(m).filename().string() + " has status " +
                                      item["status"].get<std::string>());
        }
        runs.push_back(std::move(item));
    }

    json manifest;
    manifest["kind"] = "report";
    manifest["code_version"] = code_version();
    manifest["created_at"] = utc_now();
    manifest["input_dir"] = in_dir;
    json inputs = json::array();
    for (const std::string& p : result.inputs) inputs.push_back(fs::path(p).filename().string());
    manifest["inputs"] = std::move(inputs);
    manifest["runs"] = std::move(runs);
    json files = json::array();
    for (const std::string& p : result.files) files.push_back(fs::path(p).filename().string());
    manifest["files"] = std::move(files);
    manifest["warnings"] = result.warnings;
    manifest["label"] = kDeskScaleLabel;
    const fs::path manifest_path = fs::path(out_dir) / "report.manifest.json";
    write_file(manifest_path, manifest.dump(2) + "\n");
    result.files.push_back(manifest_path.string());
    return result;
}

}  // namespace adaptswarm::harness
