#include "adaptswarm/harness/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <numeric>

#include <json.hpp>

#include "adaptswarm/errors.hpp"

namespace adaptswarm::harness {

using nlohmann::json;

std::size_t metric_index(Metric m) {
    return static_cast<std::size_t>(std::find(kMetrics.begin(), kMetrics.end(), m) - kMetrics.begin());
}

const Curve& AlgorithmSummary::curve(Metric m) const { return curves[metric_index(m)]; }

std::optional<double> AlgorithmSummary::final_mean(Metric m) const { return final_means[metric_index(m)]; }

std::vector<double> trailing_mean(const std::vector<double>& values, std::size_t window) {
    if (window == 0) throw PreconditionError("trailing_mean window must be positive");
    std::vector<double> out(values.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        sum += values[i];
        if (i >= window) sum -= values[i - window];
        out[i] = sum / static_cast<double>(std::min(i + 1, window));
    }
    return out;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double rank = (static_cast<double>(i + j) / 2.0) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw DimensionError("spearman needs equal-length inputs");
    if (x.size() < 2) return 0.0;
    const std::vector<double> rx = average_ranks(x), ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

AlgorithmSummary summarize(const std::string& algorithm, const std::vector<std::vector<agents::EpisodeMetrics>>& runs) {
    if (runs.empty()) throw PreconditionError("summarize needs at least one run of " + algorithm);
    AlgorithmSummary s;
    s.algorithm = algorithm;
    s.seeds = runs.size();
    s.episodes = runs.front().size();
    for (const auto& r : runs) s.episodes = std::min(s.episodes, r.size());
    if (s.episodes == 0) throw PreconditionError("a run of " + algorithm + " has no episodes");

    for (std::size_t mi = 0; mi < kMetrics.size(); ++mi) {
        Curve& c = s.curves[mi];
        c.resize(s.episodes);
        for (std::size_t e = 0; e < s.episodes; ++e) {
            double sum = 0.0;
            int n = 0;
            for (const auto& r : runs) {
                if (const auto v = value_of(r[e], kMetrics[mi])) {
                    sum += *v;
                    ++n;
                }
            }
            if (n > 0) c[e] = sum / n;
        }
        const std::size_t from = s.episodes > kFinalWindow ? s.episodes - kFinalWindow : 0;
        double sum = 0.0;
        int n = 0;
        for (std::size_t e = from; e < s.episodes; ++e) {
            if (c[e]) {
                sum += *c[e];
                ++n;
            }
        }
        if (n > 0) s.final_means[mi] = sum / n;
    }

    std::vector<double> reward(s.episodes);
    for (std::size_t e = 0; e < s.episodes; ++e) reward[e] = *s.curve(Metric::total_reward)[e];
    s.smoothed_reward = trailing_mean(reward, kSmoothingWindow);
    s.episodes_to_best = static_cast<std::size_t>(
        std::max_element(s.smoothed_reward.begin(), s.smoothed_reward.end()) - s.smoothed_reward.begin()) + 1;
    std::vector<double> index(s.episodes);
    std::iota(index.begin(), index.end(), 1.0);
    s.spearman = spearman(index, s.smoothed_reward);

    const std::size_t from = s.episodes > kFinalWindow ? s.episodes - kFinalWindow : 0;
    int converged = 0, total = 0;
    for (const auto& r : runs) {
        for (std::size_t e = from; e < s.episodes; ++e) {
            converged += r[e].converged ? 1 : 0;
            ++total;
        }
    }
    s.final_convergence_rate = static_cast<double>(converged) / total;
    return s;
}

std::optional<std::string> algorithm_of(const std::string& csv_path) {
    const std::string name = std::filesystem::path(csv_path).filename().string();
    const std::size_t cut = name.rfind("_seed");
    if (cut == std::string::npos || cut == 0 || name.size() < 4 || name.substr(name.size() - 4) != ".csv") {
        return std::nullopt;
    }
    const std::string digits = name.substr(cut + 5, name.size() - 4 - cut - 5);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        return std::nullopt;
    }
    return name.substr(0, cut);
}

std::vector<AlgorithmSummary> aggregate(const std::vector<std::string>& csv_paths) {
    if (csv_paths.empty()) throw PreconditionError("aggregate needs at least one CSV");
    std::map<std::string, std::vector<std::string>> groups;
    for (const std::string& p : csv_paths) {
        const auto algo = algorithm_of(p);
        if (!algo) throw SchemaError(p + ": file name is not <algorithm>_seed<N>.csv");
        groups[*algo].push_back(p);
    }
    std::vector<AlgorithmSummary> out;
    for (auto& [algo, paths] : groups) {
        std::sort(paths.begin(), paths.end());
        std::vector<std::vector<agents::EpisodeMetrics>> runs;
        for (const std::string& p : paths) {
            runs.push_back(read_csv(p));
            if (runs.back().empty()) throw SchemaError(p + ": no episode rows");
        }
        out.push_back(summarize(algo, runs));
    }
    return out;
}

namespace {

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string summary_json(const std::vector<AlgorithmSummary>& summaries) {
    json doc = json::object();
    doc["smoothing_window"] = kSmoothingWindow;
    doc["final_window"] = kFinalWindow;
    json algos = json::object();
    for (const AlgorithmSummary& s : summaries) {
        json a;
        a["seeds"] = s.seeds;
        a["episodes"] = s.episodes;
        a["episodes_to_best"] = s.episodes_to_best;
        a["spearman"] = s.spearman;
        a["final_convergence_rate"] = s.final_convergence_rate;
        json finals = json::object(), curves = json::object();
        for (const Metric m : kMetrics) {
            const std::string name(column_name(m));
            finals[name] = optional_json(s.final_mean(m));
            json c = json::array();
            for (const auto& v : s.curve(m)) c.push_back(optional_json(v));
            curves[name] = std::move(c);
        }
        a["final_means"] = std::move(finals);
        a["curves"] = std::move(curves);
        a["smoothed_total_reward"] = s.smoothed_reward;
        algos[s.algorithm] = std::move(a);
    }
    doc["algorithms"] = std::move(algos);
    return doc.dump(2) + "\n";
}

}  // namespace adaptswarm::harness
