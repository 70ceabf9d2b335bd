#include "adaptswarm/harness/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "adaptswarm/errors.hpp"

namespace adaptswarm::harness {

namespace {

constexpr double kWidth = 800, kHeight = 480;
constexpr double kLeft = 80, kRight = 160, kTop = 50, kBottom = 60;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

double nice_step(double span, int target) {
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
        if (m * mag >= raw) return m * mag;
    }
    return 10.0 * mag;
}

}  // namespace

std::string chart_file_name(Metric metric) { return std::string(column_name(metric)) + ".svg"; }

std::optional<std::string> render_chart(const std::vector<AlgorithmSummary>& summaries, Metric metric) {
    double lo = INFINITY, hi = -INFINITY;
    std::size_t episodes = 1;
    for (const AlgorithmSummary& s : summaries) {
        episodes = std::max(episodes, s.episodes);
        for (const auto& v : s.curve(metric)) {
            if (!v) continue;
            lo = std::min(lo, *v);
            hi = std::max(hi, *v);
        }
    }
    if (!(lo <= hi)) return std::nullopt;
    if (hi - lo < 1e-12) {
        const double pad = std::max(1.0, std::abs(hi) * 0.1);
        lo -= pad;
        hi += pad;
    }
    const double ystep = nice_step(hi - lo, 6);
    lo = std::floor(lo / ystep) * ystep;
    hi = std::ceil(hi / ystep) * ystep;
    const double xmax = static_cast<double>(std::max<std::size_t>(episodes, 2));
    const double xstep = std::max(1.0, std::ceil(nice_step(xmax - 1.0, 8)));

    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto px = [&](double e) { return kLeft + (e - 1.0) / (xmax - 1.0) * pw; };
    auto py = [&](double v) { return kTop + (hi - v) / (hi - lo) * ph; };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
           "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\" font-family=\"sans-serif\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"28\" text-anchor=\"middle\" font-size=\"18\">" +
           escape(std::string(title(metric))) + "</text>\n";

    svg += "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
    for (int k = 0; lo + k * ystep <= hi + ystep * 1e-9; ++k) {
        const double v = lo + k * ystep;
        svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(py(v)) + "\" x2=\"" + num(kLeft + pw) + "\" y2=\"" +
               num(py(v)) + "\"/>\n";
    }
    svg += "</g>\n<g font-size=\"12\" fill=\"#333333\">\n";
    for (int k = 0; lo + k * ystep <= hi + ystep * 1e-9; ++k) {
        const double v = lo + k * ystep;
        svg += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(py(v) + 4) + "\" text-anchor=\"end\">" +
               tick_label(v) + "</text>\n";
    }
    for (int k = 0; k == 0 || k * xstep <= xmax + 1e-9; ++k) {
        const double e = k == 0 ? 1.0 : k * xstep;
        if (k > 0 && e <= 1.0) continue;
        svg += "<text x=\"" + num(px(e)) + "\" y=\"" + num(kTop + ph + 18) + "\" text-anchor=\"middle\">" +
               tick_label(e) + "</text>\n";
    }
    svg += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kHeight - 15) +
           "\" text-anchor=\"middle\" font-size=\"14\">Episode</text>\n";
    svg += "<text x=\"20\" y=\"" + num(kTop + ph / 2) + "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 20 " +
           num(kTop + ph / 2) + ")\">" + escape(std::string(column_name(metric))) + "</text>\n";
    svg += "</g>\n";
    svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
           "\" fill=\"none\" stroke=\"#333333\"/>\n";

    for (std::size_t i = 0; i < summaries.size(); ++i) {
        const AlgorithmSummary& s = summaries[i];
        const std::string colour = kPalette[i % std::size(kPalette)];
        const Curve& c = s.curve(metric);
        const bool has_data = std::any_of(c.begin(), c.end(), [](const auto& v) { return v.has_value(); });

        svg += "<g fill=\"none\" stroke=\"" + colour + "\" stroke-width=\"1.5\">\n";
        std::string points;
        auto flush = [&] {
            if (!points.empty()) svg += "<polyline points=\"" + points + "\"/>\n";
            points.clear();
        };
        for (std::size_t e = 0; e < c.size(); ++e) {
            if (!c[e]) {
                flush();
                continue;
            }
            if (!points.empty()) points += ' ';
            points += num(px(static_cast<double>(e + 1))) + "," + num(py(*c[e]));
        }
        flush();
        svg += "</g>\n";

        const double ly = kTop + 10 + 22.0 * static_cast<double>(i);
        const double lx = kLeft + pw + 15;
        svg += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(lx + 24) + "\" y2=\"" + num(ly) +
               "\" stroke=\"" + colour + "\" stroke-width=\"3\"" + (has_data ? "" : " stroke-dasharray=\"3 3\"") +
               "/>\n";
        svg += "<text x=\"" + num(lx + 30) + "\" y=\"" + num(ly + 4) + "\" font-size=\"13\">" + escape(s.algorithm) +
               (has_data ? "" : " (no data)") + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

PlotOutput emit_plots(const std::vector<AlgorithmSummary>& summaries, const std::string& outdir) {
    if (summaries.empty()) throw PreconditionError("emit_plots needs at least one summary");
    std::filesystem::create_directories(outdir);
    PlotOutput out;
    for (const Metric m : kMetrics) {
        const auto svg = render_chart(summaries, m);
        if (!svg) {
            out.warnings.push_back("chart " + chart_file_name(m) + " omitted: no algorithm has " +
                                   std::string(column_name(m)) + " values");
            continue;
        }
        const std::string path = (std::filesystem::path(outdir) / chart_file_name(m)).string();
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        f << *svg;
        if (!f) throw std::runtime_error("cannot write " + path);
        out.files.push_back(path);
    }
    return out;
}

}  // namespace adaptswarm::harness
