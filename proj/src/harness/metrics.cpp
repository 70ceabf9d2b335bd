#include "adaptswarm/harness/metrics.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "adaptswarm/text.hpp"

namespace adaptswarm::harness {

namespace {

constexpr std::array<std::string_view, 8> kColumns{"episode", "steps", "total_reward", "mean_q",
                                                   "mae", "loss", "adaptation_time_s", "converged"};

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        out.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

template <class T>
T parse_number(std::string_view text, const std::string& where) {
    T v{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw SchemaError(where + ": '" + std::string(text) + "' is not a number");
    }
    return v;
}

std::optional<double> parse_optional(std::string_view text, const std::string& where) {
    if (text.empty()) return std::nullopt;
    return parse_number<double>(text, where);
}

}  // namespace

std::string csv_row(const agents::EpisodeMetrics& m) {
    std::string row = std::to_string(m.episode);
    row += ',' + std::to_string(m.steps);
    row += ',' + format_double(m.total_reward);
    row += ',' + format_double(m.mean_q);
    row += ',' + cell(m.mae);
    row += ',' + cell(m.loss);
    row += ',' + format_double(m.adaptation_time_s);
    row += m.converged ? ",1" : ",0";
    return row;
}

std::vector<agents::EpisodeMetrics> parse_csv(std::string_view text, const std::string& source) {
    std::vector<std::string_view> lines;
    for (std::size_t pos = 0; pos < text.size();) {
        const std::size_t nl = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) lines.push_back(line);
        pos = nl + 1;
    }
    if (lines.empty()) throw SchemaError(source + ": missing header");
    const auto header = split(lines.front());
    for (std::size_t i = 0; i < std::max(header.size(), kColumns.size()); ++i) {
        const std::string_view want = i < kColumns.size() ? kColumns[i] : "(none)";
        const std::string_view got = i < header.size() ? header[i] : "(none)";
        if (want != got) {
            throw SchemaError(source + ": column " + std::to_string(i + 1) + " is '" + std::string(got) +
                              "', expected '" + std::string(want) + "'");
        }
    }

    std::vector<agents::EpisodeMetrics> rows;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const auto cells = split(lines[li]);
        const std::string where = source + " line " + std::to_string(li + 1);
        if (cells.size() != kColumns.size()) {
            throw SchemaError(where + ": expected " + std::to_string(kColumns.size()) + " cells, found " +
                              std::to_string(cells.size()));
        }
        auto at = [&](std::size_t c) { return where + " column " + std::string(kColumns[c]); };
        agents::EpisodeMetrics m;
        m.episode = parse_number<int>(cells[0], at(0));
        m.steps = parse_number<int>(cells[1], at(1));
        m.total_reward = parse_number<double>(cells[2], at(2));
        m.mean_q = parse_number<double>(cells[3], at(3));
        m.mae = parse_optional(cells[4], at(4));
        m.loss = parse_optional(cells[5], at(5));
        m.adaptation_time_s = parse_number<double>(cells[6], at(6));
        if (cells[7] != "0" && cells[7] != "1") throw SchemaError(at(7) + ": expected 0 or 1");
        m.converged = cells[7] == "1";
        rows.push_back(m);
    }
    return rows;
}

std::vector<agents::EpisodeMetrics> read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot read " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_csv(text.str(), path);
}

std::string_view column_name(Metric m) {
    switch (m) {
        case Metric::mean_q: return "mean_q";
        case Metric::total_reward: return "total_reward";
        case Metric::mae: return "mae";
        case Metric::adaptation_time_s: return "adaptation_time_s";
        case Metric::loss: return "loss";
    }
    return "?";
}

std::string_view title(Metric m) {
    switch (m) {
        case Metric::mean_q: return "Mean Q value per episode";
        case Metric::total_reward: return "Total reward per episode";
        case Metric::mae: return "Mean absolute error (MAE)";
        case Metric::adaptation_time_s: return "Adaptation time (s)";
        case Metric::loss: return "Loss per episode";
    }
    return "?";
}

bool higher_is_better(Metric m) { return m == Metric::mean_q || m == Metric::total_reward; }

std::optional<double> value_of(const agents::EpisodeMetrics& e, Metric m) {
    switch (m) {
        case Metric::mean_q: return e.mean_q;
        case Metric::total_reward: return e.total_reward;
        case Metric::mae: return e.mae;
        case Metric::adaptation_time_s: return e.adaptation_time_s;
        case Metric::loss: return e.loss;
    }
    return std::nullopt;
}

}  // namespace adaptswarm::harness
