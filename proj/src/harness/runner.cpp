#include "adaptswarm/harness/runner.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "adaptswarm/env/environment.hpp"
#include "adaptswarm/harness/metrics.hpp"
#include "adaptswarm/rng.hpp"

#ifndef ADAPTSWARM_VERSION
#define ADAPTSWARM_VERSION "unknown"
#endif

namespace adaptswarm::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Stream of derive_seed reserved for agent initialisation; episode streams start at 1.
constexpr std::uint64_t kAgentStream = 0;

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << text;
        out.flush();
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
    }
    fs::rename(tmp, path);
}

json metric_notes(agents::Algorithm algo) {
    json notes;
    notes["adaptation_time_s"] = "sum of simulated action durations over the episode";
    notes["mae"] = "mean absolute Bellman error over the episode's training updates; empty when none ran";
    notes["loss"] = "mean training loss over the episode's updates; empty when none ran";
    if (algo == agents::Algorithm::pgnn) {
        notes["mean_q"] = "mean log-probability ln pi(a|s) of the chosen actions (the policy learner has no Q)";
        notes["mae"] = "not defined for the policy-gradient learner; always empty";
    } else if (algo == agents::Algorithm::ddpg) {
        notes["mean_q"] = "mean critic value Q(s, mu(s)) at action selection";
    } else {
        notes["mean_q"] = "mean Q(s, a) of the chosen actions";
    }
    return notes;
}

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::string csv_file_name(agents::Algorithm algorithm, std::uint64_t seed) {
    return std::string(agents::to_string(algorithm)) + "_seed" + std::to_string(seed) + ".csv";
}

std::string manifest_file_name(agents::Algorithm algorithm) {
    return std::string(agents::to_string(algorithm)) + ".manifest.json";
}

std::string checkpoint_file_name(agents::Algorithm algorithm, std::uint64_t seed) {
    return std::string(agents::to_string(algorithm)) + "_seed" + std::to_string(seed) + ".agent";
}

std::string code_version() { return "adaptswarm " ADAPTSWARM_VERSION; }

RunReport run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    validate(config);
    const agents::Algorithm algo = config.algorithm;
    const std::string tag(agents::to_string(algo));
    const fs::path dir = config.output_dir.empty() ? fs::path("runs") : fs::path(config.output_dir);
    fs::create_directories(dir);

    RunReport report;
    report.manifest_path = (dir / manifest_file_name(algo)).string();
    const std::string hash = config_hash(config);

    json manifest;
    manifest["algorithm"] = tag;
    manifest["config"] = json::parse(to_json(config));
    manifest["config_hash"] = hash;
    manifest["code_version"] = code_version();
    manifest["seeds"] = config.seeds;
    manifest["episodes"] = config.episodes;
    manifest["started_at"] = utc_now();
    manifest["finished_at"] = nullptr;
    manifest["status"] = "running";
    manifest["csv_files"] = json::array();
    manifest["checkpoints"] = json::array();
    manifest["wall_seconds"] = json::object();
    manifest["csv_columns"] = std::string(kCsvHeader);
    manifest["metric_notes"] = metric_notes(algo);
    manifest["warnings"] = json::array();
    auto save_manifest = [&] { write_text(report.manifest_path, manifest.dump(2) + "\n"); };
    save_manifest();

    const agents::AgentConfig agent_config = effective_agent_config(config);
    try {
        for (const std::uint64_t seed : config.seeds) {
            const auto t0 = std::chrono::steady_clock::now();
            const fs::path csv_path = dir / csv_file_name(algo, seed);
            manifest["csv_files"].push_back(csv_path.filename().string());
            report.csv_paths.push_back(csv_path.string());
            save_manifest();

            std::ofstream csv(csv_path, std::ios::binary | std::ios::trunc);
            if (!csv) throw std::runtime_error("cannot open " + csv_path.string() + " for writing");
            csv << kCsvHeader << '\n' << std::flush;

            env::SwarmEnvironment environment(config.env);
            auto agent = agents::make_agent(algo, agent_config, environment.observation_size(),
                                            environment.action_count(), derive_seed(seed, kAgentStream));
            double window_reward = 0.0;
            for (int ep = 1; ep <= config.episodes; ++ep) {
                if (options.should_stop && options.should_stop()) {
                    throw Interrupted("interrupted during seed " + std::to_string(seed) + " before episode " +
                                      std::to_string(ep));
                }
                const env::Observation start = environment.reset(derive_seed(seed, static_cast<std::uint64_t>(ep)));
                agents::EpisodeResult r = agents::run_episode(*agent, environment, start);
                r.metrics.episode = ep;
                csv << csv_row(r.metrics) << '\n' << std::flush;
                if (!csv) throw std::runtime_error("write to " + csv_path.string() + " failed");

                window_reward += r.metrics.total_reward;
                if (options.log && options.log_every > 0 &&
                    (ep % options.log_every == 0 || ep == config.episodes)) {
                    const int span = ep % options.log_every == 0 ? options.log_every : ep % options.log_every;
                    *options.log << tag << " seed " << seed << ": episode " << ep << '/' << config.episodes
                                 << ", mean reward over last " << span << " = "
                                 << fixed2(window_reward / span) << '\n'
                                 << std::flush;
                    window_reward = 0.0;
                }
            }

            const fs::path ckpt = dir / checkpoint_file_name(algo, seed);
            const std::vector<std::uint8_t> bytes = agents::save_checkpoint(*agent, hash);
            {
                std::ofstream out(ckpt, std::ios::binary | std::ios::trunc);
                out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
                if (!out) throw std::runtime_error("cannot write " + ckpt.string());
            }
            manifest["checkpoints"].push_back(ckpt.filename().string());

            const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            report.wall_seconds[seed] = wall;
            manifest["wall_seconds"][std::to_string(seed)] = wall;
            save_manifest();
        }
    } catch (const std::exception& e) {
        manifest["status"] = "failed";
        manifest["error"] = e.what();
        manifest["finished_at"] = utc_now();
        try {
            save_manifest();
        } catch (const std::exception&) {
            // the original error is more useful to the caller
        }
        throw;
    }

    manifest["status"] = "completed";
    manifest["finished_at"] = utc_now();
    save_manifest();
    return report;
}

}  // namespace adaptswarm::harness
