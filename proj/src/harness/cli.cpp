#include "adaptswarm/harness/cli.hpp"

#include <CLI11.hpp>

#include "adaptswarm/errors.hpp"
#include "adaptswarm/harness/metrics.hpp"
#include "adaptswarm/harness/report.hpp"
#include "adaptswarm/harness/runner.hpp"

namespace adaptswarm::harness {

ExperimentConfig resolve_run_config(const RunFlags& flags, const std::optional<std::string>& env_out) {
    ExperimentConfig c = flags.config_path ? load_config(*flags.config_path) : ExperimentConfig{};
    if (flags.algorithm) {
        const auto algo = agents::parse_algorithm(*flags.algorithm);
        if (!algo) {
            throw ConfigError("unknown algorithm '" + *flags.algorithm + "'; choose one of {" +
                              agents::algorithm_list() + "}");
        }
        c.algorithm = *algo;
        c.algorithm_set = true;
    }
    if (!c.algorithm_set) {
        throw ConfigError("--algo is required (or \"algorithm\" in the config file); choose one of {" +
                          agents::algorithm_list() + "}");
    }
    if (flags.episodes) c.episodes = *flags.episodes;
    if (flags.seeds) c.seeds = parse_seed_list(*flags.seeds);
    if (flags.output_dir) {
        c.output_dir = *flags.output_dir;
    } else if (c.output_dir.empty()) {
        c.output_dir = env_out && !env_out->empty() ? *env_out : "runs";
    }
    validate(c);
    return c;
}

int run_cli(const std::vector<std::string>& args, const CliContext& ctx) {
    std::ostream& out = ctx.out ? *ctx.out : std::cout;
    std::ostream& err = ctx.err ? *ctx.err : std::cerr;

    CLI::App app{"Reinforcement-learning autoscaling experiments on a simulated container swarm", "adaptswarm"};
    app.require_subcommand(1);
    app.set_version_flag("--version", code_version());

    RunFlags flags;
    bool quiet = false;
    CLI::App* run = app.add_subcommand("run", "Train one algorithm for every seed and write per-seed CSVs");
    run->add_option("--algo", flags.algorithm, "Algorithm: " + agents::algorithm_list());
    run->add_option("--episodes", flags.episodes, "Episodes per seed");
    run->add_option("--seed", flags.seeds, "Seed or comma-separated seeds");
    run->add_option("--config", flags.config_path, "JSON config file");
    run->add_option("--out", flags.output_dir, "Output directory (default: $ADAPT_SWARM_OUT or runs)");
    run->add_flag("--quiet", quiet, "No progress lines");

    std::optional<std::string> in_dir, report_out;
    CLI::App* report = app.add_subcommand("report", "Aggregate CSVs, draw charts and rank algorithms");
    report->add_option("--in", in_dir, "Directory holding <algo>_seed<N>.csv files (default: $ADAPT_SWARM_OUT or runs)");
    report->add_option("--out", report_out, "Where to write the report (default: the input directory)");

    std::optional<std::string> show_path;
    CLI::App* show = app.add_subcommand("config", "Print the effective configuration with every key");
    show->add_option("--config", show_path, "JSON config file to merge over the defaults");

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << code_version() << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        err << "run 'adaptswarm --help' for usage\n";
        return kExitConfig;
    }

    const std::string fallback_dir = ctx.env_out && !ctx.env_out->empty() ? *ctx.env_out : "runs";
    try {
        if (*run) {
            const ExperimentConfig config = resolve_run_config(flags, ctx.env_out);
            RunOptions options;
            options.should_stop = ctx.should_stop;
            options.log = quiet ? nullptr : &err;
            const RunReport r = run_experiment(config, options);
            out << "wrote " << r.csv_paths.size() << " CSV file(s) and " << r.manifest_path << "\n";
        } else if (*report) {
            const std::string dir = in_dir.value_or(fallback_dir);
            const ReportOutput r = run_report(dir, report_out.value_or(dir));
            for (const std::string& f : r.files) out << "wrote " << f << "\n";
            for (const std::string& w : r.warnings) err << "warning: " << w << "\n";
        } else if (*show) {
            ExperimentConfig c = show_path ? load_config(*show_path) : ExperimentConfig{};
            out << to_json(c);
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const SchemaError& e) {
        err << "input error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const Interrupted& e) {
        err << "stopped: " << e.what() << " (partial CSV kept, manifest marked failed)\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace adaptswarm::harness
