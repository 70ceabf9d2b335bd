// Acceptance suite: one PASS/FAIL line per criterion. Tolerances and budgets
// are fixed here; a criterion that misses them fails and says by how much.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adaptswarm/agents/actor_critic.hpp"
#include "adaptswarm/agents/agent.hpp"
#include "adaptswarm/agents/q_learning.hpp"
#include "adaptswarm/agents/q_network.hpp"
#include "adaptswarm/harness/aggregate.hpp"
#include "adaptswarm/harness/metrics.hpp"
#include "adaptswarm/harness/report.hpp"
#include "adaptswarm/harness/runner.hpp"
#include "adaptswarm/nn/loss.hpp"
#include "adaptswarm/nn/network.hpp"
#include "fixtures.hpp"
#include "gradcheck.hpp"
#include "oracle_runs.hpp"
#include "raft_fuzz.hpp"
#include "temp_dir.hpp"

using namespace adaptswarm;
namespace fs = std::filesystem;
using testing::kFdStep;
using testing::kFdStepFine;
using testing::numeric_gradient;
using testing::relative_error;

namespace {

// Pinned thresholds.
constexpr double kGradTol = 1e-4;
constexpr int kGradInstances = 20;
constexpr double kGradBudgetS = 30.0;
constexpr double kChainTargetTol = 1e-9;
constexpr int kChainEpisodes = 500;
constexpr int kChainSeeds = 10, kChainRequired = 9;
constexpr double kChainBudgetS = 60.0;
constexpr int kFuzzRuns = 1000;
constexpr double kFuzzBudgetS = 60.0;
constexpr int kDeterminismEpisodes = 50;
constexpr int kBanditEpisodes = 300;
constexpr int kBanditSeeds = 10, kBanditRequired = 8;
constexpr double kBanditThreshold = 0.9;
constexpr double kBanditBudgetS = 30.0;
constexpr int kOuSteps = 1'000'000;
constexpr double kOuMu = 1.0, kOuMeanTol = 0.01, kOuVarTol = 0.05;
constexpr int kSmokeEpisodes = 200;
constexpr std::uint64_t kSmokeSeed = 42;
constexpr double kSmokeBudgetS = 600.0;
constexpr int kCompareEpisodes = 300;
const std::vector<std::uint64_t> kCompareSeeds{1, 2, 3, 4, 5};

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, const char* spec = "%.3g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

nn::Vector random_vector(std::size_t n, Rng& rng) {
    nn::Vector v(n);
    nn::fill_uniform(v, 1.0, rng);
    return v;
}

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

std::vector<std::vector<double>> blocks(const nn::Gradients& g) { return {g.begin(), g.end()}; }

// Analytic vs numeric gradient of c·f(x) + ½‖f(x)‖² for a whole network.
double network_error(nn::Network& net, const nn::Matrix& input, const nn::Vector& c, double step) {
    nn::Tape tape;
    const nn::Vector out = net.forward(input, &tape);
    nn::Vector g(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) g[i] = c[i] + out[i];
    const nn::Gradients analytic = net.backprop(tape, g);
    const auto numeric = numeric_gradient(
        net.parameters(),
        [&] {
            const nn::Vector o = net.forward(input);
            return dot(c, o) + 0.5 * dot(o, o);
        },
        step);
    return relative_error(blocks(analytic), numeric);
}

// ---------------------------------------------------------------- criterion 1
Outcome gradient_suite() {
    const auto t0 = std::chrono::steady_clock::now();
    struct Family {
        std::string name;
        double worst = 0.0;
        int checked = 0;
    };
    std::vector<Family> families;
    auto record = [&](const std::string& name, double err) {
        auto it = std::find_if(families.begin(), families.end(), [&](const Family& f) { return f.name == name; });
        if (it == families.end()) {
            families.push_back({name});
            it = families.end() - 1;
        }
        it->worst = std::max(it->worst, err);
        ++it->checked;
    };

    const std::pair<const char*, nn::Activation> acts[] = {{"dense/relu", nn::Activation::relu},
                                                           {"dense/linear", nn::Activation::linear},
                                                           {"dense/tanh", nn::Activation::tanh},
                                                           {"dense/sigmoid", nn::Activation::sigmoid},
                                                           {"dense/softmax", nn::Activation::softmax}};
    for (int i = 0; i < kGradInstances; ++i) {
        Rng rng(5000 + static_cast<std::uint64_t>(i));
        for (const auto& [name, act] : acts) {
            nn::Network net = nn::make_network(
                6, {nn::LayerSpec::flatten(), nn::LayerSpec::dense(4, act)}, rng);
            for (auto b : net.parameters()) nn::fill_uniform(b, 0.8, rng);
            nn::Matrix x(1, 6, random_vector(6, rng));
            // relu kinks: the fine step keeps perturbations on one side of zero
            const double step = act == nn::Activation::relu ? kFdStepFine : kFdStep;
            record(name, network_error(net, x, random_vector(4, rng), step));
        }

        nn::Network gru = nn::make_network(
            4, {nn::LayerSpec::flatten(), nn::LayerSpec::gru(5), nn::LayerSpec::dense(3, nn::Activation::linear)}, rng,
            3);
        for (auto b : gru.parameters()) nn::fill_uniform(b, 0.8, rng);
        record("gru/3-step", network_error(gru, nn::Matrix(3, 4, random_vector(12, rng)), random_vector(3, rng), kFdStep));

        for (auto mode : {agents::DuelingMode::uncentered, agents::DuelingMode::mean_centered}) {
            agents::QNetwork q = agents::make_dueling_network(6, 10, 8, mode, rng);
            const nn::Vector x = random_vector(6, rng), c = random_vector(10, rng);
            agents::QTape tape;
            q.forward(nn::Matrix::row_vector(x), &tape);
            const nn::Gradients analytic = q.backprop(tape, c);
            const auto numeric = numeric_gradient(q.parameters(), [&] { return dot(c, q.forward(x)); }, kFdStepFine);
            record(std::string("dueling/") + std::string(agents::to_string(mode)), relative_error(blocks(analytic), numeric));
        }

        {
            nn::Network actor = agents::make_actor_network(5, 10, 8, rng);
            const nn::Network critic = agents::make_critic_network(5, 10, 8, rng);
            const nn::Vector s = random_vector(5, rng);
            const nn::Gradients analytic = agents::actor_ascent_gradient(actor, critic, s);
            const auto numeric = numeric_gradient(
                actor.parameters(), [&] { return agents::critic_value(critic, s, actor.forward(s)); }, kFdStepFine);
            record("actor-through-critic", relative_error(blocks(analytic), numeric));
        }

        nn::Vector pred = random_vector(5, rng), target = random_vector(5, rng);
        record("loss/mse", relative_error({nn::mse(pred, target).gradient},
                                          numeric_gradient({pred}, [&] { return nn::mse(pred, target).value; })));
        nn::Vector probs = nn::activate(nn::Activation::softmax, random_vector(4, rng));
        const std::size_t index = static_cast<std::size_t>(i % 4);
        const double weight = 0.5 + 0.1 * i;
        record("loss/cross_entropy",
               relative_error({nn::cross_entropy(probs, index, weight).gradient},
                              numeric_gradient({probs}, [&] { return nn::cross_entropy(probs, index, weight).value; })));
    }

    const double elapsed = seconds_since(t0);
    Outcome o;
    o.pass = elapsed < kGradBudgetS;
    std::string worst_name;
    double worst = 0.0;
    for (const Family& f : families) {
        if (f.checked != kGradInstances || f.worst >= kGradTol) o.pass = false;
        if (f.worst >= worst) {
            worst = f.worst;
            worst_name = f.name;
        }
    }
    o.detail = std::to_string(families.size()) + " families x " + std::to_string(kGradInstances) +
               " instances, worst rel err " + fmt(worst) + " (" + worst_name + ") < " + fmt(kGradTol) + ", " +
               fmt(elapsed, "%.1f") + " s < " + fmt(kGradBudgetS, "%.0f") + " s";
    return o;
}

// ---------------------------------------------------------------- criterion 2
Outcome chain_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    using testing::ChainEnv;
    const double gamma = 0.9;
    const auto q = testing::chain_value_iteration(gamma);
    nn::DenseLayer d;
    d.params.weights = nn::Matrix(2, ChainEnv::kStates, 0.0);
    d.params.bias = {0.0, 0.0};
    for (int s = 0; s < ChainEnv::kStates; ++s) {
        for (int a = 0; a < 2; ++a) d.params.weights(static_cast<std::size_t>(a), static_cast<std::size_t>(s)) = q[s][a];
    }
    const agents::QNetwork exact(nn::Network(ChainEnv::kStates, {nn::FlattenLayer{}, d}));
    double worst = 0.0;
    for (int s = 0; s < ChainEnv::kGoal; ++s) {
        for (int a = 0; a < 2; ++a) {
            const int s2 = ChainEnv::next_state(s, a);
            const agents::Transition t{ChainEnv::encode(s), a, ChainEnv::reward(s2), ChainEnv::encode(s2),
                                       s2 == ChainEnv::kGoal, {}};
            const agents::Transition* batch[] = {&t};
            worst = std::max(worst, std::abs(agents::bellman_targets(batch, exact, gamma)[0] - q[s][a]));
        }
    }
    int solved = 0;
    for (std::uint64_t seed = 0; seed < kChainSeeds; ++seed) solved += testing::chain_dqn_learns(seed, kChainEpisodes);
    const double elapsed = seconds_since(t0);
    return {worst <= kChainTargetTol && solved >= kChainRequired && elapsed < kChainBudgetS,
            "target error " + fmt(worst) + " <= " + fmt(kChainTargetTol) + "; optimal greedy policy after " +
                std::to_string(kChainEpisodes) + " episodes on " + std::to_string(solved) + "/" +
                std::to_string(kChainSeeds) + " seeds (need " + std::to_string(kChainRequired) + "); " +
                fmt(elapsed, "%.1f") + " s < " + fmt(kChainBudgetS, "%.0f") + " s"};
}

// ---------------------------------------------------------------- criterion 3
Outcome raft_fuzz() {
    const auto t0 = std::chrono::steady_clock::now();
    int violations = 0, rejected = 0, crashes = 0, committed = 0, three = 0, five = 0, without_crash = 0;
    std::string first;
    for (std::uint64_t seed = 0; seed < kFuzzRuns; ++seed) {
        const testing::FuzzOutcome r = testing::fuzz_gate(seed);
        (seed % 2 ? five : three)++;
        violations += static_cast<int>(r.violations.size());
        if (first.empty() && !r.violations.empty()) first = r.violations.front();
        rejected += r.rejected_in_log;
        crashes += r.leader_crashes;
        without_crash += r.leader_crashes == 0;
        committed += r.committed;
    }
    const double elapsed = seconds_since(t0);
    std::string detail = std::to_string(kFuzzRuns) + " runs (" + std::to_string(three) + " on 3 managers, " +
                         std::to_string(five) + " on 5), " + std::to_string(crashes) + " leader crashes, " +
                         std::to_string(committed) + " commits; safety violations " + std::to_string(violations) +
                         ", rejected ballots in logs " + std::to_string(rejected) + "; " + fmt(elapsed, "%.1f") +
                         " s < " + fmt(kFuzzBudgetS, "%.0f") + " s";
    if (!first.empty()) detail += "; first violation: " + first;
    return {violations == 0 && rejected == 0 && without_crash == 0 && elapsed < kFuzzBudgetS, detail};
}

harness::ExperimentConfig experiment(agents::Algorithm algo, int episodes, std::vector<std::uint64_t> seeds,
                                     const std::string& out) {
    harness::ExperimentConfig c;
    c.algorithm = algo;
    c.algorithm_set = true;
    c.episodes = episodes;
    c.seeds = std::move(seeds);
    c.output_dir = out;
    return c;
}

// ---------------------------------------------------------------- criterion 4
Outcome determinism() {
    testing::TempDir dir("determinism");
    std::string mismatched;
    for (auto algo : agents::kAlgorithms) {
        const auto a = harness::run_experiment(experiment(algo, kDeterminismEpisodes, {kSmokeSeed}, dir / "a"));
        const auto b = harness::run_experiment(experiment(algo, kDeterminismEpisodes, {kSmokeSeed}, dir / "b"));
        const std::string ta = testing::read_file(a.csv_paths[0]), tb = testing::read_file(b.csv_paths[0]);
        const bool full = std::count(ta.begin(), ta.end(), '\n') == kDeterminismEpisodes + 1;
        if (ta != tb || !full) mismatched += (mismatched.empty() ? "" : ", ") + std::string(agents::to_string(algo));
    }
    return {mismatched.empty(), mismatched.empty()
                                    ? "two runs per algorithm, " + std::to_string(kDeterminismEpisodes) +
                                          " episodes at seed 42: all five CSV pairs byte-identical"
                                    : "differing CSVs: " + mismatched};
}

// ---------------------------------------------------------------- criterion 5
Outcome bandit() {
    const auto t0 = std::chrono::steady_clock::now();
    int good = 0;
    double lowest = 1.0;
    for (std::uint64_t seed = 0; seed < kBanditSeeds; ++seed) {
        const double p = testing::bandit_best_arm_probability(seed, kBanditEpisodes);
        good += p > kBanditThreshold;
        lowest = std::min(lowest, p);
    }
    const double elapsed = seconds_since(t0);
    return {good >= kBanditRequired && elapsed < kBanditBudgetS,
            "pi(best arm) > " + fmt(kBanditThreshold) + " after " + std::to_string(kBanditEpisodes) + " episodes on " +
                std::to_string(good) + "/" + std::to_string(kBanditSeeds) + " seeds (need " +
                std::to_string(kBanditRequired) + "), lowest " + fmt(lowest, "%.4f") + "; " + fmt(elapsed, "%.2f") +
                " s < " + fmt(kBanditBudgetS, "%.0f") + " s"};
}

// ---------------------------------------------------------------- criterion 6
Outcome ou_statistics() {
    agents::AgentConfig defaults;
    agents::OUProcess p(1, defaults.ou_theta, defaults.ou_sigma, defaults.ou_dt);
    p.mu = {kOuMu};
    p.reset();
    Rng rng(6);
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < kOuSteps; ++i) {
        const double x = agents::ou_step(p, rng)[0];
        sum += x;
        sq += x * x;
    }
    const double mean = sum / kOuSteps;
    const double var = sq / kOuSteps - mean * mean;
    const double expected = p.stationary_variance();
    const double mean_err = std::abs(mean - kOuMu) / kOuMu;
    const double var_err = std::abs(var - expected) / expected;
    return {mean_err < kOuMeanTol && var_err < kOuVarTol,
            std::to_string(kOuSteps) + " steps (theta " + fmt(defaults.ou_theta) + ", sigma " + fmt(defaults.ou_sigma) +
                ", dt " + fmt(defaults.ou_dt) + ", mu " + fmt(kOuMu) + "): mean " + fmt(mean, "%.5f") +
                " (rel err " + fmt(mean_err) + " < " + fmt(kOuMeanTol) + "), variance " + fmt(var, "%.5f") +
                " vs closed form " + fmt(expected, "%.5f") + " (rel err " + fmt(var_err) + " < " + fmt(kOuVarTol) +
                ")"};
}

double mean_reward(const std::vector<agents::EpisodeMetrics>& rows, std::size_t from, std::size_t to) {
    double s = 0.0;
    for (std::size_t i = from; i < to; ++i) s += rows[i].total_reward;
    return s / static_cast<double>(to - from);
}

// ---------------------------------------------------------------- criterion 7
Outcome learning_smoke(const std::string& out) {
    Outcome o{true, ""};
    for (auto algo : agents::kAlgorithms) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto r = harness::run_experiment(experiment(algo, kSmokeEpisodes, {kSmokeSeed}, out));
        const double elapsed = seconds_since(t0);
        const auto rows = harness::read_csv(r.csv_paths[0]);
        const double first = mean_reward(rows, 0, 50), last = mean_reward(rows, 150, 200);
        const bool gated = algo == agents::Algorithm::dqn || algo == agents::Algorithm::ddqn ||
                           algo == agents::Algorithm::drqn;
        const bool ok = rows.size() == static_cast<std::size_t>(kSmokeEpisodes) && elapsed < kSmokeBudgetS &&
                        (!gated || last > first);
        o.pass = o.pass && ok;
        o.detail += std::string(o.detail.empty() ? "" : "; ") + std::string(agents::to_string(algo)) + " " +
                    fmt(elapsed, "%.1f") + " s, reward 1-50 " + fmt(first, "%.1f") + " -> 151-200 " +
                    fmt(last, "%.1f") + (gated ? (last > first ? " (improved)" : " (NOT improved)") : " (not gated)");
    }
    o.detail += "; budget " + fmt(kSmokeBudgetS, "%.0f") + " s per algorithm";
    return o;
}

// ---------------------------------------------------------------- criteria 8, 9
Outcome comparative_report(const std::string& out, std::string& report_text) {
    for (auto algo : agents::kAlgorithms) harness::run_experiment(experiment(algo, kCompareEpisodes, kCompareSeeds, out));
    harness::run_report(out, out);
    report_text = testing::read_file((fs::path(out) / "report.txt").string());
    const auto summaries = harness::aggregate([&] {
        std::vector<std::string> csvs;
        for (const auto& e : fs::directory_iterator(out)) {
            if (harness::algorithm_of(e.path().string())) csvs.push_back(e.path().string());
        }
        return csvs;
    }());
    const bool shape = summaries.size() == agents::kAlgorithms.size() &&
                       std::all_of(summaries.begin(), summaries.end(), [](const harness::AlgorithmSummary& s) {
                           return s.seeds == kCompareSeeds.size() && s.episodes == static_cast<std::size_t>(kCompareEpisodes);
                       });
    const bool has_table = report_text.find("Ranking (best first)") != std::string::npos &&
                           report_text.find(harness::kDeskScaleLabel) != std::string::npos &&
                           report_text.find("DRQN observation") != std::string::npos;
    const auto q_rank = harness::rank(summaries, harness::Metric::mean_q);
    const auto r_rank = harness::rank(summaries, harness::Metric::total_reward);
    auto place = [](const std::vector<harness::RankedEntry>& r) {
        return std::find_if(r.begin(), r.end(), [](const auto& e) { return e.algorithm == "drqn"; }) - r.begin() + 1;
    };
    return {shape && has_table,
            std::to_string(kCompareSeeds.size()) + " seeds x " + std::to_string(kCompareEpisodes) +
                " episodes x 5 algorithms; ranking table emitted; DRQN observation (not gated): mean_q rank " +
                std::to_string(place(q_rank)) + "/5, total_reward rank " + std::to_string(place(r_rank)) + "/5"};
}

Outcome csv_plot_contract(const std::string& out) {
    std::string problems;
    std::size_t csvs = 0;
    for (const auto& e : fs::directory_iterator(out)) {
        if (!harness::algorithm_of(e.path().string())) continue;
        ++csvs;
        const std::string text = testing::read_file(e.path().string());
        if (text.substr(0, text.find('\n')) != harness::kCsvHeader) problems += " bad header in " + e.path().filename().string();
        try {
            harness::parse_csv(text);
        } catch (const std::exception& ex) {
            problems += std::string(" ") + ex.what();
        }
    }
    int svgs = 0;
    for (auto m : harness::kMetrics) {
        const fs::path p = fs::path(out) / (std::string(harness::column_name(m)) + ".svg");
        if (fs::exists(p) && testing::read_file(p.string()).find("</svg>") != std::string::npos) ++svgs;
    }

    testing::TempDir copy("contract");
    for (const auto& e : fs::directory_iterator(out)) {
        if (harness::algorithm_of(e.path().string())) fs::copy_file(e.path(), copy.path() / e.path().filename());
    }
    harness::run_report(copy.path().string(), copy.path().string());
    std::string differing;
    for (const char* f : {"summary.json", "report.txt", "mean_q.svg", "total_reward.svg", "mae.svg",
                          "adaptation_time_s.svg", "loss.svg"}) {
        if (testing::read_file((fs::path(out) / f).string()) != testing::read_file(copy / f)) differing += std::string(" ") + f;
    }
    if (!differing.empty()) problems += " report rerun differs:" + differing;
    return {problems.empty() && svgs == 5 && csvs > 0,
            std::to_string(csvs) + " CSVs with the exact header, " + std::to_string(svgs) +
                "/5 chart files, report rerun on copied CSVs " + (differing.empty() ? "identical" : "DIFFERENT") +
                (problems.empty() ? "" : ";" + problems)};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance suite"};
    std::string only;
    std::string out = (fs::temp_directory_path() / "adaptswarm-acceptance").string();
    app.add_option("--only", only, "Comma-separated criterion numbers to run (default: all)");
    app.add_option("--out", out, "Directory for the run artifacts of criteria 7-9");
    CLI11_PARSE(app, argc, argv);

    std::set<int> selected;
    for (std::size_t pos = 0; pos < only.size();) {
        const std::size_t comma = std::min(only.find(',', pos), only.size());
        selected.insert(std::stoi(only.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    auto wanted = [&](int n) { return selected.empty() || selected.contains(n); };

    const std::string smoke_dir = (fs::path(out) / "smoke").string();
    const std::string compare_dir = (fs::path(out) / "compare").string();
    if (wanted(7)) fs::remove_all(smoke_dir);
    if (wanted(8) || wanted(9)) fs::remove_all(compare_dir);

    int failed = 0;
    std::string report_text;
    auto run = [&](int n, const char* name, const std::function<Outcome()>& f) {
        if (!wanted(n)) return;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = f();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << "criterion " << n << " [" << (o.pass ? "PASS" : "FAIL") << "] " << name << ": " << o.detail
                  << " (" << fmt(seconds_since(t0), "%.1f") << " s)" << std::endl;
    };

    run(1, "gradient suite", gradient_suite);
    run(2, "tabular chain oracle", chain_oracle);
    run(3, "raft safety fuzz", raft_fuzz);
    run(4, "determinism", determinism);
    run(5, "PGNN bandit", bandit);
    run(6, "OU statistics", ou_statistics);
    run(7, "learning smoke test", [&] { return learning_smoke(smoke_dir); });
    run(8, "comparative report", [&] { return comparative_report(compare_dir, report_text); });
    run(9, "CSV/plot contract", [&] {
        if (!fs::exists(fs::path(compare_dir) / "summary.json")) {
            for (auto algo : agents::kAlgorithms) harness::run_experiment(experiment(algo, 20, {1, 2}, compare_dir));
            harness::run_report(compare_dir, compare_dir);
        }
        return csv_plot_contract(compare_dir);
    });

    if (!report_text.empty()) std::cout << "\n" << report_text;
    std::cout << "\n" << (failed == 0 ? "all selected criteria passed" : std::to_string(failed) + " criterion(s) failed")
              << std::endl;
    return failed == 0 ? 0 : 1;
}
