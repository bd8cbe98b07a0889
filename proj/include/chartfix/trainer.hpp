#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chartfix/policy.hpp"

namespace chartfix {

/// A deconstructed corpus chart.
struct TrainingChart {
    std::string name;
    DeclarativeSpec spec;
};

struct LoadReport {
    std::vector<TrainingChart> charts;
    std::vector<std::pair<std::string, std::string>> skipped;  // name, reason
};

/// Deconstruct every SVG of a corpus directory; failures are reported, not fatal.
LoadReport load_training_charts(const std::filesystem::path& dir);

/// Step counts at which metrics are reported.
std::vector<std::size_t> default_checkpoints(std::size_t max_steps = 1000);

struct TrainConfig {
    std::size_t budget = 1000;  // environment steps per run
    std::size_t runs = 5;
    double alpha = 5.0;
    double beta = 0.005;
    StepSize steps;
    Thresholds thresholds;
    std::uint64_t seed = 0;
    std::size_t episode_max_steps = 20;  // cap per training episode
    std::size_t eval_max_steps = 1000;
    std::uint64_t eval_seed = 1;
    std::size_t threads = 0;  // 0 picks hardware concurrency
};

struct ChartOutcome {
    std::string name;
    bool solved = false;
    std::size_t steps = 0;  // steps taken (to solve, or budget)
    double initial_total = 0.0;
    double final_total = 0.0;
    std::vector<double> cumulative_return;  // after each step
};

struct EvalReport {
    static constexpr int kFormatVersion = 1;

    std::vector<ChartOutcome> charts;
    std::size_t max_steps = 0;

    /// Fraction (0..1) of charts solved within k steps.
    double solve_rate(std::size_t k) const;
    double solve_rate() const { return solve_rate(max_steps); }
    /// Median steps among solved charts; nullopt when none solved.
    std::optional<double> median_steps_to_solve() const;
    /// Summed return after k steps over the summed final return, capped at 1.
    double normalized_return(std::size_t k) const;
};

/// Frozen-policy episodes, one per chart, each seeded from (seed, chart index).
EvalReport evaluate(const std::vector<TrainingChart>& charts, const Policy& policy, std::size_t max_steps,
                    std::uint64_t seed, const StepSize& steps = {}, const Thresholds& thresholds = {},
                    std::size_t threads = 0);

struct MetricPoint {
    std::size_t run = 0;
    std::size_t step = 0;
    double normalized_return_pct = 0.0;
    double solve_rate_pct = 0.0;
};

struct RunResult {
    Policy policy;
    std::size_t steps_used = 0;
    std::size_t episodes = 0;
    EvalReport eval;
    std::vector<MetricPoint> metrics;
};

struct TrainResult {
    std::vector<RunResult> runs;
    std::vector<MetricPoint> metrics() const;
    /// Mean and standard deviation across runs per checkpoint.
    struct Aggregate {
        std::size_t step = 0;
        double return_mean = 0, return_sd = 0, solve_mean = 0, solve_sd = 0;
    };
    std::vector<Aggregate> aggregate() const;
};

/// One learning run: θ = 0, then learning episodes on uniformly sampled
/// unsolved charts until the step budget is spent.
Policy train_policy(const std::vector<TrainingChart>& charts, const TrainConfig& config, std::size_t run,
                    std::size_t* steps_used = nullptr, std::size_t* episodes = nullptr);

/// Seed of the frozen evaluation that follows a run.
std::uint64_t evaluation_seed(const TrainConfig& config, std::size_t run);

/// All runs, each followed by a frozen-policy evaluation on the same charts.
/// Throws Error{EmptyCorpus}.
TrainResult train(const std::vector<TrainingChart>& charts, const TrainConfig& config);

std::vector<MetricPoint> metric_series(const EvalReport& report, std::size_t run,
                                       const std::vector<std::size_t>& checkpoints);

struct HeatmapCell {
    std::string state;
    std::string action;
    double probability = 0.0;
};
/// 28 × 23 probabilities in row-major order.
std::vector<HeatmapCell> export_policy_heatmap(const Policy& policy, const StepSize& steps = {});

std::string metrics_csv(const std::vector<MetricPoint>& metrics);
std::string heatmap_csv(const std::vector<HeatmapCell>& cells);
nlohmann::json to_json(const EvalReport& report);

}  // namespace chartfix
