#include "chartfix/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <thread>

#include "chartfix/corpus_gen.hpp"
#include "chartfix/deconstructor.hpp"
#include "chartfix/error.hpp"

namespace chartfix {

namespace {

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a * 0x9E3779B97F4A7C15ULL + b + 0x632BE59BD9B4E019ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

template <class F>
void parallel_for(std::size_t n, std::size_t threads, F&& body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    for (std::size_t t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < n;) {
                try {
                    body(i);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

LoadReport load_training_charts(const std::filesystem::path& dir) {
    LoadReport out;
    for (auto& entry : corpus::load_corpus(dir)) {
        try {
            out.charts.push_back({entry.name, build_spec_from_svg(entry.svg)});
        } catch (const Error& e) {
            out.skipped.emplace_back(entry.name, e.what());
        }
    }
    return out;
}

std::vector<std::size_t> default_checkpoints(std::size_t max_steps) {
    std::vector<std::size_t> out;
    for (std::size_t decade = 1; decade <= max_steps; decade *= 10)
        for (std::size_t m : {1, 2, 5})
            if (decade * m <= max_steps) out.push_back(decade * m);
    if (out.empty() || out.back() != max_steps) out.push_back(max_steps);
    return out;
}

double EvalReport::solve_rate(std::size_t k) const {
    if (charts.empty()) return 0.0;
    std::size_t n = 0;
    for (const auto& c : charts) n += c.solved && c.steps <= k;
    return static_cast<double>(n) / static_cast<double>(charts.size());
}

std::optional<double> EvalReport::median_steps_to_solve() const {
    std::vector<double> v;
    for (const auto& c : charts)
        if (c.solved) v.push_back(static_cast<double>(c.steps));
    if (v.empty()) return std::nullopt;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double EvalReport::normalized_return(std::size_t k) const {
    double at_k = 0.0, final_sum = 0.0;
    for (const auto& c : charts) {
        if (c.cumulative_return.empty()) continue;
        final_sum += c.cumulative_return.back();
        at_k += k == 0 ? 0.0 : c.cumulative_return[std::min(k, c.cumulative_return.size()) - 1];
    }
    if (!(final_sum > 0.0)) return 1.0;
    return std::clamp(at_k / final_sum, 0.0, 1.0);
}

EvalReport evaluate(const std::vector<TrainingChart>& charts, const Policy& policy, std::size_t max_steps,
                    std::uint64_t seed, const StepSize& steps, const Thresholds& thresholds, std::size_t threads) {
    EvalReport report;
    report.max_steps = max_steps;
    report.charts.resize(charts.size());
    parallel_for(charts.size(), threads, [&](std::size_t i) {
        Policy frozen = policy;
        EpisodeConfig cfg{thresholds, steps, max_steps, mix(seed, i), false};
        const auto res = run_episode(frozen, charts[i].spec, cfg);
        ChartOutcome& o = report.charts[i];
        o.name = charts[i].name;
        o.solved = res.trace.status == Termination::Solved;
        o.steps = res.trace.steps.size();
        o.initial_total = res.trace.initial_total;
        o.final_total = res.trace.final_total;
        double acc = 0.0;
        for (const auto& s : res.trace.steps) o.cumulative_return.push_back(acc += s.reward);
    });
    return report;
}

Policy train_policy(const std::vector<TrainingChart>& charts, const TrainConfig& config, std::size_t run,
                    std::size_t* steps_used, std::size_t* episodes) {
    Policy policy;
    policy.alpha = config.alpha;
    policy.beta = config.beta;
    policy.delta = config.steps.delta;
    policy.tau = config.thresholds.min_font_size;

    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < charts.size(); ++i)
        if (!detect_state(charts[i].spec, config.thresholds).solved()) active.push_back(i);

    Rng rng(mix(config.seed, run));
    std::size_t used = 0, count = 0;
    while (used < config.budget && !active.empty()) {
        const std::size_t pick = active[static_cast<std::size_t>(rng.uniform_int(0, std::int64_t(active.size()) - 1))];
        EpisodeConfig cfg{config.thresholds, config.steps,
                          std::min(config.episode_max_steps, config.budget - used), rng.next(), true};
        const auto res = run_episode(policy, charts[pick].spec, cfg);
        used += res.trace.steps.size();
        ++count;
    }
    if (steps_used) *steps_used = used;
    if (episodes) *episodes = count;
    return policy;
}

std::vector<MetricPoint> metric_series(const EvalReport& report, std::size_t run,
                                       const std::vector<std::size_t>& checkpoints) {
    std::vector<MetricPoint> out;
    for (std::size_t k : checkpoints)
        out.push_back({run, k, 100.0 * report.normalized_return(k), 100.0 * report.solve_rate(k)});
    return out;
}

std::uint64_t evaluation_seed(const TrainConfig& config, std::size_t run) { return mix(config.eval_seed, run); }

TrainResult train(const std::vector<TrainingChart>& charts, const TrainConfig& config) {
    if (charts.empty()) throw Error(ErrorCode::EmptyCorpus, "no usable charts to train on");
    if (config.runs == 0) throw Error(ErrorCode::InvalidArgument, "runs must be at least 1");
    TrainResult result;
    result.runs.resize(config.runs);
    const auto checkpoints = config.budget == 0 ? std::vector<std::size_t>{0} : default_checkpoints(config.eval_max_steps);
    for (std::size_t r = 0; r < config.runs; ++r) {
        RunResult& rr = result.runs[r];
        rr.policy = train_policy(charts, config, r, &rr.steps_used, &rr.episodes);
        rr.eval = evaluate(charts, rr.policy, config.eval_max_steps, evaluation_seed(config, r), config.steps,
                           config.thresholds, config.threads);
        rr.metrics = metric_series(rr.eval, r, checkpoints);
    }
    return result;
}

std::vector<MetricPoint> TrainResult::metrics() const {
    std::vector<MetricPoint> out;
    for (const auto& r : runs) out.insert(out.end(), r.metrics.begin(), r.metrics.end());
    return out;
}

std::vector<TrainResult::Aggregate> TrainResult::aggregate() const {
    std::vector<Aggregate> out;
    if (runs.empty()) return out;
    const double n = static_cast<double>(runs.size());
    for (std::size_t i = 0; i < runs.front().metrics.size(); ++i) {
        Aggregate a;
        a.step = runs.front().metrics[i].step;
        for (const auto& r : runs) {
            a.return_mean += r.metrics[i].normalized_return_pct / n;
            a.solve_mean += r.metrics[i].solve_rate_pct / n;
        }
        for (const auto& r : runs) {
            a.return_sd += std::pow(r.metrics[i].normalized_return_pct - a.return_mean, 2) / n;
            a.solve_sd += std::pow(r.metrics[i].solve_rate_pct - a.solve_mean, 2) / n;
        }
        a.return_sd = std::sqrt(a.return_sd);
        a.solve_sd = std::sqrt(a.solve_sd);
        out.push_back(a);
    }
    return out;
}

std::vector<HeatmapCell> export_policy_heatmap(const Policy& policy, const StepSize& steps) {
    std::vector<HeatmapCell> out;
    for (std::size_t s = 0; s < kStateCount; ++s) {
        const Row p = action_probs(policy, s);
        for (std::size_t a = 0; a < kActionCount; ++a) out.push_back({state_name(s), action_label(a, steps), p[a]});
    }
    return out;
}

std::string metrics_csv(const std::vector<MetricPoint>& metrics) {
    std::ostringstream out;
    out << "run,step,normalized_return_pct,solve_rate_pct\n" << std::setprecision(10);
    for (const auto& m : metrics)
        out << m.run << ',' << m.step << ',' << m.normalized_return_pct << ',' << m.solve_rate_pct << '\n';
    return out.str();
}

std::string heatmap_csv(const std::vector<HeatmapCell>& cells) {
    std::ostringstream out;
    out << "state,action,probability\n" << std::setprecision(17);
    for (const auto& c : cells) out << c.state << ",\"" << c.action << "\"," << c.probability << '\n';
    return out.str();
}

nlohmann::json to_json(const EvalReport& report) {
    nlohmann::json charts = nlohmann::json::array();
    for (const auto& c : report.charts)
        charts.push_back({{"name", c.name},
                          {"status", c.solved ? "Solved" : "StepBudgetExhausted"},
                          {"steps", c.steps},
                          {"initial_total", c.initial_total},
                          {"final_total", c.final_total}});
    const auto median = report.median_steps_to_solve();
    return {{"format_version", EvalReport::kFormatVersion},
            {"max_steps", report.max_steps},
            {"solve_rate", report.solve_rate()},
            {"median_steps_to_solve", median ? nlohmann::json(*median) : nlohmann::json(nullptr)},
            {"charts", charts}};
}

}  // namespace chartfix
