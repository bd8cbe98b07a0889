// chartfix command-line front end.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "chartfix/corpus_gen.hpp"
#include "chartfix/deconstructor.hpp"
#include "chartfix/error.hpp"
#include "chartfix/layout.hpp"
#include "chartfix/trainer.hpp"

namespace fs = std::filesystem;
using namespace chartfix;

namespace {

struct Common {
    std::string viewport = "375x812";
    double delta = 5.0;
    double tau = 12.0;
    double alpha = 5.0;
    double beta = 0.005;
    std::size_t max_steps = 1000;
    std::uint64_t seed = 0;
    int verbosity = 0;

    svg::Viewport vp() const {
        const auto x = viewport.find('x');
        if (x == std::string::npos) throw Error(ErrorCode::InvalidArgument, "viewport must be WIDTHxHEIGHT");
        const auto w = svg::parse_number(viewport.substr(0, x));
        const auto h = svg::parse_number(viewport.substr(x + 1));
        if (!w || !h || *w <= 0 || *h <= 0) throw Error(ErrorCode::InvalidArgument, "bad viewport " + viewport);
        return {*w, *h};
    }
    StepSize steps() const { return {delta, 1.0, 1}; }
    Thresholds thresholds() const {
        Thresholds t;
        t.min_font_size = tau;
        return t;
    }
    void check() const {
        vp();
        if (!(delta > 0)) throw Error(ErrorCode::InvalidArgument, "--delta must be positive");
        if (!(tau > 0)) throw Error(ErrorCode::InvalidArgument, "--tau must be positive");
        if (!(alpha >= 0) || !(beta >= 0)) throw Error(ErrorCode::InvalidArgument, "--alpha and --beta must be non-negative");
        if (max_steps < 1) throw Error(ErrorCode::InvalidArgument, "--max-steps must be at least 1");
    }
};

void add_common(CLI::App* cmd, Common& c, bool learning = false) {
    cmd->add_option("--viewport", c.viewport, "Target viewport WIDTHxHEIGHT in px")->capture_default_str();
    cmd->add_option("--delta", c.delta, "Step size of range and offset actions, px")->capture_default_str();
    cmd->add_option("--tau", c.tau, "Minimum readable font size, px")->capture_default_str();
    if (learning) {
        cmd->add_option("--alpha", c.alpha, "Learning rate")->capture_default_str();
        cmd->add_option("--beta", c.beta, "Revisit penalty rate")->capture_default_str();
    }
    cmd->add_option("--seed", c.seed, "Random seed")->capture_default_str();
    cmd->add_flag("-v,--verbose", "More output on stderr");
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_atomic(const fs::path& p, const std::string& bytes) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    const fs::path tmp = p.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::Io, "cannot write " + p.string());
        out << bytes;
        if (!out) throw Error(ErrorCode::Io, "write failed for " + p.string());
    }
    fs::rename(tmp, p);
}

Policy load_policy(const std::string& path) {
    try {
        return policy_from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, "policy " + path + " is not JSON: " + e.what());
    }
}

std::vector<TrainingChart> load_charts(const std::string& dir, const Common& c) {
    std::vector<TrainingChart> out;
    for (auto& entry : corpus::load_corpus(dir)) {
        try {
            out.push_back({entry.name, build_spec_from_svg(entry.svg, {c.vp(), {}})});
        } catch (const Error& e) {
            std::cerr << "skipping " << entry.name << ": " << e.what() << "\n";
        }
    }
    if (out.empty()) throw Error(ErrorCode::EmptyCorpus, "no usable charts in " + dir);
    return out;
}

std::string fixed(double v, int digits = 1) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(digits);
    s << v;
    return s.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Repair mobile-friendliness issues in SVG charts"};
    app.require_subcommand(1);
    Common common;

    // fix
    std::string in_svg, out_svg, trace_path, policy_path, save_policy;
    bool no_learn = false;
    auto* fix = app.add_subcommand("fix", "Repair one chart");
    fix->add_option("-i,--input", in_svg, "Input SVG")->required();
    fix->add_option("-o,--output", out_svg, "Output SVG")->required();
    fix->add_option("--trace", trace_path, "Write the episode trace JSON here");
    fix->add_option("--policy", policy_path, "Policy JSON (default: zero policy)");
    fix->add_option("--save-policy", save_policy, "Write the policy after the episode");
    fix->add_flag("--no-learn", no_learn, "Keep the policy frozen during the episode");
    fix->add_option("--max-steps", common.max_steps, "Episode step budget")->capture_default_str();
    add_common(fix, common, true);

    // train
    std::string corpus_dir, out_dir = "train_out";
    std::size_t runs = 5, budget = 1000, episode_cap = 20;
    auto* train_cmd = app.add_subcommand("train", "Train policies on a corpus");
    train_cmd->add_option("--corpus", corpus_dir, "Corpus directory")->required();
    train_cmd->add_option("--runs", runs, "Independent runs")->capture_default_str();
    train_cmd->add_option("--steps", budget, "Environment steps per run")->capture_default_str();
    train_cmd->add_option("--episode-steps", episode_cap, "Step cap per training episode")->capture_default_str();
    train_cmd->add_option("--max-steps", common.max_steps, "Evaluation episode budget")->capture_default_str();
    train_cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();
    add_common(train_cmd, common, true);

    // eval
    std::string report_path;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a frozen policy on a corpus");
    eval_cmd->add_option("--corpus", corpus_dir, "Corpus directory")->required();
    eval_cmd->add_option("--policy", policy_path, "Policy JSON (default: zero policy)");
    eval_cmd->add_option("--max-steps", common.max_steps, "Episode step budget")->capture_default_str();
    eval_cmd->add_option("--report", report_path, "Write the report JSON here");
    add_common(eval_cmd, common);

    // gen
    std::string gen_out, mix_name = "default";
    std::size_t count = 81;
    auto* gen = app.add_subcommand("gen", "Generate a synthetic corpus");
    gen->alias("gen-corpus");
    gen->add_option("--out", gen_out, "Output directory")->required();
    gen->add_option("--count", count, "Number of charts")->capture_default_str();
    gen->add_option("--mix", mix_name, "Defect mix")->check(CLI::IsMember({"default", "holdout"}))->capture_default_str();
    gen->add_option("--seed", common.seed, "Random seed")->capture_default_str();

    // inspect
    bool with_costs = false;
    auto* inspect = app.add_subcommand("inspect", "Print the declarative spec of a chart");
    inspect->add_option("-i,--input", in_svg, "Input SVG")->required();
    inspect->add_flag("--costs", with_costs, "Print the issue costs instead");
    add_common(inspect, common);

    // explain
    auto* explain = app.add_subcommand("explain", "Print an episode trace step by step");
    explain->add_option("--trace", trace_path, "Trace JSON")->required();

    // heatmap
    std::string heat_out;
    auto* heat = app.add_subcommand("heatmap", "Export policy probabilities as CSV");
    heat->add_option("--policy", policy_path, "Policy JSON")->required();
    heat->add_option("-o,--output", heat_out, "CSV path (default: stdout)");

    // actions
    auto* actions = app.add_subcommand("actions", "List the action catalogue");

    CLI11_PARSE(app, argc, argv);
    if (auto* v = app.get_subcommands().front()->get_option_no_throw("--verbose")) common.verbosity = int(v->count());

    try {
        if (*fix) {
            common.check();
            const auto spec = build_spec_from_svg(read_file(in_svg), {common.vp(), {}});
            Policy policy = policy_path.empty() ? Policy{} : load_policy(policy_path);
            if (policy_path.empty()) {
                policy.alpha = common.alpha;
                policy.beta = common.beta;
            }
            EpisodeConfig cfg{common.thresholds(), common.steps(), common.max_steps, common.seed, !no_learn};
            const auto t0 = std::chrono::steady_clock::now();
            const auto result = run_episode(policy, spec, cfg);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            write_atomic(out_svg, svg::serialize(render_spec(result.spec)));
            if (!trace_path.empty()) write_atomic(trace_path, to_json(result.trace).dump(2) + "\n");
            if (!save_policy.empty()) write_atomic(save_policy, to_json(policy).dump(2) + "\n");
            const auto& t = result.trace;
            std::cerr << to_string(t.status) << " after " << t.steps.size() << " steps; cost " << t.initial_total << " -> "
                      << t.final_total;
            if (common.verbosity) std::cerr << " (" << fixed(secs * 1000, 1) << " ms)";
            std::cerr << "\n";
            return t.status == Termination::Solved ? 0 : 2;
        }
        if (*train_cmd) {
            common.check();
            const auto charts = load_charts(corpus_dir, common);
            TrainConfig cfg;
            cfg.runs = runs;
            cfg.budget = budget;
            cfg.alpha = common.alpha;
            cfg.beta = common.beta;
            cfg.steps = common.steps();
            cfg.thresholds = common.thresholds();
            cfg.seed = common.seed;
            cfg.episode_max_steps = episode_cap;
            cfg.eval_max_steps = common.max_steps;
            cfg.eval_seed = common.seed + 1;
            const auto res = train(charts, cfg);
            for (std::size_t r = 0; r < res.runs.size(); ++r) {
                write_atomic(fs::path(out_dir) / ("policy_run" + std::to_string(r) + ".json"),
                             to_json(res.runs[r].policy).dump(2) + "\n");
                write_atomic(fs::path(out_dir) / ("heatmap_run" + std::to_string(r) + ".csv"),
                             heatmap_csv(export_policy_heatmap(res.runs[r].policy, common.steps())));
                if (common.verbosity)
                    std::cerr << "run " << r << ": " << res.runs[r].episodes << " episodes, solved "
                              << fixed(100 * res.runs[r].eval.solve_rate(), 1) << "%\n";
            }
            write_atomic(fs::path(out_dir) / "metrics.csv", metrics_csv(res.metrics()));
            std::cout << "step,return_mean,return_sd,solve_mean,solve_sd\n";
            for (const auto& a : res.aggregate())
                std::cout << a.step << ',' << fixed(a.return_mean, 2) << ',' << fixed(a.return_sd, 2) << ','
                          << fixed(a.solve_mean, 2) << ',' << fixed(a.solve_sd, 2) << '\n';
            return 0;
        }
        if (*eval_cmd) {
            common.check();
            const auto charts = load_charts(corpus_dir, common);
            const Policy policy = policy_path.empty() ? Policy{} : load_policy(policy_path);
            const auto report = evaluate(charts, policy, common.max_steps, common.seed, common.steps(), common.thresholds());
            if (!report_path.empty()) write_atomic(report_path, to_json(report).dump(2) + "\n");
            const auto median = report.median_steps_to_solve();
            std::cout << "charts " << charts.size() << "\nsolve_rate " << fixed(100 * report.solve_rate(), 1) << "%\n";
            for (std::size_t k : default_checkpoints(common.max_steps))
                std::cout << "solved_within_" << k << ' ' << fixed(100 * report.solve_rate(k), 1) << "%\n";
            std::cout << "median_steps_to_solve " << (median ? fixed(*median, 1) : std::string("n/a")) << "\n";
            return 0;
        }
        if (*gen) {
            corpus::write_corpus(gen_out, count, common.seed,
                                 mix_name == "holdout" ? corpus::holdout_mix() : corpus::default_mix());
            std::cout << "wrote " << count << " charts to " << gen_out << "\n";
            return 0;
        }
        if (*inspect) {
            common.check();
            const auto spec = build_spec_from_svg(read_file(in_svg), {common.vp(), {}});
            std::cout << (with_costs ? to_json(detect_state(spec, common.thresholds())) : spec_to_json(spec)).dump(2) << "\n";
            return 0;
        }
        if (*explain) {
            const auto trace = trace_from_json(nlohmann::json::parse(read_file(trace_path)));
            const StepSize steps{trace.delta, 1.0, 1};
            for (const auto& s : trace.steps) std::cout << explain_step(s, steps) << "\n";
            std::cout << to_string(trace.status) << ": total cost " << trace.initial_total << " -> " << trace.final_total
                      << " in " << trace.steps.size() << " steps\n";
            return 0;
        }
        if (*heat) {
            const auto csv = heatmap_csv(export_policy_heatmap(load_policy(policy_path)));
            if (heat_out.empty()) std::cout << csv;
            else write_atomic(heat_out, csv);
            return 0;
        }
        if (*actions) {
            for (std::size_t a = 0; a < kActionCount; ++a)
                std::cout << action_label(a) << '\t' << to_string(action_catalog()[a].category) << '\n';
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (e.code() == ErrorCode::UnsupportedChart)
            std::cerr << "only single-view charts (one x/y coordinate system) can be repaired\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
