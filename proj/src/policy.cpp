#include "chartfix/policy.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "chartfix/error.hpp"
#include "chartfix/layout.hpp"

namespace chartfix {

Row action_probs(const Policy& policy, std::size_t state) {
    const Row& row = policy.theta.at(state);
    const double top = *std::max_element(row.begin(), row.end());
    Row p{};
    double sum = 0.0;
    for (std::size_t a = 0; a < kActionCount; ++a) sum += p[a] = std::exp(row[a] - top);
    for (double& v : p) v /= sum;
    return p;
}

double log_prob(const Policy& policy, std::size_t state, std::size_t action) {
    const Row& row = policy.theta.at(state);
    const double top = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    for (double v : row) sum += std::exp(v - top);
    return row.at(action) - top - std::log(sum);
}

void apply_log_gradient(Policy& policy, std::size_t state, std::size_t action, double coefficient) {
    if (coefficient == 0.0) return;
    const Row p = action_probs(policy, state);
    Row& row = policy.theta.at(state);
    for (std::size_t a = 0; a < kActionCount; ++a) row[a] += coefficient * ((a == action ? 1.0 : 0.0) - p[a]);
}

void reinforce_update(Policy& policy, std::size_t state, std::size_t action, double R) {
    apply_log_gradient(policy, state, action, policy.alpha * R);
}

void penalize_deadlock(Policy& policy, const std::vector<std::pair<std::size_t, std::size_t>>& path) {
    for (const auto& [s, a] : path) apply_log_gradient(policy, s, a, -policy.beta);
}

double compute_reward(double cost_now, double cost_prev, double entry_cost) {
    if (!(entry_cost > 0.0)) throw Error(ErrorCode::InvalidArgument, "entry cost must be positive");
    return (cost_prev - cost_now) / entry_cost;
}

std::size_t sample_action(const Row& probs, Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t a = 0; a < kActionCount; ++a) {
        acc += probs[a];
        if (u < acc) return a;
    }
    return kActionCount - 1;
}

std::string_view to_string(Termination t) { return t == Termination::Solved ? "Solved" : "StepBudgetExhausted"; }

EpisodeResult run_episode(Policy& policy, const DeclarativeSpec& input, const EpisodeConfig& config) {
    EpisodeResult out{input, {}};
    EpisodeTrace& trace = out.trace;
    trace.seed = config.seed;
    trace.delta = config.steps.delta;
    Rng rng(config.seed);

    CostReport report = detect_state(out.spec, config.thresholds);
    trace.initial_total = trace.final_total = report.total;
    if (report.solved()) return out;

    std::size_t state = *report.active_state;
    double entry = report.cost[state];
    double prev = entry;
    std::set<std::size_t> visited{state};
    std::vector<std::pair<std::size_t, std::size_t>> path;
    trace.entries.push_back({0, state, entry});
    trace.status = Termination::StepBudgetExhausted;

    for (std::size_t step = 1; step <= config.max_steps; ++step) {
        const std::size_t action = sample_action(action_probs(policy, state), rng);
        DeclarativeSpec next = apply_action(out.spec, action, state, config.steps);
        const CostReport after = detect_state(next, config.thresholds);
        const double now = after.cost[state];
        const double reward = compute_reward(now, prev, entry);
        if (config.learn) reinforce_update(policy, state, action, reward);
        path.emplace_back(state, action);

        StepRecord rec{step, state, action, prev, now, reward, false, after.active_state, after.total};
        out.spec = std::move(next);
        trace.final_total = after.total;

        if (after.solved()) {
            trace.steps.push_back(rec);
            trace.status = Termination::Solved;
            break;
        }
        const std::size_t entered = *after.active_state;
        if (entered != state) {
            if (visited.count(entered)) {
                rec.penalty = true;
                if (config.learn) penalize_deadlock(policy, path);
            }
            path.clear();
            state = entered;
            entry = prev = after.cost[state];
            visited.insert(state);
            trace.entries.push_back({step, state, entry});
        } else {
            prev = now;
        }
        trace.steps.push_back(rec);
    }
    return out;
}

nlohmann::json to_json(const Policy& policy) {
    nlohmann::json states = nlohmann::json::array(), actions = nlohmann::json::array(), theta = nlohmann::json::array();
    for (std::size_t s = 0; s < kStateCount; ++s) states.push_back(state_name(s));
    for (std::size_t a = 0; a < kActionCount; ++a) actions.push_back(action_label(a, {policy.delta, 1.0, 1}));
    for (const auto& row : policy.theta) theta.push_back(row);
    return {{"format_version", Policy::kFormatVersion},
            {"state_names", states},
            {"action_names", actions},
            {"theta", theta},
            {"alpha", policy.alpha},
            {"beta", policy.beta},
            {"delta", policy.delta},
            {"tau", policy.tau},
            {"rng_note", "mt19937_64 seeded per episode; actions drawn by inverse CDF on 53-bit uniforms"}};
}

Policy policy_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format_version").get<int>() != Policy::kFormatVersion)
            throw Error(ErrorCode::InvalidArgument, "unsupported policy format_version");
        Policy p;
        const auto& theta = j.at("theta");
        if (theta.size() != kStateCount) throw Error(ErrorCode::InvalidArgument, "policy theta must have 28 rows");
        for (std::size_t s = 0; s < kStateCount; ++s) {
            if (theta[s].size() != kActionCount) throw Error(ErrorCode::InvalidArgument, "policy rows must have 23 entries");
            for (std::size_t a = 0; a < kActionCount; ++a) p.theta[s][a] = theta[s][a].get<double>();
        }
        p.alpha = j.value("alpha", p.alpha);
        p.beta = j.value("beta", p.beta);
        p.delta = j.value("delta", p.delta);
        p.tau = j.value("tau", p.tau);
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("malformed policy: ") + e.what());
    }
}

nlohmann::json to_json(const EpisodeTrace& trace) {
    nlohmann::json steps = nlohmann::json::array(), entries = nlohmann::json::array();
    for (const auto& s : trace.steps)
        steps.push_back({{"step", s.step},
                         {"state", state_name(s.state)},
                         {"action", s.action},
                         {"cost_before", s.cost_before},
                         {"cost_after", s.cost_after},
                         {"reward", s.reward},
                         {"penalty", s.penalty},
                         {"next_state", s.next_state ? nlohmann::json(state_name(*s.next_state)) : nlohmann::json(nullptr)},
                         {"total_after", s.total_after}});
    for (const auto& e : trace.entries)
        entries.push_back({{"step", e.step}, {"state", state_name(e.state)}, {"entry_cost", e.entry_cost}});
    return {{"format_version", EpisodeTrace::kFormatVersion},
            {"status", to_string(trace.status)},
            {"seed", trace.seed},
            {"delta", trace.delta},
            {"initial_total", trace.initial_total},
            {"final_total", trace.final_total},
            {"entries", entries},
            {"steps", steps}};
}

EpisodeTrace trace_from_json(const nlohmann::json& j) {
    auto state_of = [](const nlohmann::json& v) {
        const auto s = state_from_name(v.get<std::string>());
        if (!s) throw Error(ErrorCode::InvalidArgument, "unknown state " + v.get<std::string>());
        return *s;
    };
    try {
        if (j.at("format_version").get<int>() != EpisodeTrace::kFormatVersion)
            throw Error(ErrorCode::InvalidArgument, "unsupported trace format_version");
        EpisodeTrace t;
        t.status = j.at("status").get<std::string>() == "Solved" ? Termination::Solved : Termination::StepBudgetExhausted;
        t.seed = j.value("seed", std::uint64_t{0});
        t.delta = j.value("delta", 5.0);
        t.initial_total = j.value("initial_total", 0.0);
        t.final_total = j.value("final_total", 0.0);
        for (const auto& e : j.at("entries")) t.entries.push_back({e.at("step"), state_of(e.at("state")), e.at("entry_cost")});
        for (const auto& s : j.at("steps")) {
            StepRecord r;
            r.step = s.at("step");
            r.state = state_of(s.at("state"));
            r.action = s.at("action");
            if (r.action >= kActionCount) throw Error(ErrorCode::InvalidActionId, "trace names action " + std::to_string(r.action));
            r.cost_before = s.at("cost_before");
            r.cost_after = s.at("cost_after");
            r.reward = s.at("reward");
            r.penalty = s.value("penalty", false);
            if (!s.at("next_state").is_null()) r.next_state = state_of(s.at("next_state"));
            r.total_after = s.value("total_after", 0.0);
            t.steps.push_back(r);
        }
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("malformed trace: ") + e.what());
    }
}

std::string explain_step(const StepRecord& step, const StepSize& steps) {
    std::ostringstream reward;
    reward.setf(std::ios::showpos);
    reward << step.reward;
    std::string line = "step " + std::to_string(step.step) + ": state=" + state_name(step.state) +
                       " action=" + action_label(step.action, steps) + " reward=" + reward.str();
    if (step.penalty) line += " (revisit penalty)";
    return line;
}

}  // namespace chartfix
