#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "chartfix/actions.hpp"
#include "chartfix/interpreter.hpp"
#include "chartfix/rng.hpp"
#include "chartfix/spec.hpp"

namespace chartfix {

using Row = std::array<double, kActionCount>;

/// Tabular softmax policy, one row of preferences per state.
struct Policy {
    static constexpr int kFormatVersion = 1;

    std::array<Row, kStateCount> theta{};
    double alpha = 5.0;   // learning rate
    double beta = 0.005;  // deadlock penalty rate
    double delta = 5.0;   // Δ the policy was trained with
    double tau = 12.0;    // τ the policy was trained with
};

Row action_probs(const Policy& policy, std::size_t state);
double log_prob(const Policy& policy, std::size_t state, std::size_t action);

/// θ[s] += coefficient · ∇ log π(a|s).
void apply_log_gradient(Policy& policy, std::size_t state, std::size_t action, double coefficient);
/// REINFORCE step with return R: coefficient αR.
void reinforce_update(Policy& policy, std::size_t state, std::size_t action, double R);
/// Lower the probability of every recorded (state, action): coefficient −β each.
void penalize_deadlock(Policy& policy, const std::vector<std::pair<std::size_t, std::size_t>>& path);

/// Cost reduction normalised by the cost on entering the state.
double compute_reward(double cost_now, double cost_prev, double entry_cost);

std::size_t sample_action(const Row& probs, Rng& rng);

struct StepRecord {
    std::size_t step = 0;  // 1-based
    std::size_t state = 0;
    std::size_t action = 0;
    double cost_before = 0.0;
    double cost_after = 0.0;
    double reward = 0.0;
    bool penalty = false;  // this step re-entered a visited state
    std::optional<std::size_t> next_state;
    double total_after = 0.0;
};

struct StateEntry {
    std::size_t step = 0;  // steps taken before entering
    std::size_t state = 0;
    double entry_cost = 0.0;
};

enum class Termination { Solved, StepBudgetExhausted };
std::string_view to_string(Termination t);

struct EpisodeTrace {
    static constexpr int kFormatVersion = 1;

    std::vector<StepRecord> steps;
    std::vector<StateEntry> entries;
    Termination status = Termination::Solved;
    double initial_total = 0.0;
    double final_total = 0.0;
    std::uint64_t seed = 0;
    double delta = 5.0;
};

struct EpisodeConfig {
    Thresholds thresholds;
    StepSize steps;
    std::size_t max_steps = 1000;
    std::uint64_t seed = 0;
    bool learn = true;
};

struct EpisodeResult {
    DeclarativeSpec spec;
    EpisodeTrace trace;
};

/// One greedy episode: act on the active state until no issue remains or
/// the step budget runs out, updating the policy when learning.
EpisodeResult run_episode(Policy& policy, const DeclarativeSpec& spec, const EpisodeConfig& config);

nlohmann::json to_json(const Policy& policy);
Policy policy_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EpisodeTrace& trace);
EpisodeTrace trace_from_json(const nlohmann::json& j);

/// "step 3: state=TopMargin action=A4(y-range-min −5) reward=+0.25"
std::string explain_step(const StepRecord& step, const StepSize& steps = {});

}  // namespace chartfix
