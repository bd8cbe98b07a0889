#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "chartfix/interpreter.hpp"
#include "chartfix/spec.hpp"

namespace chartfix {

inline constexpr std::size_t kActionCount = 23;

enum class ActionCategory { GlobalScale, LocalOrRG, FontSize, TickNumber, AnchorSwitch, Algorithm };

std::string_view to_string(ActionCategory c);

struct ActionInfo {
    std::size_t id = 0;
    ActionCategory category = ActionCategory::GlobalScale;
    std::string_view name;  // e.g. "y-range-min"
    int sign = 0;           // -1 decrement, +1 increment, 0 for discrete actions
};

const std::array<ActionInfo, kActionCount>& action_catalog();

struct StepSize {
    double delta = 5.0;      // Δ, px
    double font_step = 1.0;  // px
    std::size_t tick_step = 1;
};

/// "A4(y-range-min −5)".
std::string action_label(std::size_t action, const StepSize& steps = {});
/// "A4" style short name.
std::string action_name(std::size_t action);

/// Smallest plot extent a global scale action may leave, px.
inline constexpr double kMinScaleWidth = 10.0;
inline constexpr double kMinFontSize = 1.0;
inline constexpr std::size_t kMaxTicks = 30;

/// Apply one of the 23 actions in the context of the active state.
/// Inapplicable actions return the spec unchanged.
/// Throws Error{InvalidActionId}.
DeclarativeSpec apply_action(const DeclarativeSpec& spec, std::size_t action, std::optional<std::size_t> active_state,
                             const StepSize& steps = {});

/// Axis whose tick count A18/A19 edit for this state.
std::optional<AxisId> implicated_axis(const DeclarativeSpec& spec, std::size_t active_state);

/// Round tick values for about `count` ticks over [lo, hi]: multiples of 1, 2 or 5 × 10^k.
std::vector<double> nice_ticks(double lo, double hi, std::size_t count);

/// Rebuild the tick, label and grid members of every axis from its tick_count.
void regenerate_ticks(DeclarativeSpec& spec);

/// Greedy occupancy placement of the class's anchored labels. Labels that
/// fit nowhere are hidden.
DeclarativeSpec place_labels(const DeclarativeSpec& spec, ElementClass cls);

/// Word-wrap the class's texts to their available width.
DeclarativeSpec wrap_text(const DeclarativeSpec& spec, ElementClass cls);

/// Greedy word wrap: fewest lines of at most max_width px; words are never split.
std::vector<std::string> wrap_words(std::string_view text, double max_width, double font_px,
                                    const svg::TextMetricsConfig& metrics = {});

}  // namespace chartfix
