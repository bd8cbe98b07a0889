#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chartfix/layout.hpp"
#include "chartfix/spec.hpp"

namespace chartfix {

enum class IssueScope { Global, Local };

enum class Issue {
    TopMargin,
    LeftMargin,
    RightMargin,
    LeftOutOfViewport,
    RightOutOfViewport,
    TopOutOfViewport,
    FontSize,
    OverlappingText,
};

enum class Side { Left, Right, Top };

inline constexpr std::size_t kGlobalIssueCount = 3;
inline constexpr std::size_t kLocalIssueCount = 5;
inline constexpr std::size_t kStateCount = kGlobalIssueCount + kClassCount * kLocalIssueCount;  // 28
/// Costs below this are rounding noise and count as zero.
inline constexpr double kCostEpsilon = 1e-6;

IssueScope scope_of(Issue issue);
std::string_view to_string(Issue issue);

/// One MDP state: a global issue, or a local issue for one element class.
struct IssueState {
    Issue issue = Issue::TopMargin;
    std::optional<ElementClass> cls;
    std::size_t index = 0;
};

/// States in greedy order: margins, then out-of-viewport per class, then
/// font size per class, then overlap per class.
IssueState state_at(std::size_t index);
std::size_t state_index(Issue issue, std::optional<ElementClass> cls = std::nullopt);
std::string state_name(std::size_t index);
std::optional<std::size_t> state_from_name(std::string_view name);

struct Thresholds {
    double min_font_size = 12.0;  // τ
    // Margin allowance per side; unset means 10% of the viewport dimension.
    std::optional<double> left_margin, right_margin, top_margin;

    double margin(Side side, const svg::Viewport& vp) const;
};

struct CostReport {
    std::array<double, kStateCount> cost{};
    double total = 0.0;
    std::optional<std::size_t> active_state;

    bool solved() const { return !active_state.has_value(); }
};

// Geometry-level costs.

/// Largest length by which any box crosses the given viewport edge.
double out_of_viewport_length(const std::vector<Rect2D>& boxes, const svg::Viewport& vp, Side side);
/// Distance from the viewport edge to the nearest content edge (negative when overflowing).
double margin_length(const std::vector<Rect2D>& boxes, const svg::Viewport& vp, Side side);
/// Mean of max(0, τ − s) over the sizes.
double mean_font_deficit(const std::vector<double>& sizes, double tau);
/// Sum of pairwise intersection areas.
double overlap_area(const std::vector<Rect2D>& boxes);

// Spec-level costs under a computed layout.

std::vector<Rect2D> class_boxes(const DeclarativeSpec& spec, const Layout& layout, ElementClass cls, bool text_only = false);
std::vector<double> class_font_sizes(const DeclarativeSpec& spec, const Layout& layout, ElementClass cls);

double cost_out_of_viewport(const DeclarativeSpec& spec, const Layout& layout, ElementClass cls, Side side);
double cost_white_space(const DeclarativeSpec& spec, const Layout& layout, const Thresholds& t, Side side);
double cost_font_size(const DeclarativeSpec& spec, const Layout& layout, ElementClass cls, double tau);
double cost_overlap(const DeclarativeSpec& spec, const Layout& layout, ElementClass cls);

double state_cost(const DeclarativeSpec& spec, const Layout& layout, std::size_t state, const Thresholds& t);

CostReport detect_state(const DeclarativeSpec& spec, const Layout& layout, const Thresholds& t);
CostReport detect_state(const DeclarativeSpec& spec, const Thresholds& t = {});

nlohmann::json to_json(const CostReport& report);

}  // namespace chartfix
