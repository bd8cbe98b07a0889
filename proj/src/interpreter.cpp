#include "chartfix/interpreter.hpp"

#include <algorithm>
#include <cmath>

namespace chartfix {

namespace {

constexpr std::array<ElementClass, kClassCount> kClasses = {ElementClass::Title, ElementClass::Axis, ElementClass::Legend,
                                                            ElementClass::Mark, ElementClass::Label};
constexpr std::array<Issue, 3> kViewportIssues = {Issue::LeftOutOfViewport, Issue::RightOutOfViewport,
                                                  Issue::TopOutOfViewport};

Side side_of(Issue issue) {
    switch (issue) {
        case Issue::LeftMargin:
        case Issue::LeftOutOfViewport: return Side::Left;
        case Issue::RightMargin:
        case Issue::RightOutOfViewport: return Side::Right;
        default: return Side::Top;
    }
}

std::vector<Rect2D> content_boxes(const DeclarativeSpec& spec, const Layout& layout) {
    std::vector<Rect2D> out;
    for (const auto& g : spec.groups)
        for (auto id : g.members) {
            const Placement& p = layout.slots[spec.slot_of(id)];
            if (!p.hidden && !p.box.empty()) out.push_back(p.box);
        }
    return out;
}

}  // namespace

IssueScope scope_of(Issue issue) {
    return issue == Issue::TopMargin || issue == Issue::LeftMargin || issue == Issue::RightMargin ? IssueScope::Global
                                                                                                  : IssueScope::Local;
}

std::string_view to_string(Issue issue) {
    switch (issue) {
        case Issue::TopMargin: return "TopMargin";
        case Issue::LeftMargin: return "LeftMargin";
        case Issue::RightMargin: return "RightMargin";
        case Issue::LeftOutOfViewport: return "LeftOutOfViewport";
        case Issue::RightOutOfViewport: return "RightOutOfViewport";
        case Issue::TopOutOfViewport: return "TopOutOfViewport";
        case Issue::FontSize: return "FontSize";
        case Issue::OverlappingText: return "OverlappingText";
    }
    return "?";
}

IssueState state_at(std::size_t index) {
    if (index < 3) return {static_cast<Issue>(index), std::nullopt, index};
    if (index < 18) {
        const std::size_t k = index - 3;
        return {kViewportIssues[k % 3], kClasses[k / 3], index};
    }
    if (index < 23) return {Issue::FontSize, kClasses[index - 18], index};
    return {Issue::OverlappingText, kClasses[(index - 23) % kClassCount], index};
}

std::size_t state_index(Issue issue, std::optional<ElementClass> cls) {
    const std::size_t c = cls ? static_cast<std::size_t>(*cls) : 0;
    switch (issue) {
        case Issue::TopMargin: return 0;
        case Issue::LeftMargin: return 1;
        case Issue::RightMargin: return 2;
        case Issue::LeftOutOfViewport: return 3 + 3 * c;
        case Issue::RightOutOfViewport: return 4 + 3 * c;
        case Issue::TopOutOfViewport: return 5 + 3 * c;
        case Issue::FontSize: return 18 + c;
        case Issue::OverlappingText: return 23 + c;
    }
    return 0;
}

std::string state_name(std::size_t index) {
    const IssueState s = state_at(index);
    std::string name(to_string(s.issue));
    if (s.cls) name += "@" + std::string(to_string(*s.cls));
    return name;
}

std::optional<std::size_t> state_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kStateCount; ++i)
        if (state_name(i) == name) return i;
    return std::nullopt;
}

double Thresholds::margin(Side side, const svg::Viewport& vp) const {
    switch (side) {
        case Side::Left: return left_margin.value_or(0.1 * vp.width);
        case Side::Right: return right_margin.value_or(0.1 * vp.width);
        case Side::Top: return top_margin.value_or(0.1 * vp.height);
    }
    return 0.0;
}

double out_of_viewport_length(const std::vector<Rect2D>& boxes, const svg::Viewport& vp, Side side) {
    double worst = 0.0;
    for (const auto& b : boxes) {
        if (b.empty()) continue;
        switch (side) {
            case Side::Left: worst = std::max(worst, -b.x_min); break;
            case Side::Right: worst = std::max(worst, b.x_max - vp.width); break;
            case Side::Top: worst = std::max(worst, -b.y_min); break;
        }
    }
    return worst;
}

double margin_length(const std::vector<Rect2D>& boxes, const svg::Viewport& vp, Side side) {
    Rect2D content;
    for (const auto& b : boxes) content = content.united(b);
    if (content.empty()) return 0.0;
    switch (side) {
        case Side::Left: return content.x_min;
        case Side::Right: return vp.width - content.x_max;
        case Side::Top: return content.y_min;
    }
    return 0.0;
}

double mean_font_deficit(const std::vector<double>& sizes, double tau) {
    if (sizes.empty()) return 0.0;
    double sum = 0.0;
    for (double s : sizes) sum += std::max(0.0, tau - s);
    return sum / static_cast<double>(sizes.size());
}

double overlap_area(const std::vector<Rect2D>& boxes) {
    double sum = 0.0;
    for (std::size_t i = 0; i < boxes.size(); ++i)
        for (std::size_t j = i + 1; j < boxes.size(); ++j) sum += intersection_area(boxes[i], boxes[j]);
    return sum;
}

std::vector<Rect2D> class_boxes(const DeclarativeSpec& spec, const Layout& layout, ElementClass cls, bool text_only) {
    std::vector<Rect2D> out;
    for (const auto& g : spec.groups) {
        if (g.cls != cls || (text_only && g.element_kind != svg::ElementKind::Text)) continue;
        for (auto id : g.members) {
            const Placement& p = layout.slots[spec.slot_of(id)];
            if (!p.hidden && !p.box.empty()) out.push_back(p.box);
        }
    }
    return out;
}

std::vector<double> class_font_sizes(const DeclarativeSpec& spec, const Layout& layout, ElementClass cls) {
    std::vector<double> out;
    for (const auto& g : spec.groups) {
        if (g.cls != cls || g.element_kind != svg::ElementKind::Text) continue;
        for (auto id : g.members) {
            const std::size_t slot = spec.slot_of(id);
            const Placement& p = layout.slots[slot];
            if (p.hidden || p.box.empty()) continue;
            out.push_back(p.local_font * spec.slot_geometry(slot).font_scale);
        }
    }
    return out;
}

double cost_out_of_viewport(const DeclarativeSpec& spec, const Layout& layout, ElementClass cls, Side side) {
    return out_of_viewport_length(class_boxes(spec, layout, cls), spec.viewport, side);
}

double cost_white_space(const DeclarativeSpec& spec, const Layout& layout, const Thresholds& t, Side side) {
    const double m = margin_length(content_boxes(spec, layout), spec.viewport, side);
    return std::max(0.0, m - t.margin(side, spec.viewport));
}

double cost_font_size(const DeclarativeSpec& spec, const Layout& layout, ElementClass cls, double tau) {
    return mean_font_deficit(class_font_sizes(spec, layout, cls), tau);
}

double cost_overlap(const DeclarativeSpec& spec, const Layout& layout, ElementClass cls) {
    return overlap_area(class_boxes(spec, layout, cls, true));
}

static double raw_state_cost(const DeclarativeSpec& spec, const Layout& layout, std::size_t state, const Thresholds& t) {
    const IssueState s = state_at(state);
    switch (s.issue) {
        case Issue::TopMargin:
        case Issue::LeftMargin:
        case Issue::RightMargin: return cost_white_space(spec, layout, t, side_of(s.issue));
        case Issue::LeftOutOfViewport:
        case Issue::RightOutOfViewport:
        case Issue::TopOutOfViewport: return cost_out_of_viewport(spec, layout, *s.cls, side_of(s.issue));
        case Issue::FontSize: return cost_font_size(spec, layout, *s.cls, t.min_font_size);
        case Issue::OverlappingText: return cost_overlap(spec, layout, *s.cls);
    }
    return 0.0;
}

double state_cost(const DeclarativeSpec& spec, const Layout& layout, std::size_t state, const Thresholds& t) {
    const double c = raw_state_cost(spec, layout, state, t);
    return c < kCostEpsilon ? 0.0 : c;
}

CostReport detect_state(const DeclarativeSpec& spec, const Layout& layout, const Thresholds& t) {
    CostReport r;
    const auto content = content_boxes(spec, layout);
    for (std::size_t i = 0; i < kStateCount; ++i) {
        const IssueState s = state_at(i);
        double c = 0.0;
        if (scope_of(s.issue) == IssueScope::Global)
            c = std::max(0.0, margin_length(content, spec.viewport, side_of(s.issue)) - t.margin(side_of(s.issue), spec.viewport));
        else
            c = raw_state_cost(spec, layout, i, t);
        if (c < kCostEpsilon) c = 0.0;
        r.cost[i] = c;
        r.total += c;
        if (c > 0.0 && !r.active_state) r.active_state = i;
    }
    return r;
}

CostReport detect_state(const DeclarativeSpec& spec, const Thresholds& t) { return detect_state(spec, compute_layout(spec), t); }

nlohmann::json to_json(const CostReport& report) {
    nlohmann::json costs = nlohmann::json::object();
    for (std::size_t i = 0; i < kStateCount; ++i)
        if (report.cost[i] != 0.0) costs[state_name(i)] = report.cost[i];
    return {{"total", report.total},
            {"active_state", report.active_state ? nlohmann::json(state_name(*report.active_state)) : nlohmann::json(nullptr)},
            {"costs", costs}};
}

}  // namespace chartfix
