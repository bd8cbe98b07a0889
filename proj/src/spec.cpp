#include "chartfix/spec.hpp"

namespace chartfix {

namespace {

constexpr std::array<std::string_view, kGroupKindCount> kKindNames = {
    "TitleText", "AxisTick", "AxisLabel", "AxisLine", "AxisTitle",
    "Grid", "LegendShape", "LegendText", "Shape", "LabelText"};

constexpr std::array<std::string_view, 6> kPositionNames = {"Left", "XCenter", "Right", "Top", "YCenter", "Bottom"};

}  // namespace

std::string_view to_string(ElementClass c) {
    switch (c) {
        case ElementClass::Title: return "Title";
        case ElementClass::Axis: return "Axis";
        case ElementClass::Legend: return "Legend";
        case ElementClass::Mark: return "Mark";
        case ElementClass::Label: return "Label";
    }
    return "?";
}

std::string_view to_string(GroupKind k) { return kKindNames[static_cast<std::size_t>(k)]; }
std::string_view to_string(AnchorPosition p) { return kPositionNames[static_cast<std::size_t>(p)]; }

std::string_view to_string(Dependency d) {
    switch (d) {
        case Dependency::GlobalScale: return "GlobalScale";
        case Dependency::LocalScale: return "LocalScale";
        case Dependency::ReactiveGeometry: return "ReactiveGeometry";
    }
    return "?";
}

std::string_view to_string(AxisId a) { return a == AxisId::X ? "x" : "y"; }

std::string_view to_string(Scale::Variant v) { return v == Scale::Variant::Linear ? "Linear" : "Discrete"; }

std::optional<GroupKind> group_kind_from_string(std::string_view s) {
    for (std::size_t i = 0; i < kKindNames.size(); ++i)
        if (kKindNames[i] == s) return static_cast<GroupKind>(i);
    return std::nullopt;
}

std::optional<AnchorPosition> anchor_position_from_string(std::string_view s) {
    for (std::size_t i = 0; i < kPositionNames.size(); ++i)
        if (kPositionNames[i] == s) return static_cast<AnchorPosition>(i);
    return std::nullopt;
}

ElementClass class_of(GroupKind kind) {
    switch (kind) {
        case GroupKind::TitleText: return ElementClass::Title;
        case GroupKind::AxisTick:
        case GroupKind::AxisLabel:
        case GroupKind::AxisLine:
        case GroupKind::AxisTitle:
        case GroupKind::Grid: return ElementClass::Axis;
        case GroupKind::LegendShape:
        case GroupKind::LegendText: return ElementClass::Legend;
        case GroupKind::Shape: return ElementClass::Mark;
        case GroupKind::LabelText: return ElementClass::Label;
    }
    return ElementClass::Mark;
}

bool is_horizontal(AnchorPosition p) {
    return p == AnchorPosition::Left || p == AnchorPosition::XCenter || p == AnchorPosition::Right;
}

double position_of(const Rect2D& box, AnchorPosition p) {
    switch (p) {
        case AnchorPosition::Left: return box.x_min;
        case AnchorPosition::XCenter: return box.x_center();
        case AnchorPosition::Right: return box.x_max;
        case AnchorPosition::Top: return box.y_min;
        case AnchorPosition::YCenter: return box.y_center();
        case AnchorPosition::Bottom: return box.y_max;
    }
    return 0.0;
}

AnchorPosition opposite(AnchorPosition p) {
    switch (p) {
        case AnchorPosition::Left: return AnchorPosition::Right;
        case AnchorPosition::Right: return AnchorPosition::Left;
        case AnchorPosition::Top: return AnchorPosition::Bottom;
        case AnchorPosition::Bottom: return AnchorPosition::Top;
        default: return p;
    }
}

double Scale::pixel(double value) const {
    if (variant == Variant::Discrete) {
        const double n = categories.empty() ? 1.0 : static_cast<double>(categories.size());
        const double band = width() / n;
        return inverted ? range_max - band / 2 - value * band : range_min + band / 2 + value * band;
    }
    const double span = domain_max - domain_min;
    const double t = span == 0.0 ? 0.0 : (value - domain_min) / span;
    return inverted ? range_max - t * (range_max - range_min) : range_min + t * (range_max - range_min);
}

const AxisAssembly* DeclarativeSpec::axis(AxisId id) const {
    for (const auto& a : axes)
        if (a.axis == id) return &a;
    return nullptr;
}

AxisAssembly* DeclarativeSpec::axis(AxisId id) {
    for (auto& a : axes)
        if (a.axis == id) return &a;
    return nullptr;
}

std::vector<std::size_t> DeclarativeSpec::groups_of(ElementClass cls) const {
    std::vector<std::size_t> out;
    for (const auto& g : groups)
        if (g.cls == cls) out.push_back(g.id);
    return out;
}

}  // namespace chartfix
