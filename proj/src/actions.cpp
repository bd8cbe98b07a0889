#include "chartfix/actions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "chartfix/error.hpp"
#include "chartfix/layout.hpp"

namespace chartfix {

namespace {

using svg::ElementKind;

constexpr std::array<ActionInfo, kActionCount> kCatalog = {{
    {0, ActionCategory::GlobalScale, "x-range-min", -1},
    {1, ActionCategory::GlobalScale, "x-range-min", +1},
    {2, ActionCategory::GlobalScale, "x-range-max", -1},
    {3, ActionCategory::GlobalScale, "x-range-max", +1},
    {4, ActionCategory::GlobalScale, "y-range-min", -1},
    {5, ActionCategory::GlobalScale, "y-range-min", +1},
    {6, ActionCategory::GlobalScale, "y-range-max", -1},
    {7, ActionCategory::GlobalScale, "y-range-max", +1},
    {8, ActionCategory::LocalOrRG, "rg-offset-x", -1},
    {9, ActionCategory::LocalOrRG, "rg-offset-x", +1},
    {10, ActionCategory::LocalOrRG, "rg-offset-y", -1},
    {11, ActionCategory::LocalOrRG, "rg-offset-y", +1},
    {12, ActionCategory::LocalOrRG, "local-range-min", -1},
    {13, ActionCategory::LocalOrRG, "local-range-min", +1},
    {14, ActionCategory::LocalOrRG, "local-range-max", -1},
    {15, ActionCategory::LocalOrRG, "local-range-max", +1},
    {16, ActionCategory::FontSize, "font-size", +1},
    {17, ActionCategory::FontSize, "font-size", -1},
    {18, ActionCategory::TickNumber, "tick-count", -1},
    {19, ActionCategory::TickNumber, "tick-count", +1},
    {20, ActionCategory::AnchorSwitch, "anchor-switch", 0},
    {21, ActionCategory::Algorithm, "place-labels", 0},
    {22, ActionCategory::Algorithm, "wrap-text", 0},
}};

bool is_side(AnchorPosition p) { return p != AnchorPosition::XCenter && p != AnchorPosition::YCenter; }

std::string format_tick(double v, bool commas) {
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-9 * std::max(1.0, std::abs(v))) return svg::format_number(std::round(v * 100) / 100);
    std::string digits = std::to_string(static_cast<long long>(std::abs(r)));
    if (commas)
        for (int k = static_cast<int>(digits.size()) - 3; k > 0; k -= 3) digits.insert(static_cast<std::size_t>(k), ",");
    return (r < 0 ? "-" : "") + digits;
}

double axis_center(const Rect2D& b, AxisId axis) { return axis == AxisId::X ? b.x_center() : b.y_center(); }

/// Drop the synthetic members of one axis and renumber the rest.
void strip_synthetic(DeclarativeSpec& spec, const AxisAssembly& a) {
    const std::size_t n_doc = spec.source->document.size();
    std::vector<bool> drop(spec.synthetic.size(), false);
    for (auto gid : {a.tick_group, a.label_group, a.grid_group})
        if (gid)
            for (auto id : spec.groups[*gid].members)
                if (id >= n_doc) drop[id - n_doc] = true;
    std::vector<std::size_t> remap(spec.synthetic.size());
    std::vector<ElementGeometry> kept;
    for (std::size_t k = 0; k < spec.synthetic.size(); ++k) {
        remap[k] = kept.size();
        if (!drop[k]) kept.push_back(std::move(spec.synthetic[k]));
    }
    spec.synthetic = std::move(kept);
    for (auto& g : spec.groups) {
        std::size_t w = 0;
        for (std::size_t i = 0; i < g.members.size(); ++i) {
            const auto id = g.members[i];
            if (id >= n_doc && drop[id - n_doc]) continue;
            g.members[w] = id >= n_doc ? n_doc + remap[id - n_doc] : id;
            if (w != i) {
                if (i < g.member_state.size()) g.member_state[w] = std::move(g.member_state[i]);
                if (i < g.layout.pairing.size()) g.layout.pairing[w] = g.layout.pairing[i];
                if (i < g.layout.nudges.size()) g.layout.nudges[w] = g.layout.nudges[i];
            }
            ++w;
        }
        g.members.resize(w);
        g.member_state.resize(std::min(g.member_state.size(), w));
        if (g.layout.pairing.size() > w) g.layout.pairing.resize(w);
        if (g.layout.nudges.size() > w) g.layout.nudges.resize(w);
    }
}

void add_synthetic(DeclarativeSpec& spec, VisualGroup& g, svg::ElementId template_id, Vec2 shift,
                   std::optional<std::vector<std::string>> lines) {
    ElementGeometry geo = spec.geometry_of(template_id);
    geo.synthetic = true;
    geo.shift = shift;
    if (lines) geo.lines = std::move(*lines);
    const auto id = spec.synthetic_id(spec.synthetic.size());
    spec.synthetic.push_back(std::move(geo));
    g.members.push_back(id);
    g.member_state.emplace_back();
}

void regenerate_axis(DeclarativeSpec& spec, AxisAssembly& a) {
    strip_synthetic(spec, a);
    std::vector<VisualGroup*> parts;
    for (auto gid : {a.tick_group, a.label_group, a.grid_group})
        if (gid) parts.push_back(&spec.groups[*gid]);
    for (auto* g : parts)
        for (auto& m : g->member_state) {
            m.hidden = false;
            m.placement.reset();
        }
    if (a.tick_count == a.original_tick_count || !a.tick_group) return;

    const Scale& original = a.axis == AxisId::X ? spec.original_x_scale : spec.original_y_scale;
    const std::size_t n = a.tick_count;
    if (original.variant == Scale::Variant::Discrete) {
        const std::size_t total = a.original_tick_count;
        std::vector<bool> keep(total, false);
        for (std::size_t k = 0; k < n; ++k)
            keep[static_cast<std::size_t>(std::lround(static_cast<double>(k * (total - 1)) / static_cast<double>(n - 1)))] = true;
        for (auto* g : parts)
            for (std::size_t i = 0; i < g->member_state.size() && i < total; ++i) g->member_state[i].hidden = !keep[i];
        return;
    }

    for (auto* g : parts)
        for (auto& m : g->member_state) m.hidden = true;
    VisualGroup& ticks = spec.groups[*a.tick_group];
    const std::size_t first_new = ticks.members.size();
    const svg::ElementId tick_template = ticks.members.front();
    const double c0 = axis_center(spec.geometry_of(tick_template).base, a.axis);
    const auto values = nice_ticks(original.domain_min, original.domain_max, n);
    for (std::size_t k = 0; k < values.size(); ++k) {
        const double v = values[k];
        const double q = original.pixel(v);
        const Vec2 shift = a.axis == AxisId::X ? Vec2{q - c0, 0} : Vec2{0, q - c0};
        add_synthetic(spec, ticks, tick_template, shift, std::nullopt);
        if (a.label_group) {
            VisualGroup& labels = spec.groups[*a.label_group];
            const svg::ElementId t = labels.members.front();
            const double lc = axis_center(spec.geometry_of(t).base, a.axis);
            const Vec2 ls = a.axis == AxisId::X ? Vec2{q - lc, 0} : Vec2{0, q - lc};
            add_synthetic(spec, labels, t, ls, std::vector<std::string>{format_tick(v, a.comma_labels)});
            if (labels.layout.per_member) {
                labels.layout.pairing.push_back(first_new + k);
                labels.layout.nudges.push_back({});
            }
        }
        if (a.grid_group) {
            VisualGroup& grid = spec.groups[*a.grid_group];
            const svg::ElementId t = grid.members.front();
            const double gc = axis_center(spec.geometry_of(t).base, a.axis);
            add_synthetic(spec, grid, t, a.axis == AxisId::X ? Vec2{q - gc, 0} : Vec2{0, q - gc}, std::nullopt);
        }
    }
}

/// Candidate anchors around the anchor element, in trial order.
std::vector<std::pair<Anchor, Anchor>> candidate_anchors(const Anchor& h, const Anchor& v) {
    using P = AnchorPosition;
    const double mv = std::max(std::abs(v.offset), 2.0);
    const double mh = std::max(std::abs(h.offset), 2.0);
    const std::size_t g = h.anchor_group;
    const Anchor hc{P::XCenter, P::XCenter, 0, g}, vc{P::YCenter, P::YCenter, 0, g};
    return {
        {hc, {P::Bottom, P::Top, -mv, g}},      // above
        {hc, {P::Top, P::Bottom, mv, g}},       // below
        {hc, {P::Top, P::Top, mv, g}},          // inside top
        {hc, {P::Bottom, P::Bottom, -mv, g}},   // inside bottom
        {{P::Right, P::Left, -mh, g}, vc},      // left
        {{P::Left, P::Right, mh, g}, vc},       // right
    };
}

Rect2D place_at(const Rect2D& box, const Rect2D& anchor, const Anchor& h, const Anchor& v) {
    return box.translated({position_of(anchor, h.target) + h.offset - position_of(box, h.self),
                           position_of(anchor, v.target) + v.offset - position_of(box, v.self)});
}

bool placeable(const VisualGroup& g) {
    return (g.kind == GroupKind::AxisLabel || g.kind == GroupKind::LabelText || g.kind == GroupKind::LegendText) &&
           g.layout.variant == Dependency::ReactiveGeometry && g.layout.per_member && g.layout.horizontal &&
           g.layout.vertical;
}

double text_width(std::string_view s, double font_px, const svg::TextMetricsConfig& m) {
    return static_cast<double>(svg::utf8_length(s)) * m.avg_char_width_ratio * font_px;
}

Anchor switched(const Anchor& original, int count, bool vertical) {
    using P = AnchorPosition;
    if (count == 0) return original;
    if (is_side(original.self)) return {opposite(original.self), opposite(original.target), -original.offset, original.anchor_group};
    const double m = std::max(std::abs(original.offset), 2.0);
    if (count == 1)
        return vertical ? Anchor{P::Top, P::Bottom, m, original.anchor_group} : Anchor{P::Left, P::Right, m, original.anchor_group};
    return vertical ? Anchor{P::Bottom, P::Top, -m, original.anchor_group} : Anchor{P::Right, P::Left, -m, original.anchor_group};
}

bool switch_anchor(VisualGroup& g) {
    auto& dep = g.layout;
    if (dep.variant != Dependency::ReactiveGeometry) return false;
    if (!dep.original_vertical) dep.original_vertical = dep.vertical;
    if (!dep.original_horizontal) dep.original_horizontal = dep.horizontal;
    const auto& ov = dep.original_vertical;
    const auto& oh = dep.original_horizontal;
    bool vertical = true;
    if (ov && (ov->self == AnchorPosition::Top || ov->self == AnchorPosition::Bottom)) vertical = true;
    else if (oh && (oh->self == AnchorPosition::Left || oh->self == AnchorPosition::Right)) vertical = false;
    else vertical = ov.has_value();
    const auto& orig = vertical ? ov : oh;
    if (!orig) return false;
    const int period = is_side(orig->self) ? 2 : 3;
    dep.switch_count = (dep.switch_count + 1) % period;
    (vertical ? dep.vertical : dep.horizontal) = switched(*orig, dep.switch_count, vertical);
    for (auto& m : g.member_state) m.placement.reset();
    return true;
}

std::optional<ElementClass> class_of_state(std::optional<std::size_t> state) {
    if (!state) return std::nullopt;
    return state_at(*state).cls;
}

}  // namespace

std::string_view to_string(ActionCategory c) {
    switch (c) {
        case ActionCategory::GlobalScale: return "GlobalScale";
        case ActionCategory::LocalOrRG: return "LocalOrRG";
        case ActionCategory::FontSize: return "FontSize";
        case ActionCategory::TickNumber: return "TickNumber";
        case ActionCategory::AnchorSwitch: return "AnchorSwitch";
        case ActionCategory::Algorithm: return "Algorithm";
    }
    return "?";
}

const std::array<ActionInfo, kActionCount>& action_catalog() { return kCatalog; }

std::string action_name(std::size_t action) { return "A" + std::to_string(action); }

std::string action_label(std::size_t action, const StepSize& steps) {
    if (action >= kActionCount) throw Error(ErrorCode::InvalidActionId, "no action " + std::to_string(action));
    const ActionInfo& a = kCatalog[action];
    std::string out = action_name(action) + "(" + std::string(a.name);
    if (a.sign != 0) {
        double amount = steps.delta;
        if (a.category == ActionCategory::FontSize) amount = steps.font_step;
        if (a.category == ActionCategory::TickNumber) amount = static_cast<double>(steps.tick_step);
        out += a.sign < 0 ? " \xE2\x88\x92" : " +";
        out += svg::format_number(amount);
    }
    return out + ")";
}

std::optional<AxisId> implicated_axis(const DeclarativeSpec& spec, std::size_t active_state) {
    const IssueState s = state_at(active_state);
    auto available = [&](AxisId id) -> std::optional<AxisId> {
        if (spec.axis(id)) return id;
        const AxisId other = id == AxisId::X ? AxisId::Y : AxisId::X;
        if (spec.axis(other)) return other;
        return std::nullopt;
    };
    if (s.issue == Issue::TopMargin) return available(AxisId::Y);
    if (!s.cls || *s.cls != ElementClass::Axis) return available(AxisId::X);

    const Layout layout = compute_layout(spec);
    double score[2] = {0, 0};
    for (const auto& g : spec.groups) {
        if (g.cls != ElementClass::Axis || !g.axis) continue;
        std::vector<Rect2D> boxes;
        std::vector<double> fonts;
        for (auto id : g.members) {
            const std::size_t slot = spec.slot_of(id);
            const Placement& p = layout.slots[slot];
            if (p.hidden || p.box.empty()) continue;
            boxes.push_back(p.box);
            if (g.element_kind == ElementKind::Text) fonts.push_back(p.local_font * spec.slot_geometry(slot).font_scale);
        }
        double v = 0;
        switch (s.issue) {
            case Issue::LeftOutOfViewport: v = out_of_viewport_length(boxes, spec.viewport, Side::Left); break;
            case Issue::RightOutOfViewport: v = out_of_viewport_length(boxes, spec.viewport, Side::Right); break;
            case Issue::TopOutOfViewport: v = out_of_viewport_length(boxes, spec.viewport, Side::Top); break;
            case Issue::FontSize: v = fonts.empty() ? 0 : mean_font_deficit(fonts, 12.0); break;
            case Issue::OverlappingText: v = g.element_kind == ElementKind::Text ? overlap_area(boxes) : 0; break;
            default: break;
        }
        double& slot = score[*g.axis == AxisId::X ? 0 : 1];
        slot = s.issue == Issue::OverlappingText ? slot + v : std::max(slot, v);
    }
    return available(score[1] > score[0] ? AxisId::Y : AxisId::X);
}

void regenerate_ticks(DeclarativeSpec& spec) {
    for (auto& a : spec.axes) regenerate_axis(spec, a);
}

std::vector<std::string> wrap_words(std::string_view text, double max_width, double font_px, const svg::TextMetricsConfig& metrics) {
    std::vector<std::string> words;
    std::istringstream in{std::string(text)};
    for (std::string w; in >> w;) words.push_back(w);
    std::vector<std::string> lines;
    std::string current;
    for (const auto& w : words) {
        if (current.empty()) {
            current = w;
        } else if (text_width(current + " " + w, font_px, metrics) <= max_width + 1e-9) {
            current += " " + w;
        } else {
            lines.push_back(std::move(current));
            current = w;
        }
    }
    if (!current.empty()) lines.push_back(std::move(current));
    return lines;
}

DeclarativeSpec place_labels(const DeclarativeSpec& spec, ElementClass cls) {
    DeclarativeSpec out = spec;
    const Layout layout = compute_layout(spec);
    std::vector<Rect2D> placed;
    auto free = [&](const Rect2D& b) {
        return std::none_of(placed.begin(), placed.end(), [&](const Rect2D& p) { return intersection_area(p, b) > 0; });
    };
    auto fits = [&](const Rect2D& b) {
        return b.x_min >= 0 && b.x_max <= spec.viewport.width && b.y_min >= 0 && free(b);
    };
    for (const auto& g : spec.groups) {
        if (g.cls != cls || g.element_kind != ElementKind::Text || placeable(g)) continue;
        for (auto id : g.members) {
            const Placement& p = layout.slots[spec.slot_of(id)];
            if (!p.hidden && !p.box.empty()) placed.push_back(p.box);
        }
    }
    for (auto& g : out.groups) {
        if (g.cls != cls || !placeable(g)) continue;
        const auto& dep = g.layout;
        const VisualGroup& anchor = spec.groups[dep.horizontal->anchor_group];
        for (std::size_t i = 0; i < g.members.size(); ++i) {
            MemberState& ms = g.member_state[i];
            const Placement& p = layout.slots[spec.slot_of(g.members[i])];
            if (ms.hidden || p.box.empty()) continue;
            if (fits(p.box)) {
                placed.push_back(p.box);
                continue;
            }
            const std::size_t j = i < dep.pairing.size() ? dep.pairing[i] : i;
            const Rect2D a = j < anchor.members.size() ? layout.slots[spec.slot_of(anchor.members[j])].box : Rect2D{};
            const Anchor h = ms.placement ? ms.placement->first : *dep.horizontal;
            const Anchor v = ms.placement ? ms.placement->second : *dep.vertical;
            bool done = false;
            // Inside the viewport if possible; otherwise anywhere clear of other labels.
            for (int pass = 0; pass < 2 && !done; ++pass) {
                auto ok = [&](const Rect2D& b) { return pass == 0 ? fits(b) : free(b); };
                if (pass == 1 && free(p.box)) {
                    placed.push_back(p.box);
                    done = true;
                    break;
                }
                if (a.empty()) continue;
                for (const auto& [ch, cv] : candidate_anchors(h, v)) {
                    const Rect2D b = place_at(p.box, a, ch, cv);
                    if (!ok(b)) continue;
                    ms.placement = std::make_pair(ch, cv);
                    placed.push_back(b);
                    done = true;
                    break;
                }
            }
            if (!done) ms.hidden = true;
        }
    }
    return out;
}

DeclarativeSpec wrap_text(const DeclarativeSpec& spec, ElementClass cls) {
    DeclarativeSpec out = spec;
    const Layout layout = compute_layout(spec);
    for (auto& g : out.groups) {
        if (g.cls != cls || g.element_kind != ElementKind::Text) continue;
        const auto& dep = g.layout;
        for (std::size_t i = 0; i < g.members.size(); ++i) {
            const std::size_t slot = spec.slot_of(g.members[i]);
            const ElementGeometry& geo = spec.slot_geometry(slot);
            const Placement& p = layout.slots[slot];
            MemberState& ms = g.member_state[i];
            const auto& lines = ms.lines ? *ms.lines : geo.lines;
            std::string text;
            for (const auto& l : lines) text += (text.empty() ? "" : " ") + l;

            double width = 0;
            if (g.kind == GroupKind::AxisLabel && g.axis && spec.scale(*g.axis).variant == Scale::Variant::Discrete) {
                width = band_step(spec.scale(*g.axis));
            } else if (dep.variant == Dependency::ReactiveGeometry && dep.horizontal) {
                const VisualGroup& a = spec.groups[dep.horizontal->anchor_group];
                Rect2D box;
                if (dep.per_member) {
                    const std::size_t j = i < dep.pairing.size() ? dep.pairing[i] : i;
                    if (j < a.members.size()) box = layout.slots[spec.slot_of(a.members[j])].box;
                } else {
                    for (auto id : a.members) {
                        const Placement& q = layout.slots[spec.slot_of(id)];
                        if (!q.hidden) box = box.united(q.box);
                    }
                }
                width = box.width();
            }
            if (width < 1.0) width = spec.viewport.width / 4;
            auto wrapped = wrap_words(text, width, p.local_font * geo.font_scale, spec.metrics);
            if (wrapped.empty()) continue;
            if (wrapped == geo.lines) ms.lines.reset();
            else ms.lines = std::move(wrapped);
        }
    }
    return out;
}

DeclarativeSpec apply_action(const DeclarativeSpec& spec, std::size_t action, std::optional<std::size_t> active_state,
                             const StepSize& steps) {
    if (action >= kActionCount) throw Error(ErrorCode::InvalidActionId, "no action " + std::to_string(action));
    const ActionInfo& info = kCatalog[action];
    const double delta = steps.delta * info.sign;
    const std::optional<ElementClass> cls = class_of_state(active_state);
    DeclarativeSpec out = spec;

    switch (action) {
        case 0: case 1: case 2: case 3: case 4: case 5: case 6: case 7: {
            Scale& s = action < 4 ? out.x_scale : out.y_scale;
            const bool min_end = action % 4 < 2;
            const double lo = s.range_min + (min_end ? delta : 0);
            const double hi = s.range_max + (min_end ? 0 : delta);
            if (hi - lo < kMinScaleWidth) return out;
            s.range_min = lo;
            s.range_max = hi;
            if (s.variant == Scale::Variant::Discrete) s.step = band_step(s);
            return out;
        }
        case 8: case 9: case 10: case 11: {
            if (!cls) return out;
            const bool horizontal = action < 10;
            for (auto& g : out.groups) {
                if (g.cls != *cls || g.layout.variant != Dependency::ReactiveGeometry) continue;
                auto& a = horizontal ? g.layout.horizontal : g.layout.vertical;
                if (!a) continue;
                a->offset += delta;
                for (auto& m : g.member_state)
                    if (m.placement) (horizontal ? m.placement->first : m.placement->second).offset += delta;
            }
            return out;
        }
        case 12: case 13: case 14: case 15: {
            if (!cls) return out;
            for (auto& g : out.groups) {
                if (g.cls != *cls || !g.layout.local) continue;
                LocalScale& ls = *g.layout.local;
                if (ls.original_max - ls.original_min <= 0) continue;
                const double lo = ls.range_min + (action < 14 ? delta : 0);
                const double hi = ls.range_max + (action < 14 ? 0 : delta);
                if (hi - lo < 1.0) continue;
                ls.range_min = lo;
                ls.range_max = hi;
            }
            return out;
        }
        case 16: case 17: {
            if (!cls) return out;
            const double step = steps.font_step * info.sign;
            for (auto& g : out.groups) {
                if (g.cls != *cls || !g.font_size) continue;
                const double next = *g.font_size + step;
                if (next < kMinFontSize) continue;
                g.font_size = next;
            }
            return out;
        }
        case 18: case 19: {
            if (!active_state) return out;
            const auto axis = implicated_axis(spec, *active_state);
            if (!axis) return out;
            AxisAssembly* a = out.axis(*axis);
            const Scale& original = *axis == AxisId::X ? out.original_x_scale : out.original_y_scale;
            const std::size_t cap = original.variant == Scale::Variant::Discrete ? a->original_tick_count : kMaxTicks;
            const long next = static_cast<long>(a->tick_count) + static_cast<long>(steps.tick_step) * info.sign;
            if (next < 2 || next > static_cast<long>(cap)) return out;
            a->tick_count = static_cast<std::size_t>(next);
            regenerate_axis(out, *a);
            return out;
        }
        case 20: {
            if (!cls) return out;
            for (auto& g : out.groups)
                if (g.cls == *cls) switch_anchor(g);
            return out;
        }
        case 21: return cls ? place_labels(spec, *cls) : out;
        case 22: return cls ? wrap_text(spec, *cls) : out;
        default: break;
    }
    return out;
}

std::vector<double> nice_ticks(double lo, double hi, std::size_t count) {
    if (hi < lo) std::swap(lo, hi);
    if (count < 2 || !(hi > lo)) return {lo};
    const double raw = (hi - lo) / static_cast<double>(count - 1);
    const double power = std::pow(10.0, std::floor(std::log10(raw)));
    const double err = raw / power;
    const double factor = err >= std::sqrt(50.0) ? 10 : err >= std::sqrt(10.0) ? 5 : err >= std::sqrt(2.0) ? 2 : 1;
    const double step = factor * power;
    std::vector<double> out;
    const auto first = static_cast<long long>(std::ceil(lo / step - 1e-9));
    const auto last = static_cast<long long>(std::floor(hi / step + 1e-9));
    for (long long k = first; k <= last; ++k) out.push_back(static_cast<double>(k) * step);
    return out;
}

}  // namespace chartfix
