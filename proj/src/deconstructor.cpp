#include "chartfix/deconstructor.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "chartfix/error.hpp"

namespace chartfix {

namespace {

using svg::ElementId;
using svg::ElementKind;

constexpr double kTickMaxLength = 15.0;
constexpr double kAlignTolerance = 3.0;
constexpr double kLinearResidual = 1.0;
constexpr double kCollinear = 1.0;
constexpr double kAnchorResidual = 3.0;
constexpr double kBackgroundCover = 0.95;
constexpr double kLegendPairDistance = 40.0;
constexpr double kTie = 1e-6;

std::string attr_or_empty(const svg::Element& e, std::string_view name) {
    const auto* v = e.attribute(name);
    return v ? *v : std::string{};
}

const Rect2D& base_box(const SpecSource& s, ElementId id) { return s.geometry[*s.slot[id]].base; }

Rect2D union_box(const SpecSource& s, const std::vector<ElementId>& ids) {
    Rect2D r;
    for (auto id : ids) r = r.united(base_box(s, id));
    return r;
}

char orientation(const Rect2D& b) {
    if (b.height() < 1e-6 && b.width() > 0) return 'h';
    if (b.width() < 1e-6 && b.height() > 0) return 'v';
    return 'a';
}

std::string group_key(const SpecSource& s, const ElementGeometry& geo) {
    const auto& doc = s.document;
    const auto& e = doc.at(geo.element);
    std::string key(svg::to_string(e.kind));
    std::vector<std::string> names;
    for (const auto& [k, v] : e.attributes)
        if (k != "id" && k != "style") names.push_back(k);
    std::sort(names.begin(), names.end());
    key += '|';
    for (const auto& n : names) key += n + ',';
    key += '|';
    if (const auto* st = e.attribute("style"))
        for (const auto& [k, v] : css::parse_declarations(*st)) key += k + ',';
    if (e.kind == ElementKind::Text) {
        key += "|fs=" + svg::format_number(e.font_size());
        key += "|fw=" + std::string(e.style_value("font-weight"));
        key += "|ff=" + std::string(e.style_value("font-family"));
    }
    key += "|c=" + attr_or_empty(e, "class");
    if (e.parent) {
        const auto& p = doc.at(*e.parent);
        key += "|p=" + attr_or_empty(p, "class");
        if (p.parent) key += "|gp=" + attr_or_empty(doc.at(*p.parent), "class");
    }
    key += "|r=" + std::to_string(geo.transform.rotation_degrees());
    if (e.kind == ElementKind::Line || e.kind == ElementKind::Path) key += std::string("|o=") + orientation(geo.base);
    return key;
}

std::vector<SignatureEntry> signature_of(const svg::Document& doc, const std::vector<ElementId>& members) {
    std::map<std::string, std::set<std::string>> values;
    for (auto id : members) {
        const auto& e = doc.at(id);
        for (const auto& [k, v] : e.attributes)
            if (k != "id" && k != "style") values[k].insert(v);
        if (const auto* st = e.attribute("style"))
            for (const auto& [k, v] : css::parse_declarations(*st)) values["style:" + k].insert(v);
    }
    std::vector<SignatureEntry> out;
    for (const auto& [k, vs] : values) out.push_back({k, vs.size() == 1});
    return out;
}

double along(const Rect2D& b, AxisId axis) { return axis == AxisId::X ? b.x_center() : b.y_center(); }

std::optional<double> parse_label_number(std::string s) {
    std::string clean;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.compare(i, 3, "\xE2\x88\x92") == 0) {  // U+2212 minus sign
            clean.push_back('-');
            i += 2;
        } else if (s[i] != ',' && s[i] != ' ') {
            clean.push_back(s[i]);
        }
    }
    return svg::parse_number(clean);
}

struct AnchorFit {
    AnchorPosition self, target;
    double mean = 0, var = 0;
    std::vector<double> offsets;
};

/// Best ⟨p, p_a⟩ pair on one axis for members matched to anchor boxes.
AnchorFit fit_axis(const std::vector<Rect2D>& mine, const std::vector<Rect2D>& theirs, bool horizontal) {
    const auto& positions = horizontal ? kHorizontalPositions : kVerticalPositions;
    AnchorFit best;
    bool have = false;
    for (auto p : positions) {
        for (auto q : positions) {
            AnchorFit f{p, q, 0, 0, {}};
            for (std::size_t i = 0; i < mine.size(); ++i)
                f.offsets.push_back(position_of(mine[i], p) - position_of(theirs[i], q));
            f.mean = std::accumulate(f.offsets.begin(), f.offsets.end(), 0.0) / static_cast<double>(f.offsets.size());
            for (double o : f.offsets) f.var += (o - f.mean) * (o - f.mean);
            f.var /= static_cast<double>(f.offsets.size());
            auto better = [&] {
                if (!have) return true;
                if (f.var < best.var - kTie) return true;
                if (f.var > best.var + kTie) return false;
                if (std::abs(f.mean) < std::abs(best.mean) - kTie) return true;
                if (std::abs(f.mean) > std::abs(best.mean) + kTie) return false;
                return p == q && best.self != best.target;
            };
            if (better()) {
                best = std::move(f);
                have = true;
            }
        }
    }
    return best;
}

std::vector<std::size_t> order_by(const std::vector<Rect2D>& boxes, int mode) {
    std::vector<std::size_t> idx(boxes.size());
    std::iota(idx.begin(), idx.end(), 0);
    if (mode == 1)
        std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return boxes[a].x_center() < boxes[b].x_center(); });
    if (mode == 2)
        std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return boxes[a].y_center() < boxes[b].y_center(); });
    return idx;
}

/// Candidate one-to-one pairings: document order, left-to-right, top-to-bottom.
std::vector<std::vector<std::size_t>> candidate_pairings(const std::vector<Rect2D>& mine, const std::vector<Rect2D>& theirs) {
    std::vector<std::vector<std::size_t>> out;
    for (int mode = 0; mode < 3; ++mode) {
        const auto a = order_by(mine, mode);
        const auto b = order_by(theirs, mode);
        std::vector<std::size_t> pairing(mine.size());
        for (std::size_t k = 0; k < a.size(); ++k) pairing[a[k]] = b[k];
        if (std::find(out.begin(), out.end(), pairing) == out.end()) out.push_back(std::move(pairing));
    }
    return out;
}

}  // namespace

std::string element_text(const svg::Element& e) {
    std::string out;
    for (const auto& l : e.lines) {
        if (!out.empty()) out.push_back(' ');
        out += l;
    }
    return out;
}

std::vector<VisualGroup> detect_groups(const SpecSource& source) {
    if (source.geometry.empty()) throw Error(ErrorCode::EmptyDocument, "no visible elements");
    std::vector<VisualGroup> groups;
    std::map<std::string, std::size_t> by_key;
    for (const auto& geo : source.geometry) {
        const std::string key = group_key(source, geo);
        auto [it, inserted] = by_key.try_emplace(key, groups.size());
        if (inserted) {
            VisualGroup g;
            g.id = groups.size();
            g.element_kind = geo.kind;
            groups.push_back(std::move(g));
        }
        groups[it->second].members.push_back(geo.element);
    }
    for (auto& g : groups) g.signature = signature_of(source.document, g.members);
    return groups;
}

Scale infer_scale(const std::vector<std::string>& labels, const std::vector<double>& positions) {
    const std::size_t n = positions.size();
    if (n < 2 || labels.size() != n) throw Error(ErrorCode::DegenerateScale, "an axis needs at least two labels");
    const auto [lo, hi] = std::minmax_element(positions.begin(), positions.end());
    if (*hi - *lo < 1e-9) throw Error(ErrorCode::DegenerateScale, "all ticks share one position");

    std::vector<double> values;
    for (const auto& l : labels) {
        const auto v = parse_label_number(l);
        if (!v) break;
        values.push_back(*v);
    }
    if (values.size() == n) {
        const double mv = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
        const double mp = std::accumulate(positions.begin(), positions.end(), 0.0) / static_cast<double>(n);
        double sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < n; ++i) {
            sxx += (values[i] - mv) * (values[i] - mv);
            sxy += (values[i] - mv) * (positions[i] - mp);
        }
        if (sxx > 0) {
            const double b = sxy / sxx;
            const double a = mp - b * mv;
            double worst = 0;
            for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(a + b * values[i] - positions[i]));
            if (worst < kLinearResidual && std::abs(b) > 1e-12) {
                Scale s;
                s.variant = Scale::Variant::Linear;
                s.domain_min = *std::min_element(values.begin(), values.end());
                s.domain_max = *std::max_element(values.begin(), values.end());
                const double p0 = a + b * s.domain_min, p1 = a + b * s.domain_max;
                s.range_min = std::min(p0, p1);
                s.range_max = std::max(p0, p1);
                s.inverted = b < 0;
                return s;
            }
        }
    }

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto x, auto y) { return positions[x] < positions[y]; });
    std::vector<double> gaps;
    for (std::size_t k = 1; k < n; ++k) gaps.push_back(positions[idx[k]] - positions[idx[k - 1]]);
    std::sort(gaps.begin(), gaps.end());
    const double step = gaps.size() % 2 ? gaps[gaps.size() / 2] : 0.5 * (gaps[gaps.size() / 2 - 1] + gaps[gaps.size() / 2]);
    if (step < 1e-9) throw Error(ErrorCode::DegenerateScale, "ticks overlap");
    Scale s;
    s.variant = Scale::Variant::Discrete;
    for (auto i : idx) s.categories.push_back(labels[i]);
    s.step = step;
    s.range_min = positions[idx.front()] - step / 2;
    s.range_max = positions[idx.back()] + step / 2;
    return s;
}

std::vector<AxisAssembly> detect_axes(const SpecSource& source, std::vector<VisualGroup>& groups) {
    std::vector<AxisAssembly> out;
    std::set<std::size_t> used;
    for (auto& tg : groups) {
        if (tg.element_kind != ElementKind::Line || tg.members.size() < 2 || used.count(tg.id)) continue;
        std::vector<Rect2D> boxes;
        for (auto id : tg.members) boxes.push_back(base_box(source, id));
        const bool vertical = std::all_of(boxes.begin(), boxes.end(), [](const Rect2D& b) {
            return b.width() < 0.5 && b.height() > 0 && b.height() <= kTickMaxLength;
        });
        const bool horizontal = std::all_of(boxes.begin(), boxes.end(), [](const Rect2D& b) {
            return b.height() < 0.5 && b.width() > 0 && b.width() <= kTickMaxLength;
        });
        if (!vertical && !horizontal) continue;
        // Vertical tick marks belong to a horizontal (x) axis.
        const AxisId axis = vertical ? AxisId::X : AxisId::Y;
        auto lo = [&](const Rect2D& b) { return axis == AxisId::X ? b.y_min : b.x_min; };
        auto hi = [&](const Rect2D& b) { return axis == AxisId::X ? b.y_max : b.x_max; };
        bool shared = true;
        for (const auto& b : boxes)
            shared &= std::abs(lo(b) - lo(boxes[0])) <= kCollinear && std::abs(hi(b) - hi(boxes[0])) <= kCollinear;
        if (!shared) {
            // Tick marks repeated in several bands: small multiples.
            std::vector<double> bands;
            for (const auto& b : boxes)
                if (std::none_of(bands.begin(), bands.end(), [&](double v) { return std::abs(v - lo(b)) <= kCollinear; }))
                    bands.push_back(lo(b));
            if (bands.size() > 1 && bands.size() * 2 <= boxes.size())
                throw Error(ErrorCode::UnsupportedChart, "several plotting areas found; only single-view charts are supported");
            continue;
        }

        // Sort ticks along the axis.
        std::vector<std::size_t> order(boxes.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return along(boxes[a], axis) < along(boxes[b], axis); });
        std::vector<ElementId> ticks;
        std::vector<double> tick_pos;
        for (auto i : order) {
            ticks.push_back(tg.members[i]);
            tick_pos.push_back(along(boxes[i], axis));
        }
        const double band_lo = lo(boxes[0]), band_hi = hi(boxes[0]);

        // Matching label group: one label per tick, aligned, all on one side.
        std::optional<std::size_t> label_group;
        std::vector<ElementId> labels;
        double best_distance = 1e300;
        for (auto& lg : groups) {
            if (lg.element_kind != ElementKind::Text || lg.members.size() != ticks.size() || used.count(lg.id)) continue;
            std::vector<ElementId> sorted = lg.members;
            std::stable_sort(sorted.begin(), sorted.end(), [&](auto a, auto b) {
                return along(base_box(source, a), axis) < along(base_box(source, b), axis);
            });
            bool ok = true;
            int side = 0;
            double distance = 0;
            for (std::size_t k = 0; k < sorted.size() && ok; ++k) {
                const Rect2D& b = base_box(source, sorted[k]);
                ok = std::abs(along(b, axis) - tick_pos[k]) <= kAlignTolerance;
                const double cross = axis == AxisId::X ? b.y_center() : b.x_center();
                const int s = cross > band_hi ? 1 : cross < band_lo ? -1 : 0;
                if (s == 0 || (side != 0 && s != side)) ok = false;
                side = s;
                distance += s > 0 ? cross - band_hi : band_lo - cross;
            }
            if (ok && distance < best_distance) {
                best_distance = distance;
                label_group = lg.id;
                labels = std::move(sorted);
            }
        }
        if (!label_group) continue;

        AxisAssembly a;
        a.axis = axis;
        a.tick_group = tg.id;
        a.label_group = label_group;
        tg.members = ticks;
        groups[*label_group].members = labels;
        tg.kind = GroupKind::AxisTick;
        groups[*label_group].kind = GroupKind::AxisLabel;
        used.insert(tg.id);
        used.insert(*label_group);

        // Domain line collinear with either edge of the tick band.
        for (auto& g : groups) {
            if (used.count(g.id) || (g.element_kind != ElementKind::Line && g.element_kind != ElementKind::Path)) continue;
            std::size_t collinear = 0;
            for (auto id : g.members) {
                const Rect2D& b = base_box(source, id);
                const bool flat = axis == AxisId::X ? b.height() < 0.5 : b.width() < 0.5;
                const double c = axis == AxisId::X ? b.y_center() : b.x_center();
                const double from = axis == AxisId::X ? b.x_min : b.y_min;
                const double to = axis == AxisId::X ? b.x_max : b.y_max;
                if (flat && (std::abs(c - band_lo) <= kCollinear || std::abs(c - band_hi) <= kCollinear) &&
                    from <= tick_pos.front() + kCollinear && to >= tick_pos.back() - kCollinear)
                    ++collinear;
            }
            if (collinear == 0 || collinear != g.members.size()) continue;
            if (collinear > 1)
                throw Error(ErrorCode::UnsupportedChart, "several plotting areas found; only single-view charts are supported");
            g.kind = GroupKind::AxisLine;
            a.line_group = g.id;
            used.insert(g.id);
            break;
        }

        // Grid: long lines orthogonal to the axis at the tick positions.
        for (auto& g : groups) {
            if (used.count(g.id) || g.element_kind != ElementKind::Line || g.members.size() != ticks.size()) continue;
            std::vector<ElementId> sorted = g.members;
            std::stable_sort(sorted.begin(), sorted.end(), [&](auto x, auto y) {
                return along(base_box(source, x), axis) < along(base_box(source, y), axis);
            });
            bool ok = true;
            for (std::size_t k = 0; k < sorted.size() && ok; ++k) {
                const Rect2D& b = base_box(source, sorted[k]);
                const bool across = axis == AxisId::X ? (b.width() < 0.5 && b.height() > kTickMaxLength)
                                                      : (b.height() < 0.5 && b.width() > kTickMaxLength);
                ok = across && std::abs(along(b, axis) - tick_pos[k]) <= kCollinear;
            }
            if (!ok) continue;
            g.members = sorted;
            g.kind = GroupKind::Grid;
            a.grid_group = g.id;
            used.insert(g.id);
            break;
        }

        a.original_tick_count = a.tick_count = ticks.size();
        out.push_back(std::move(a));
    }
    for (auto axis : {AxisId::X, AxisId::Y}) {
        if (std::count_if(out.begin(), out.end(), [&](const AxisAssembly& a) { return a.axis == axis; }) > 1)
            throw Error(ErrorCode::UnsupportedChart, "several plotting areas found; only single-view charts are supported");
    }
    return out;
}

std::optional<LayoutDependency> infer_reactive_geometry(const SpecSource& source, const std::vector<VisualGroup>& groups,
                                                        std::size_t group, const std::vector<std::size_t>& candidates) {
    const VisualGroup& g = groups[group];
    std::vector<Rect2D> mine;
    for (auto id : g.members) mine.push_back(base_box(source, id));

    std::optional<LayoutDependency> best;
    double best_var = 0, best_abs = 0;
    for (auto c : candidates) {
        if (c == group) continue;
        const VisualGroup& a = groups[c];
        std::vector<Rect2D> theirs;
        for (auto id : a.members) theirs.push_back(base_box(source, id));
        const bool per_member = a.members.size() == g.members.size();

        std::vector<std::vector<std::size_t>> pairings;
        std::vector<Rect2D> own_boxes;
        if (per_member) {
            pairings = candidate_pairings(mine, theirs);
            own_boxes = mine;
        } else {
            pairings = {{0}};
            own_boxes = {union_box(source, g.members)};
            theirs = {union_box(source, a.members)};
        }
        for (const auto& pairing : pairings) {
            std::vector<Rect2D> matched;
            for (auto j : pairing) matched.push_back(theirs[j]);
            const AnchorFit h = fit_axis(own_boxes, matched, true);
            const AnchorFit v = fit_axis(own_boxes, matched, false);
            const double var = h.var + v.var;
            const double abs_sum = std::abs(h.mean) + std::abs(v.mean);
            const double residual = std::sqrt(std::max(h.var, v.var));
            if (residual > kAnchorResidual) continue;
            const bool better = !best || var < best_var - kTie || (var <= best_var + kTie && abs_sum < best_abs - kTie);
            if (!better) continue;
            LayoutDependency dep;
            dep.variant = Dependency::ReactiveGeometry;
            dep.horizontal = Anchor{h.self, h.target, h.mean, c};
            dep.vertical = Anchor{v.self, v.target, v.mean, c};
            dep.per_member = per_member;
            if (per_member) {
                dep.pairing = pairing;
                for (std::size_t i = 0; i < pairing.size(); ++i)
                    dep.nudges.push_back({h.offsets[i] - h.mean, v.offsets[i] - v.mean});
            }
            dep.residual = residual;
            dep.original_horizontal = dep.horizontal;
            dep.original_vertical = dep.vertical;
            best = std::move(dep);
            best_var = var;
            best_abs = abs_sum;
        }
    }
    return best;
}

DeclarativeSpec build_spec(const svg::Document& doc, const DeconstructOptions& options) {
    auto src = std::make_shared<SpecSource>();
    src->document = doc;
    src->slot.assign(doc.size(), std::nullopt);
    for (auto id : doc.visible_leaves()) {
        const Rect2D box = svg::compute_bbox(doc, id, options.metrics);
        const auto& e = doc.at(id);
        if (box.empty()) {
            src->document.diagnostics.push_back({"MissingGeometry: <" + e.tag + "> " + e.xml_id() + " has no computable bounds"});
            continue;
        }
        ElementGeometry geo;
        geo.element = id;
        geo.kind = e.kind;
        geo.base = box;
        geo.transform = e.transform;
        if (e.kind == ElementKind::Text) {
            geo.text = svg::text_layout_input(e);
            geo.lines = e.lines;
            geo.local_font = e.font_size();
            geo.font_scale = std::sqrt(std::abs(e.transform.determinant()));
        }
        src->slot[id] = src->geometry.size();
        src->geometry.push_back(std::move(geo));
    }

    std::vector<VisualGroup> groups = detect_groups(*src);
    std::vector<AxisAssembly> axes = detect_axes(*src, groups);
    std::vector<bool> assigned(groups.size(), false);
    for (const auto& a : axes)
        for (auto g : {a.tick_group, a.label_group, a.line_group, a.grid_group})
            if (g) {
                assigned[*g] = true;
                groups[*g].axis = a.axis;
            }

    DeclarativeSpec spec;
    spec.viewport = options.viewport;
    spec.metrics = options.metrics;
    std::optional<Scale> xs, ys;
    for (auto& a : axes) {
        std::vector<std::string> labels;
        std::vector<double> pos;
        const auto& ticks = groups[*a.tick_group].members;
        const auto& texts = groups[*a.label_group].members;
        for (std::size_t k = 0; k < ticks.size(); ++k) {
            labels.push_back(element_text(doc.at(texts[k])));
            pos.push_back(along(base_box(*src, ticks[k]), a.axis));
            a.comma_labels |= labels.back().find(',') != std::string::npos;
        }
        Scale s = infer_scale(labels, pos);
        for (std::size_t k = 0; k < labels.size(); ++k)
            a.tick_values.push_back(s.variant == Scale::Variant::Linear ? *parse_label_number(labels[k])
                                                                        : static_cast<double>(k));
        (a.axis == AxisId::X ? xs : ys) = std::move(s);
    }

    // Marks: shape groups inside the plotting area.
    std::vector<std::size_t> shape_groups, text_groups;
    for (const auto& g : groups) {
        if (assigned[g.id]) continue;
        (g.element_kind == ElementKind::Text ? text_groups : shape_groups).push_back(g.id);
    }
    std::vector<std::size_t> marks, off_plot;
    std::set<std::size_t> background;
    auto centre_inside = [&](const VisualGroup& g, const Rect2D& plot) {
        std::size_t inside = 0;
        for (auto id : g.members) {
            const Rect2D& b = base_box(*src, id);
            inside += b.x_center() >= plot.x_min - 1 && b.x_center() <= plot.x_max + 1 && b.y_center() >= plot.y_min - 1 &&
                      b.y_center() <= plot.y_max + 1;
        }
        return 2 * inside >= g.members.size();
    };
    Rect2D plot;
    if (xs && ys) {
        plot = {xs->range_min, ys->range_min, xs->range_max, ys->range_max};
    } else {
        // Largest shape group defines the plotting area on missing axes.
        std::optional<std::size_t> largest;
        for (auto id : shape_groups) {
            const auto& g = groups[id];
            if (!largest || g.members.size() > groups[*largest].members.size() ||
                (g.members.size() == groups[*largest].members.size() &&
                 union_box(*src, g.members).area() > union_box(*src, groups[*largest].members).area()))
                largest = id;
        }
        if (!largest) throw Error(ErrorCode::UnsupportedChart, "no marks found");
        const Rect2D mb = union_box(*src, groups[*largest].members);
        plot = mb;
        if (xs) plot.x_min = xs->range_min, plot.x_max = xs->range_max;
        if (ys) plot.y_min = ys->range_min, plot.y_max = ys->range_max;
        auto identity = [](double lo, double hi) {
            Scale s;
            s.domain_min = s.range_min = lo;
            s.domain_max = s.range_max = hi > lo ? hi : lo + 1;
            return s;
        };
        if (!xs) xs = identity(plot.x_min, plot.x_max);
        if (!ys) ys = identity(plot.y_min, plot.y_max);
        spec.axis_less = axes.empty();
    }
    for (auto id : shape_groups) {
        const auto& g = groups[id];
        const Rect2D b = union_box(*src, g.members);
        if (g.members.size() == 1 && g.element_kind == ElementKind::Rect &&
            intersection_area(b, plot) >= kBackgroundCover * plot.area()) {
            background.insert(id);
            continue;
        }
        (centre_inside(g, plot) ? marks : off_plot).push_back(id);
    }
    if (marks.empty()) throw Error(ErrorCode::UnsupportedChart, "no marks found");
    for (auto id : marks) {
        groups[id].kind = GroupKind::Shape;
        assigned[id] = true;
    }

    // Legend: off-plot shapes paired one-to-one with nearby texts.
    for (auto sid : off_plot) {
        const auto& sg = groups[sid];
        for (auto tid : text_groups) {
            if (assigned[tid] || groups[tid].members.size() != sg.members.size()) continue;
            bool ok = true;
            for (std::size_t k = 0; k < sg.members.size() && ok; ++k) {
                const Rect2D& a = base_box(*src, sg.members[k]);
                const Rect2D& b = base_box(*src, groups[tid].members[k]);
                ok = std::hypot(a.x_center() - b.x_center(), a.y_center() - b.y_center()) <= kLegendPairDistance;
            }
            if (!ok) continue;
            groups[sid].kind = GroupKind::LegendShape;
            groups[tid].kind = GroupKind::LegendText;
            assigned[sid] = assigned[tid] = true;
            break;
        }
    }

    // Value labels: a text group anchored one-to-one to a mark group.
    for (auto tid : text_groups) {
        if (assigned[tid]) continue;
        if (groups[tid].members.size() < 2) continue;
        std::vector<std::size_t> cands;
        for (auto m : marks)
            if (groups[m].members.size() == groups[tid].members.size()) cands.push_back(m);
        if (cands.empty()) continue;
        if (infer_reactive_geometry(*src, groups, tid, cands)) {
            groups[tid].kind = GroupKind::LabelText;
            assigned[tid] = true;
        }
    }

    // Remaining texts: above the plot is a title, anything else an axis title.
    for (auto tid : text_groups) {
        if (assigned[tid]) continue;
        const Rect2D b = union_box(*src, groups[tid].members);
        assigned[tid] = true;
        if (b.y_max <= plot.y_min) {
            groups[tid].kind = GroupKind::TitleText;
            continue;
        }
        groups[tid].kind = GroupKind::AxisTitle;
        const AxisId axis = (b.y_min >= plot.y_max || b.y_max <= plot.y_min) ? AxisId::X : AxisId::Y;
        groups[tid].axis = axis;
        for (auto& a : axes)
            if (a.axis == axis && !a.title_group) a.title_group = tid;
    }

    // Keep classified groups only; renumber.
    std::vector<std::optional<std::size_t>> remap(groups.size());
    std::vector<VisualGroup> kept;
    for (auto& g : groups) {
        if (!assigned[g.id] || background.count(g.id)) {
            for (auto id : g.members) spec.unclassified.push_back(id);
            continue;
        }
        remap[g.id] = kept.size();
        g.id = kept.size();
        g.cls = class_of(g.kind);
        kept.push_back(std::move(g));
    }
    for (auto& a : axes) {
        for (auto* slot : {&a.tick_group, &a.label_group, &a.line_group, &a.grid_group, &a.title_group})
            if (*slot) *slot = remap[**slot];
    }
    std::sort(spec.unclassified.begin(), spec.unclassified.end());

    // Layout dependencies.
    auto ids_of = [&](GroupKind k) {
        std::vector<std::size_t> out;
        for (const auto& g : kept)
            if (g.kind == k) out.push_back(g.id);
        return out;
    };
    const auto lines = ids_of(GroupKind::AxisLine);
    for (auto kind : {GroupKind::LegendShape, GroupKind::TitleText, GroupKind::AxisTitle, GroupKind::AxisLabel,
                      GroupKind::LabelText, GroupKind::LegendText}) {
        for (auto& g : kept) {
            if (g.kind != kind) continue;
            std::vector<std::size_t> cands;
            switch (kind) {
                case GroupKind::AxisLabel:
                    for (const auto& a : axes)
                        if (a.label_group == g.id) cands.push_back(*a.tick_group);
                    break;
                case GroupKind::LabelText:
                    for (auto m : ids_of(GroupKind::Shape))
                        if (kept[m].members.size() == g.members.size()) cands.push_back(m);
                    break;
                case GroupKind::LegendText:
                    for (auto m : ids_of(GroupKind::LegendShape))
                        if (kept[m].members.size() == g.members.size()) cands.push_back(m);
                    break;
                default: cands = lines; break;
            }
            if (auto dep = infer_reactive_geometry(*src, kept, g.id, cands)) g.layout = std::move(*dep);
            if (kind == GroupKind::LegendShape && g.members.size() >= 2) {
                const Rect2D first = base_box(*src, g.members.front());
                const Rect2D b = union_box(*src, g.members);
                (void)first;
                LocalScale ls;
                ls.axis = b.width() >= b.height() ? AxisId::X : AxisId::Y;
                double lo = 1e300, hi = -1e300;
                for (auto id : g.members) {
                    lo = std::min(lo, along(base_box(*src, id), ls.axis));
                    hi = std::max(hi, along(base_box(*src, id), ls.axis));
                }
                ls.original_min = ls.range_min = lo;
                ls.original_max = ls.range_max = hi;
                g.layout.local = ls;
            }
        }
    }

    // Fonts, scale mode, member state.
    for (auto& g : kept) {
        g.member_state.assign(g.members.size(), MemberState{});
        if (g.element_kind == ElementKind::Text) {
            const auto& geo = src->geometry[*src->slot[g.members.front()]];
            g.font_size = g.original_font_size = geo.local_font * geo.font_scale;
        }
        if (g.layout.variant != Dependency::GlobalScale) continue;
        const bool stretch = g.kind != GroupKind::AxisTick &&
                             (g.element_kind == ElementKind::Rect || g.element_kind == ElementKind::Path ||
                              g.element_kind == ElementKind::Line);
        for (auto id : g.members) {
            auto& geo = src->geometry[*src->slot[id]];
            geo.scale_mode = stretch && geo.transform.axis_aligned();
        }
    }

    // Render order: global groups, then dependents after their anchors.
    std::vector<bool> placed(kept.size(), false);
    for (const auto& g : kept)
        if (g.layout.variant == Dependency::GlobalScale) {
            spec.render_order.push_back(g.id);
            placed[g.id] = true;
        }
    for (bool progress = true; progress;) {
        progress = false;
        for (const auto& g : kept) {
            if (placed[g.id]) continue;
            const auto& h = g.layout.horizontal;
            if (h && !placed[h->anchor_group]) continue;
            spec.render_order.push_back(g.id);
            placed[g.id] = true;
            progress = true;
        }
    }
    if (spec.render_order.size() != kept.size()) throw Error(ErrorCode::CyclicDependency, "group anchors form a cycle");

    spec.x_scale = spec.original_x_scale = *xs;
    spec.y_scale = spec.original_y_scale = *ys;
    spec.groups = std::move(kept);
    spec.axes = std::move(axes);
    spec.source = std::move(src);
    return spec;
}

DeclarativeSpec build_spec_from_svg(std::string_view bytes, const DeconstructOptions& options) {
    return build_spec(svg::parse_svg(bytes), options);
}

nlohmann::json spec_to_json(const DeclarativeSpec& spec) {
    using nlohmann::json;
    const auto& doc = spec.source->document;
    auto id_of = [&](ElementId id) -> json {
        if (id >= doc.size()) return "synthetic-" + std::to_string(id - doc.size());
        const auto x = doc.at(id).xml_id();
        return x.empty() ? json(id) : json(x);
    };
    auto scale_json = [](const Scale& s) {
        json j{{"variant", to_string(s.variant)}, {"range", {s.range_min, s.range_max}}, {"inverted", s.inverted}};
        if (s.variant == Scale::Variant::Linear) j["domain"] = {s.domain_min, s.domain_max};
        else j["categories"] = s.categories;
        return j;
    };
    auto anchor_json = [](const std::optional<Anchor>& a) -> json {
        if (!a) return nullptr;
        return {{"self", to_string(a->self)}, {"target", to_string(a->target)}, {"offset", a->offset},
                {"anchor_group", a->anchor_group}};
    };
    json groups = json::array();
    for (const auto& g : spec.groups) {
        json members = json::array();
        for (auto id : g.members) members.push_back(id_of(id));
        json sig = json::array();
        for (const auto& s : g.signature) sig.push_back({{"key", s.key}, {"shared", s.shared}});
        json layout{{"variant", to_string(g.layout.variant)}};
        if (g.layout.variant == Dependency::ReactiveGeometry) {
            layout["horizontal"] = anchor_json(g.layout.horizontal);
            layout["vertical"] = anchor_json(g.layout.vertical);
            layout["per_member"] = g.layout.per_member;
            layout["residual"] = g.layout.residual;
        }
        if (g.layout.local) {
            const auto& l = *g.layout.local;
            layout["local_scale"] = {{"axis", to_string(l.axis)}, {"range", {l.range_min, l.range_max}}};
        }
        json jg{{"id", g.id},
                {"kind", to_string(g.kind)},
                {"class", to_string(g.cls)},
                {"element_kind", svg::to_string(g.element_kind)},
                {"members", members},
                {"signature", sig},
                {"layout", layout}};
        if (g.font_size) jg["font_size"] = *g.font_size;
        std::size_t hidden = 0;
        for (const auto& m : g.member_state) hidden += m.hidden;
        if (hidden) jg["hidden_members"] = hidden;
        groups.push_back(std::move(jg));
    }
    json axes = json::array();
    for (const auto& a : spec.axes) {
        json ja{{"axis", to_string(a.axis)}, {"tick_count", a.tick_count}, {"original_tick_count", a.original_tick_count}};
        auto opt = [](const std::optional<std::size_t>& v) -> json { return v ? json(*v) : json(nullptr); };
        ja["line_group"] = opt(a.line_group);
        ja["tick_group"] = opt(a.tick_group);
        ja["label_group"] = opt(a.label_group);
        ja["grid_group"] = opt(a.grid_group);
        ja["title_group"] = opt(a.title_group);
        axes.push_back(std::move(ja));
    }
    json unclassified = json::array();
    for (auto id : spec.unclassified) unclassified.push_back(id_of(id));
    json diags = json::array();
    for (const auto& d : doc.diagnostics) diags.push_back(d.message);
    return {{"format_version", DeclarativeSpec::kFormatVersion},
            {"viewport", {{"width", spec.viewport.width}, {"height", spec.viewport.height}}},
            {"axis_less", spec.axis_less},
            {"scales", {{"x", scale_json(spec.x_scale)}, {"y", scale_json(spec.y_scale)}}},
            {"groups", groups},
            {"axes", axes},
            {"unclassified", unclassified},
            {"diagnostics", diags}};
}

}  // namespace chartfix
