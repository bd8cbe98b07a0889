#include "chartfix/layout.hpp"

#include <cmath>

#include "chartfix/css.hpp"
#include "chartfix/error.hpp"
#include "chartfix/path.hpp"

namespace chartfix {

namespace {

using svg::ElementKind;

constexpr double kEps = 1e-9;

Rect2D raw_box(const DeclarativeSpec& spec, const ElementGeometry& geo, const Placement& p) {
    if (geo.kind == ElementKind::Text && p.lines) {
        if (p.lines->empty()) return {};
        return geo.transform.map_rect(svg::text_local_box(geo.text, p.local_font, *p.lines, spec.metrics)).translated(geo.shift);
    }
    return geo.base.translated(geo.shift);
}

Rect2D map_box(const Rect2D& r, const AxisMap& mx, const AxisMap& my) {
    if (r.empty()) return r;
    const double x0 = mx(r.x_min), x1 = mx(r.x_max), y0 = my(r.y_min), y1 = my(r.y_max);
    return {std::min(x0, x1), std::min(y0, y1), std::max(x0, x1), std::max(y0, y1)};
}

Vec2 global_shift(const Rect2D& r, const AxisMap& mx, const AxisMap& my) {
    return {mx(r.x_center()) - r.x_center(), my(r.y_center()) - r.y_center()};
}

}  // namespace

double band_step(const Scale& s) {
    if (s.variant == Scale::Variant::Discrete && !s.categories.empty())
        return s.width() / static_cast<double>(s.categories.size());
    return s.width();
}

Layout compute_layout(const DeclarativeSpec& spec) {
    Layout out;
    out.slots.resize(spec.slot_count());
    const AxisMap mx = AxisMap::between(spec.original_x_scale.range_min, spec.original_x_scale.range_max,
                                        spec.x_scale.range_min, spec.x_scale.range_max);
    const AxisMap my = AxisMap::between(spec.original_y_scale.range_min, spec.original_y_scale.range_max,
                                        spec.y_scale.range_min, spec.y_scale.range_max);
    std::vector<bool> done(spec.groups.size(), false);

    for (auto gid : spec.render_order) {
        const VisualGroup& g = spec.groups.at(gid);
        const LayoutDependency& dep = g.layout;
        const std::size_t n = g.members.size();
        std::vector<std::size_t> slots(n);
        std::vector<Rect2D> raw(n);
        std::vector<Vec2> local(n);  // LocalScale delta per member

        for (std::size_t i = 0; i < n; ++i) {
            slots[i] = spec.slot_of(g.members[i]);
            const ElementGeometry& geo = spec.slot_geometry(slots[i]);
            Placement& p = out.slots[slots[i]];
            const MemberState* ms = i < g.member_state.size() ? &g.member_state[i] : nullptr;
            p.hidden = ms && ms->hidden;
            if (geo.kind == ElementKind::Text) {
                p.lines = ms && ms->lines ? &*ms->lines : &geo.lines;
                p.local_font = g.font_size ? *g.font_size / geo.font_scale : geo.local_font;
            }
            raw[i] = raw_box(spec, geo, p);
        }

        if (dep.local) {
            const LocalScale& ls = *dep.local;
            const AxisMap m = AxisMap::between(ls.original_min, ls.original_max, ls.range_min, ls.range_max);
            for (std::size_t i = 0; i < n; ++i) {
                if (raw[i].empty()) continue;
                const double c = ls.axis == AxisId::X ? raw[i].x_center() : raw[i].y_center();
                (ls.axis == AxisId::X ? local[i].x : local[i].y) = m(c) - c;
            }
        }

        auto anchor_done = [&](const std::optional<Anchor>& a) {
            if (a && !done.at(a->anchor_group))
                throw Error(ErrorCode::CyclicDependency, "group " + std::to_string(gid) + " is rendered before its anchor");
        };

        if (dep.variant != Dependency::ReactiveGeometry) {
            for (std::size_t i = 0; i < n; ++i) {
                Placement& p = out.slots[slots[i]];
                const ElementGeometry& geo = spec.slot_geometry(slots[i]);
                if (geo.scale_mode) {
                    p.mx = mx;
                    p.my = my;
                    p.d = local[i];
                    p.box = map_box(raw[i], mx, my).translated(local[i]);
                } else {
                    const Rect2D r = raw[i].translated(local[i]);
                    p.d = local[i] + global_shift(r, mx, my);
                    p.box = raw[i].translated(p.d);
                }
            }
        } else {
            anchor_done(dep.horizontal);
            anchor_done(dep.vertical);
            auto anchor_members = [&](const std::optional<Anchor>& a) -> const VisualGroup* {
                return a ? &spec.groups.at(a->anchor_group) : nullptr;
            };
            const VisualGroup* ha = anchor_members(dep.horizontal);
            const VisualGroup* va = anchor_members(dep.vertical);

            if (!dep.per_member) {
                Rect2D u;
                for (std::size_t i = 0; i < n; ++i) u = u.united(raw[i].translated(local[i]));
                auto anchor_union = [&](const VisualGroup* a) {
                    Rect2D r;
                    if (!a) return r;
                    for (auto id : a->members) {
                        const Placement& q = out.slots[spec.slot_of(id)];
                        if (!q.hidden) r = r.united(q.box);
                    }
                    return r;
                };
                const Rect2D ah = anchor_union(ha), av = anchor_union(va);
                const Vec2 fallback = global_shift(u, mx, my);
                Vec2 d = fallback;
                if (dep.horizontal && !ah.empty() && !u.empty())
                    d.x = position_of(ah, dep.horizontal->target) + dep.horizontal->offset - position_of(u, dep.horizontal->self);
                if (dep.vertical && !av.empty() && !u.empty())
                    d.y = position_of(av, dep.vertical->target) + dep.vertical->offset - position_of(u, dep.vertical->self);
                for (std::size_t i = 0; i < n; ++i) {
                    Placement& p = out.slots[slots[i]];
                    p.d = local[i] + d;
                    p.box = raw[i].translated(p.d);
                }
            } else {
                for (std::size_t i = 0; i < n; ++i) {
                    Placement& p = out.slots[slots[i]];
                    const Rect2D r = raw[i].translated(local[i]);
                    const MemberState* ms = i < g.member_state.size() ? &g.member_state[i] : nullptr;
                    std::optional<Anchor> h = dep.horizontal, v = dep.vertical;
                    Vec2 nudge = i < dep.nudges.size() ? dep.nudges[i] : Vec2{};
                    if (ms && ms->placement) {
                        h = ms->placement->first;
                        v = ms->placement->second;
                        nudge = {};
                    }
                    const std::size_t j = i < dep.pairing.size() ? dep.pairing[i] : i;
                    auto target_box = [&](const VisualGroup* a) -> Rect2D {
                        if (!a || j >= a->members.size()) return {};
                        return out.slots[spec.slot_of(a->members[j])].box;
                    };
                    Vec2 d = global_shift(r, mx, my);
                    const Rect2D th = target_box(ha), tv = target_box(va);
                    if (h && !th.empty() && !r.empty())
                        d.x = position_of(th, h->target) + h->offset + nudge.x - position_of(r, h->self);
                    if (v && !tv.empty() && !r.empty())
                        d.y = position_of(tv, v->target) + v->offset + nudge.y - position_of(r, v->self);
                    p.d = local[i] + d;
                    p.box = raw[i].translated(p.d);
                }
            }
        }
        done[gid] = true;
    }
    return out;
}

namespace {

void set_style_property(svg::Element& e, const std::string& name, const std::string& value) {
    css::StyleMap style;
    if (const auto* s = e.attribute("style")) style = css::parse_declarations(*s);
    style[name] = value;
    e.set_attribute("style", css::format_declarations(style));
}

/// Apply f to every number of a whitespace/comma separated list attribute.
template <class F>
bool map_list(std::vector<svg::Attribute>& attrs, std::string_view name, F f) {
    for (auto& [k, v] : attrs) {
        if (k != name) continue;
        std::string out;
        std::size_t i = 0;
        while (i < v.size()) {
            while (i < v.size() && (v[i] == ' ' || v[i] == ',' || v[i] == '\t' || v[i] == '\n')) ++i;
            if (i >= v.size()) break;
            std::size_t j = i;
            while (j < v.size() && v[j] != ' ' && v[j] != ',' && v[j] != '\t' && v[j] != '\n') ++j;
            const auto num = svg::parse_number(std::string_view(v).substr(i, j - i));
            if (!num) return false;
            if (!out.empty()) out.push_back(' ');
            out += svg::format_number(f(*num));
            i = j;
        }
        v = out;
        return true;
    }
    return false;
}

bool map_attr(svg::Element& e, std::string_view name, double fallback, const AxisMap& m, bool required) {
    const auto* v = e.attribute(name);
    if (!v) {
        if (!required) return true;
        e.set_attribute(name, svg::format_number(m(fallback)));
        return true;
    }
    const auto num = svg::parse_number(*v);
    if (!num) return false;
    e.set_attribute(name, svg::format_number(m(*num)));
    return true;
}

/// Move the element's own geometry by u in its local frame.
bool translate_local(svg::Element& e, Vec2 u) {
    const AxisMap tx{1.0, u.x}, ty{1.0, u.y};
    switch (e.kind) {
        case ElementKind::Text: {
            bool ok = true;
            if (e.attribute("x")) ok &= map_list(e.attributes, "x", tx);
            else e.set_attribute("x", svg::format_number(u.x));
            if (e.attribute("y")) ok &= map_list(e.attributes, "y", ty);
            else e.set_attribute("y", svg::format_number(u.y));
            for (auto& r : e.runs) {
                map_list(r.attributes, "x", tx);
                map_list(r.attributes, "y", ty);
            }
            return ok;
        }
        case ElementKind::Circle:
        case ElementKind::Ellipse:
            return map_attr(e, "cx", 0, tx, true) && map_attr(e, "cy", 0, ty, true);
        case ElementKind::Line:
            return map_attr(e, "x1", 0, tx, true) && map_attr(e, "y1", 0, ty, true) && map_attr(e, "x2", 0, tx, true) &&
                   map_attr(e, "y2", 0, ty, true);
        case ElementKind::Path: {
            if (e.tag == "path") {
                const auto* d = e.attribute("d");
                if (!d) return false;
                const auto cmds = svg::parse_path(*d);
                if (!cmds) return false;
                e.set_attribute("d", svg::format_path(svg::map_path(*cmds, tx, ty)));
                return true;
            }
            const auto* p = e.attribute("points");
            if (!p) return false;
            auto pts = svg::parse_points(*p);
            for (auto& q : pts) q = q + u;
            e.set_attribute("points", svg::format_points(pts));
            return true;
        }
        default:
            return map_attr(e, "x", 0, tx, true) && map_attr(e, "y", 0, ty, true);
    }
}

/// Stretch the element's own geometry with per-axis local maps.
bool scale_local(svg::Element& e, const AxisMap& lx, const AxisMap& ly) {
    switch (e.kind) {
        case ElementKind::Rect: {
            const auto* w = e.attribute("width");
            const auto* h = e.attribute("height");
            const auto wv = w ? svg::parse_number(*w) : std::nullopt;
            const auto hv = h ? svg::parse_number(*h) : std::nullopt;
            if (!wv || !hv) return false;
            const double x = e.attribute("x") ? svg::parse_number(*e.attribute("x")).value_or(NAN) : 0.0;
            const double y = e.attribute("y") ? svg::parse_number(*e.attribute("y")).value_or(NAN) : 0.0;
            if (std::isnan(x) || std::isnan(y)) return false;
            const double x0 = lx(x), x1 = lx(x + *wv), y0 = ly(y), y1 = ly(y + *hv);
            e.set_attribute("x", svg::format_number(std::min(x0, x1)));
            e.set_attribute("y", svg::format_number(std::min(y0, y1)));
            e.set_attribute("width", svg::format_number(std::abs(x1 - x0)));
            e.set_attribute("height", svg::format_number(std::abs(y1 - y0)));
            return true;
        }
        case ElementKind::Line:
            return map_attr(e, "x1", 0, lx, true) && map_attr(e, "y1", 0, ly, true) && map_attr(e, "x2", 0, lx, true) &&
                   map_attr(e, "y2", 0, ly, true);
        case ElementKind::Path: {
            if (e.tag == "path") {
                const auto* d = e.attribute("d");
                if (!d) return false;
                const auto cmds = svg::parse_path(*d);
                if (!cmds) return false;
                e.set_attribute("d", svg::format_path(svg::map_path(*cmds, lx, ly)));
                return true;
            }
            const auto* p = e.attribute("points");
            if (!p) return false;
            auto pts = svg::parse_points(*p);
            for (auto& q : pts) q = {lx(q.x), ly(q.y)};
            e.set_attribute("points", svg::format_points(pts));
            return true;
        }
        default: return false;
    }
}

void prefix_translate(svg::Document& doc, svg::Element& e, Vec2 d) {
    Affine parent;
    if (e.parent) parent = doc.at(*e.parent).transform;
    const auto inv = parent.inverse().value_or(Affine{});
    const Vec2 u = inv.apply_linear(d);
    std::string t = "translate(" + svg::format_number(u.x) + "," + svg::format_number(u.y) + ")";
    if (const auto* own = e.attribute("transform")) t += " " + *own;
    e.set_attribute("transform", t);
}

void set_lines(svg::Element& e, const std::vector<std::string>& lines, const svg::TextLayoutInput& in) {
    e.text.clear();
    e.runs.clear();
    if (lines.size() == 1) {
        e.text = lines.front();
        return;
    }
    const std::string x = e.attribute("x") ? svg::format_number(in.x) : "0";
    for (std::size_t k = 0; k < lines.size(); ++k) {
        svg::TextRun run;
        run.attributes.emplace_back("x", x);
        if (k > 0) run.attributes.emplace_back("dy", "1.2em");
        run.text = lines[k];
        e.runs.push_back(std::move(run));
    }
}

}  // namespace

svg::Document render_spec(const DeclarativeSpec& spec) { return render_spec(spec, compute_layout(spec)); }

svg::Document render_spec(const DeclarativeSpec& spec, const Layout& layout) {
    svg::Document doc = spec.source->document;
    for (std::size_t k = 0; k < spec.synthetic.size(); ++k) {
        const auto& geo = spec.synthetic[k];
        const auto id = doc.clone_after(geo.element);
        const std::string base = doc.at(geo.element).xml_id();
        doc.at(id).set_attribute("id", (base.empty() ? "tick" : base) + "-r" + std::to_string(k));
    }
    const std::size_t n_doc = spec.source->document.size();
    const std::size_t n_geo = spec.source->geometry.size();

    for (std::size_t slot = 0; slot < layout.slots.size(); ++slot) {
        const Placement& p = layout.slots[slot];
        const ElementGeometry& geo = spec.slot_geometry(slot);
        const svg::ElementId id = slot < n_geo ? geo.element : n_doc + (slot - n_geo);
        svg::Element& e = doc.at(id);
        const bool font_changed = geo.kind == ElementKind::Text && std::abs(p.local_font - geo.local_font) > kEps;
        const bool lines_changed = geo.kind == ElementKind::Text && p.lines && *p.lines != spec.source->document.at(geo.element).lines;
        const Vec2 t = geo.shift + p.d;
        const bool moved = std::abs(t.x) > kEps || std::abs(t.y) > kEps;
        const bool scaled = geo.scale_mode && !(p.mx.is_identity() && p.my.is_identity());
        if (!geo.synthetic && !p.hidden && !font_changed && !lines_changed && !moved && !scaled) continue;

        if (p.hidden) {
            set_style_property(e, "display", "none");
            continue;
        }
        if (font_changed) set_style_property(e, "font-size", svg::format_number(p.local_font) + "px");
        if (geo.kind == ElementKind::Text && p.lines && (lines_changed || geo.synthetic)) set_lines(e, *p.lines, geo.text);

        bool ok = true;
        if (scaled) {
            const Affine& T = geo.transform;
            const AxisMap lx{p.mx.scale, (p.mx.scale * (T.e + geo.shift.x) + p.mx.offset + p.d.x - T.e) / T.a};
            const AxisMap ly{p.my.scale, (p.my.scale * (T.f + geo.shift.y) + p.my.offset + p.d.y - T.f) / T.d};
            ok = scale_local(e, lx, ly);
        } else if (moved) {
            const auto inv = geo.transform.inverse();
            ok = inv && translate_local(e, inv->apply_linear(t));
            if (!ok) prefix_translate(doc, e, t);
            ok = true;
        }
        if (!ok && moved) prefix_translate(doc, e, t);
    }
    doc.resolve();
    return doc;
}

}  // namespace chartfix
