#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "chartfix/error.hpp"
#include "chartfix/svg.hpp"

namespace chartfix {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::MalformedDocument: return "MalformedDocument";
        case ErrorCode::UnsupportedFeature: return "UnsupportedFeature";
        case ErrorCode::MissingGeometry: return "MissingGeometry";
        case ErrorCode::EmptyDocument: return "EmptyDocument";
        case ErrorCode::DegenerateScale: return "DegenerateScale";
        case ErrorCode::NoAnchorFound: return "NoAnchorFound";
        case ErrorCode::UnsupportedChart: return "UnsupportedChart";
        case ErrorCode::CyclicDependency: return "CyclicDependency";
        case ErrorCode::InvalidActionId: return "InvalidActionId";
        case ErrorCode::InvalidRecipe: return "InvalidRecipe";
        case ErrorCode::EmptyCorpus: return "EmptyCorpus";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace chartfix

namespace chartfix::svg {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool is_container_not_rendered(std::string_view tag) {
    return tag == "defs" || tag == "clipPath" || tag == "mask" || tag == "marker" ||
           tag == "pattern" || tag == "symbol" || tag == "linearGradient" ||
           tag == "radialGradient" || tag == "filter" || tag == "style" || tag == "title" ||
           tag == "desc" || tag == "metadata";
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    bool space = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            space = true;
            continue;
        }
        if (space && !out.empty()) out.push_back(' ');
        space = false;
        out.push_back(c);
    }
    return out;
}

double resolve_font_size(std::string_view value, double parent) {
    value = trim(value);
    if (value.empty() || value == "inherit") return parent;
    if (value == "small") return 13.0;
    if (value == "medium") return 16.0;
    if (value == "large") return 18.0;
    if (value == "x-small") return 10.0;
    if (value == "xx-small") return 9.0;
    if (value == "x-large") return 24.0;
    if (value.ends_with('%')) {
        if (auto v = parse_number(value.substr(0, value.size() - 1))) return parent * *v / 100.0;
        return parent;
    }
    if (auto v = parse_length(value, parent)) return *v;
    return parent;
}

std::vector<std::string> text_lines(const Element& e) {
    std::vector<std::string> lines;
    std::string current = collapse_whitespace(e.text);
    for (std::size_t i = 0; i < e.runs.size(); ++i) {
        const auto& run = e.runs[i];
        bool new_line = false;
        for (const auto& [k, v] : run.attributes) {
            if (k == "x") new_line = true;
            if (k == "dy") {
                const auto n = parse_length(v, 1.0);
                if (n && *n != 0.0) new_line = true;
            }
        }
        const std::string t = collapse_whitespace(run.text);
        if (new_line && !current.empty()) {
            lines.push_back(std::move(current));
            current.clear();
        }
        if (!current.empty() && !t.empty()) current.push_back(' ');
        current += t;
    }
    if (!current.empty()) lines.push_back(std::move(current));
    return lines;
}

// Absolute lengths only; percentages have no reference here.
std::optional<double> attribute_length(const Element& e, std::string_view name) {
    const auto* v = e.attribute(name);
    if (!v || v->find('%') != std::string::npos) return std::nullopt;
    return parse_length(*v, 16.0);
}

std::optional<Rect2D> parse_viewbox(const Element& e) {
    const auto* v = e.attribute("viewBox");
    if (!v) return std::nullopt;
    std::vector<double> nums;
    std::string token;
    for (char c : *v + " ") {
        if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
            if (!token.empty()) {
                auto n = parse_number(token);
                if (!n) return std::nullopt;
                nums.push_back(*n);
                token.clear();
            }
        } else {
            token.push_back(c);
        }
    }
    if (nums.size() != 4 || nums[2] <= 0 || nums[3] <= 0) return std::nullopt;
    return Rect2D::from_xywh(nums[0], nums[1], nums[2], nums[3]);
}

}  // namespace

std::string_view to_string(ElementKind kind) {
    switch (kind) {
        case ElementKind::Text: return "Text";
        case ElementKind::Rect: return "Rect";
        case ElementKind::Circle: return "Circle";
        case ElementKind::Ellipse: return "Ellipse";
        case ElementKind::Line: return "Line";
        case ElementKind::Path: return "Path";
        case ElementKind::Group: return "Group";
        case ElementKind::Other: return "Other";
    }
    return "Other";
}

const std::string* Element::attribute(std::string_view name) const {
    for (const auto& [k, v] : attributes)
        if (k == name) return &v;
    return nullptr;
}

void Element::set_attribute(std::string_view name, std::string value) {
    for (auto& [k, v] : attributes) {
        if (k == name) {
            v = std::move(value);
            return;
        }
    }
    attributes.emplace_back(std::string(name), std::move(value));
}

bool Element::erase_attribute(std::string_view name) {
    auto it = std::find_if(attributes.begin(), attributes.end(), [&](const Attribute& a) { return a.first == name; });
    if (it == attributes.end()) return false;
    attributes.erase(it);
    return true;
}

double Element::font_size() const {
    if (auto v = parse_number(style_value("font-size"))) return *v;
    return 16.0;
}

std::string_view Element::style_value(std::string_view name) const {
    auto it = style.find(name);
    return it == style.end() ? std::string_view{} : std::string_view(it->second);
}

std::string Element::xml_id() const {
    if (const auto* v = attribute("id")) return *v;
    return {};
}

bool Element::is_leaf_visual() const {
    return kind != ElementKind::Group && kind != ElementKind::Other;
}

std::optional<double> parse_number(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    if (!std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<double> parse_length(std::string_view s, double font_size, double reference) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    std::size_t end = 0;
    while (end < s.size() && (std::isdigit(static_cast<unsigned char>(s[end])) || s[end] == '.' ||
                              s[end] == '-' || s[end] == '+' || s[end] == 'e' || s[end] == 'E')) {
        // Stop at the 'e' of an "em" unit.
        if ((s[end] == 'e' || s[end] == 'E') && end + 1 < s.size() && (s[end + 1] == 'm' || s[end + 1] == 'x')) break;
        ++end;
    }
    auto num = parse_number(s.substr(0, end));
    if (!num) return std::nullopt;
    const std::string_view unit = trim(s.substr(end));
    if (unit.empty() || unit == "px") return *num;
    if (unit == "pt") return *num * 4.0 / 3.0;
    if (unit == "pc") return *num * 16.0;
    if (unit == "in") return *num * 96.0;
    if (unit == "cm") return *num * 96.0 / 2.54;
    if (unit == "mm") return *num * 96.0 / 25.4;
    if (unit == "em") return *num * font_size;
    if (unit == "ex") return *num * font_size * 0.5;
    if (unit == "%") return *num * reference / 100.0;
    return std::nullopt;
}

std::string format_number(double v) {
    if (std::abs(v) < 0.0005) return "0";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    std::string s(buf);
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    if (s == "-0") s = "0";
    return s;
}

std::optional<Affine> parse_transform(std::string_view s) {
    Affine m;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (std::isspace(static_cast<unsigned char>(s[i])) || s[i] == ',')) ++i;
        if (i >= s.size()) break;
        std::size_t j = i;
        while (j < s.size() && std::isalpha(static_cast<unsigned char>(s[j]))) ++j;
        const std::string_view name = s.substr(i, j - i);
        const auto open = s.find('(', j);
        const auto close = s.find(')', j);
        if (name.empty() || open == std::string_view::npos || close == std::string_view::npos || close < open)
            return std::nullopt;
        std::vector<double> args;
        std::string_view body = s.substr(open + 1, close - open - 1);
        std::size_t k = 0;
        while (k < body.size()) {
            while (k < body.size() && (std::isspace(static_cast<unsigned char>(body[k])) || body[k] == ',')) ++k;
            if (k >= body.size()) break;
            double v = 0.0;
            const char* b = body.data() + k;
            if (*b == '+') ++b;
            auto [ptr, ec] = std::from_chars(b, body.data() + body.size(), v);
            if (ec != std::errc()) return std::nullopt;
            args.push_back(v);
            k = static_cast<std::size_t>(ptr - body.data());
        }
        Affine t;
        if (name == "matrix" && args.size() == 6) {
            t = {args[0], args[1], args[2], args[3], args[4], args[5]};
        } else if (name == "translate" && !args.empty()) {
            t = Affine::translate(args[0], args.size() > 1 ? args[1] : 0.0);
        } else if (name == "scale" && !args.empty()) {
            t = Affine::scale(args[0], args.size() > 1 ? args[1] : args[0]);
        } else if (name == "rotate" && !args.empty()) {
            t = Affine::rotate_degrees(args[0]);
            if (args.size() == 3)
                t = Affine::translate(args[1], args[2]) * t * Affine::translate(-args[1], -args[2]);
        } else if (name == "skewX" && args.size() == 1) {
            t = {1, 0, std::tan(args[0] * std::numbers::pi / 180.0), 1, 0, 0};
        } else if (name == "skewY" && args.size() == 1) {
            t = {1, std::tan(args[0] * std::numbers::pi / 180.0), 0, 1, 0, 0};
        } else {
            return std::nullopt;
        }
        m = m * t;
        i = close + 1;
    }
    return m;
}

std::size_t utf8_length(std::string_view s) {
    std::size_t n = 0;
    for (unsigned char c : s)
        if ((c & 0xC0) != 0x80) ++n;
    return n;
}

void Document::resolve() {
    std::vector<std::string> warnings;
    stylesheet = {};
    for (const auto& e : elements)
        if (e.tag == "style") stylesheet.parse(e.text, warnings);
    auto report = [this](std::string message) {
        for (const auto& d : diagnostics)
            if (d.message == message) return;
        diagnostics.push_back({std::move(message)});
    };
    for (auto& w : warnings) report(std::move(w));

    std::vector<css::NodeInfo> chain;
    for (auto& e : elements) {
        const Element* parent = e.parent ? &elements[*e.parent] : nullptr;

        // Transform.
        Affine own;
        if (const auto* t = e.attribute("transform")) {
            if (auto m = parse_transform(*t)) own = *m;
            else report("unparseable transform on <" + e.tag + ">");
        }
        if (e.tag == "svg") {
            const double x = parent ? attribute_length(e, "x").value_or(0.0) : 0.0;
            const double y = parent ? attribute_length(e, "y").value_or(0.0) : 0.0;
            const auto viewbox = parse_viewbox(e);
            auto w = attribute_length(e, "width");
            auto h = attribute_length(e, "height");
            if (viewbox) {
                if (!w) w = viewbox->width();
                if (!h) h = viewbox->height();
                const double sx = *w / viewbox->width(), sy = *h / viewbox->height();
                const double s = std::min(sx, sy);
                const double tx = (*w - viewbox->width() * s) / 2, ty = (*h - viewbox->height() * s) / 2;
                own = Affine::translate(x + tx, y + ty) * Affine::scale(s, s) *
                      Affine::translate(-viewbox->x_min, -viewbox->y_min) * own;
            } else {
                own = Affine::translate(x, y) * own;
            }
            if (!parent) {
                canvas_width = w.value_or(0.0);
                canvas_height = h.value_or(0.0);
            }
        }
        e.transform = parent ? parent->transform * own : own;

        // Cascade: inherited parent values < presentation attributes <
        // stylesheet < inline style.
        css::StyleMap computed;
        if (parent) {
            for (const auto& [k, v] : parent->style)
                if (css::is_inherited(k)) computed[k] = v;
        } else {
            computed["font-size"] = "16";
        }
        const double parent_font = parent ? parent->font_size() : 16.0;
        css::StyleMap declared;
        for (const auto& [k, v] : e.attributes)
            if (css::is_presentation_property(k)) declared[k] = v;
        if (!stylesheet.empty()) {
            chain.clear();
            for (const Element* n = &e; n; n = n->parent ? &elements[*n->parent] : nullptr) {
                const auto* id = n->attribute("id");
                const auto* cls = n->attribute("class");
                chain.push_back({n->tag, id ? std::string_view(*id) : std::string_view{},
                                 cls ? std::string_view(*cls) : std::string_view{}});
            }
            for (auto& [k, v] : stylesheet.match(chain))
                if (css::is_presentation_property(k)) declared[k] = v;
        }
        if (const auto* inline_style = e.attribute("style")) {
            for (auto& [k, v] : css::parse_declarations(*inline_style))
                if (css::is_presentation_property(k)) declared[k] = v;
        }
        for (auto& [k, v] : declared) {
            if (v == "inherit") continue;
            computed[k] = v;
        }
        computed["font-size"] = format_number(
            declared.count("font-size") ? resolve_font_size(declared["font-size"], parent_font) : parent_font);
        e.style = std::move(computed);

        // Visibility.
        e.rendered = parent ? parent->rendered && !is_container_not_rendered(parent->tag) : true;
        if (is_container_not_rendered(e.tag)) e.rendered = false;
        bool visible = e.rendered && (!parent || parent->visible || parent->kind == ElementKind::Other);
        if (parent && !parent->visible) visible = false;
        if (e.style_value("display") == "none") visible = false;
        const auto vis = e.style_value("visibility");
        if (vis == "hidden" || vis == "collapse") visible = false;
        if (auto op = parse_number(e.style_value("opacity")); op && *op <= 0.0) visible = false;
        if (e.kind == ElementKind::Text) {
            e.lines = text_lines(e);
            if (e.lines.empty() || e.style_value("fill") == "none") visible = false;
        } else if (e.is_leaf_visual()) {
            const auto fill = e.style_value("fill");
            const auto stroke = e.style_value("stroke");
            const bool no_fill = fill == "none" || fill == "transparent";
            const bool no_stroke = stroke.empty() || stroke == "none" || stroke == "transparent";
            // Lines are never filled; default fill is black for other shapes.
            if (e.kind == ElementKind::Line ? no_stroke : (no_fill && no_stroke)) visible = false;
        }
        e.visible = visible;
    }
}

std::optional<ElementId> Document::find_by_xml_id(std::string_view id) const {
    for (const auto& e : elements) {
        const auto* v = e.attribute("id");
        if (v && *v == id) return e.id;
    }
    return std::nullopt;
}

ElementId Document::clone_after(ElementId source) {
    Element copy = elements.at(source);
    copy.id = elements.size();
    copy.children.clear();
    copy.erase_attribute("id");
    if (copy.parent) {
        auto& siblings = elements[*copy.parent].children;
        auto it = std::find(siblings.begin(), siblings.end(), source);
        siblings.insert(it == siblings.end() ? siblings.end() : it + 1, copy.id);
    }
    elements.push_back(std::move(copy));
    return elements.back().id;
}

std::vector<ElementId> Document::visible_leaves() const {
    std::vector<ElementId> out;
    for (const auto& e : elements)
        if (e.visible && e.is_leaf_visual()) out.push_back(e.id);
    return out;
}

TextLayoutInput text_layout_input(const Element& e) {
    TextLayoutInput in;
    auto first_value = [&](std::string_view name, double& px, double& em) {
        const auto* v = e.attribute(name);
        if (!v) return;
        std::string_view s = trim(*v);
        const auto cut = s.find_first_of(" ,");
        s = s.substr(0, cut);
        if (s.ends_with("em")) {
            if (auto n = parse_number(s.substr(0, s.size() - 2))) em = *n;
        } else if (auto n = parse_length(s, e.font_size())) {
            px = *n;
        }
    };
    double dummy_em = 0.0;
    first_value("x", in.x, dummy_em);
    in.x += dummy_em * e.font_size();
    dummy_em = 0.0;
    first_value("y", in.y, dummy_em);
    in.y += dummy_em * e.font_size();
    first_value("dx", in.dx_px, in.dx_em);
    first_value("dy", in.dy_px, in.dy_em);
    const auto anchor = e.style_value("text-anchor");
    if (anchor == "middle") in.anchor = TextLayoutInput::Anchor::Middle;
    else if (anchor == "end") in.anchor = TextLayoutInput::Anchor::End;
    auto baseline = e.style_value("dominant-baseline");
    if (baseline.empty()) baseline = e.style_value("alignment-baseline");
    if (baseline == "middle" || baseline == "central") in.baseline = TextLayoutInput::Baseline::Middle;
    else if (baseline == "hanging" || baseline == "text-before-edge") in.baseline = TextLayoutInput::Baseline::Hanging;
    return in;
}

Rect2D text_local_box(const TextLayoutInput& in, double font_size, const std::vector<std::string>& lines,
                      const TextMetricsConfig& metrics) {
    if (lines.empty()) return {};
    std::size_t max_chars = 0;
    for (const auto& l : lines) max_chars = std::max(max_chars, utf8_length(l));
    const double width = static_cast<double>(max_chars) * font_size * metrics.avg_char_width_ratio;
    const double line_height = font_size * metrics.line_height_ratio;
    const double height = line_height * static_cast<double>(lines.size());
    const double x = in.x + in.dx_px + in.dx_em * font_size;
    const double y = in.y + in.dy_px + in.dy_em * font_size;
    double left = x;
    if (in.anchor == TextLayoutInput::Anchor::Middle) left = x - width / 2;
    else if (in.anchor == TextLayoutInput::Anchor::End) left = x - width;
    double top = y - metrics.baseline_ratio * line_height;
    if (in.baseline == TextLayoutInput::Baseline::Middle) top = y - 0.5 * line_height;
    else if (in.baseline == TextLayoutInput::Baseline::Hanging) top = y;
    return {left, top, left + width, top + height};
}

}  // namespace chartfix::svg
