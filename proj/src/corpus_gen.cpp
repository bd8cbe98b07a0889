#include "chartfix/corpus_gen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "chartfix/error.hpp"
#include "chartfix/rng.hpp"

namespace chartfix::corpus {

namespace {

using svg::format_number;

constexpr double kViewportWidth = 375.0;
constexpr double kViewportHeight = 812.0;
constexpr double kCharWidth = 0.6;
constexpr double kLineHeight = 1.2;
constexpr double kBaseline = 0.8;

constexpr std::array<const char*, 6> kPalette = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948"};
constexpr std::array<const char*, 12> kMonths = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                 "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
constexpr std::array<const char*, 12> kWords = {"North", "South", "East",   "West",  "Central", "Coastal",
                                                "Upper", "Lower", "Inland", "Metro", "Rural",   "Harbor"};
constexpr std::array<const char*, 8> kTitles = {"Monthly Sales",   "Revenue by Region", "Quarterly Output",
                                                "Active Users",    "Energy Use",        "Survey Results",
                                                "Shipments Trend", "Price vs Demand"};

double text_width(std::string_view s, double fs) { return static_cast<double>(svg::utf8_length(s)) * fs * kCharWidth; }

struct Node {
    std::string tag;
    std::vector<std::pair<std::string, std::string>> attrs;
    std::string text;
    std::vector<Node> children;

    Node& attr(std::string k, std::string v) {
        attrs.emplace_back(std::move(k), std::move(v));
        return *this;
    }
    Node& attr(std::string k, double v) { return attr(std::move(k), format_number(v)); }
    Node& add(Node n) {
        children.push_back(std::move(n));
        return children.back();
    }
};

Node make(std::string tag, std::string id) {
    Node n;
    n.tag = std::move(tag);
    n.attr("id", std::move(id));
    return n;
}

std::size_t count_nodes(const Node& n) {
    std::size_t c = 1;
    for (const auto& ch : n.children) c += count_nodes(ch);
    return c;
}

void emit(const Node& n, std::string& out, int depth) {
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
    out += '<' + n.tag;
    for (const auto& [k, v] : n.attrs) out += ' ' + k + "=\"" + v + '"';
    if (n.children.empty() && n.text.empty()) {
        out += "/>\n";
        return;
    }
    out += '>';
    out += n.text;
    if (!n.children.empty()) {
        out += '\n';
        for (const auto& c : n.children) emit(c, out, depth + 1);
        out.append(static_cast<std::size_t>(depth) * 2, ' ');
    }
    out += "</" + n.tag + ">\n";
}

/// Generator-side record of an emitted element, with its exact viewport box.
struct Item {
    std::string id;
    GroupKind kind;
    Rect2D box;
    bool text = false;
    double font = 0.0;
};

struct ChartData {
    std::vector<std::string> categories;
    std::vector<std::vector<double>> values;     // [series][category]
    std::vector<std::vector<double>> xs;         // scatter x values
    std::vector<std::string> series_names;
    double y_max = 100.0;
    double x_max = 100.0;
    bool comma_values = false;
    std::string title, x_title, y_title;
};

std::string format_value(double v, bool comma) {
    const auto n = static_cast<long long>(std::llround(v));
    std::string s = std::to_string(n);
    if (!comma) return s;
    std::string out;
    const int len = static_cast<int>(s.size());
    for (int i = 0; i < len; ++i) {
        out.push_back(s[static_cast<std::size_t>(i)]);
        const int rest = len - 1 - i;
        if (rest > 0 && rest % 3 == 0) out.push_back(',');
    }
    return out;
}

std::string category_label(std::size_t i, std::size_t chars, Rng& rng) {
    if (chars <= 3) {
        if (i < kMonths.size()) return kMonths[i];
        return "M" + std::to_string(i + 1);
    }
    // Space-separated words totalling about `chars` characters.
    std::string out;
    while (out.size() + 2 < chars) {
        if (!out.empty()) out.push_back(' ');
        out += kWords[static_cast<std::size_t>(rng.uniform_int(0, kWords.size() - 1))];
    }
    out += " " + std::to_string(i + 1);
    return out;
}

ChartData make_data(const ChartRecipe& r, Rng& rng, bool dense_labels) {
    ChartData d;
    static constexpr std::array<double, 4> kMax = {100, 200, 500, 1000};
    d.y_max = dense_labels ? 20000.0 : kMax[static_cast<std::size_t>(rng.uniform_int(0, 3))];
    d.comma_values = dense_labels;
    d.x_max = kMax[static_cast<std::size_t>(rng.uniform_int(0, 3))];
    for (std::size_t i = 0; i < r.categories; ++i) d.categories.push_back(category_label(i, r.label_chars, rng));
    for (std::size_t s = 0; s < r.series; ++s) {
        d.series_names.push_back(std::string("Series ") + static_cast<char>('A' + s));
        std::vector<double> vals, xs;
        for (std::size_t i = 0; i < r.categories; ++i) {
            const double lo = dense_labels ? 0.78 : 0.15, hi = dense_labels ? 0.8 : 0.95;
            vals.push_back(std::round(rng.uniform(lo, hi) * d.y_max));
            xs.push_back(std::round(rng.uniform(0.05, 0.95) * d.x_max));
        }
        d.values.push_back(std::move(vals));
        d.xs.push_back(std::move(xs));
    }
    d.title = kTitles[static_cast<std::size_t>(rng.uniform_int(0, kTitles.size() - 1))];
    d.x_title = r.kind == ChartKind::Scatter ? "Price" : "Category";
    d.y_title = "Value";
    return d;
}

const Defect* find_defect(const ChartRecipe& r, DefectKind k) {
    for (const auto& d : r.defects)
        if (d.kind == k) return &d;
    return nullptr;
}

/// Layout inputs that the horizontal / vertical solvers adjust.
struct Frame {
    double plot_left = 60, plot_right = 360;
    double dy = 0;  // vertical shift applied to everything
};

struct Built {
    Node root;
    std::vector<Item> items;
    std::vector<ManifestGroup> groups;
    ManifestScale x_scale, y_scale;
    double mark_right = 0;
};

class Builder {
public:
    Builder(const ChartRecipe& r, const ChartData& d) : r_(r), d_(d) {
        fs_ = r.font_size;
        title_fs_ = r.font_size + 4;
        axis_fs_ = fs_;
        label_fs_ = fs_;
        if (const auto* f = find_defect(r, DefectKind::FontSize)) {
            if (f->target == ElementClass::Axis) axis_fs_ = fs_ - f->magnitude;
            if (f->target == ElementClass::Label) label_fs_ = fs_ - f->magnitude;
        }
    }

    double axis_label_width_y() const {
        double w = 0;
        for (const auto& t : y_ticks()) w = std::max(w, text_width(format_value(t, d_.comma_values), axis_fs_));
        return w;
    }

    std::vector<double> y_ticks() const {
        std::vector<double> t;
        for (int k = 0; k <= 4; ++k) t.push_back(d_.y_max * k / 4);
        return t;
    }
    std::vector<double> x_ticks() const {
        std::vector<double> t;
        for (int k = 0; k <= 4; ++k) t.push_back(d_.x_max * k / 4);
        return t;
    }

    /// Distance from the content's left edge to the plot's left edge.
    double left_extent() const {
        double w = axis_label_width_y() + 9;
        if (r_.axis_titles) w += kLineHeight * fs_ + 8;
        return w;
    }

    Built build(const Frame& f) const;

private:
    const ChartRecipe& r_;
    const ChartData& d_;
    double fs_, title_fs_, axis_fs_, label_fs_;
};

Built Builder::build(const Frame& f) const {
    Built b;
    const bool discrete_x = r_.kind != ChartKind::Scatter;
    const double pl = f.plot_left, pr = f.plot_right;
    const std::size_t n = r_.categories;

    // Vertical stack.
    double y = f.dy;
    double title_top = 0, title_bottom = 0;
    if (r_.title) {
        title_top = y;
        title_bottom = y + kLineHeight * title_fs_;
        y = title_bottom + 8;
    }
    const bool legend = r_.series > 1;
    double row_center = 0;
    if (legend) {
        row_center = y + kLineHeight * fs_ / 2;
        y += kLineHeight * fs_ + 8;
    }
    const double pt = y + 8 + (r_.bar_labels ? kLineHeight * label_fs_ + 4 : 0);
    const double pb = pt + r_.plot_height;
    const double ph = pb - pt;

    auto ypix = [&](double v) { return pb - ph * v / d_.y_max; };
    const double step = (pr - pl) / static_cast<double>(n);
    auto xband = [&](std::size_t i) { return pl + step * (static_cast<double>(i) + 0.5); };
    auto xlin = [&](double v) { return pl + (pr - pl) * v / d_.x_max; };

    Node& root = b.root;
    root.tag = "svg";
    root.attr("id", "chart");
    root.attr("xmlns", "http://www.w3.org/2000/svg");
    root.attr("font-family", "sans-serif");

    if (r_.stylesheet) {
        Node style = make("style", "styles");
        std::ostringstream css;
        css << ".axis text { font-size: " << format_number(axis_fs_) << "px; }\n"
            << ".bar-label { font-size: " << format_number(label_fs_) << "px; }\n"
            << ".title { font-size: " << format_number(title_fs_) << "px; font-weight: bold; }\n";
        style.text = css.str();
        root.add(std::move(style));
    }

    auto add_group = [&](GroupKind kind) -> ManifestGroup& {
        ManifestGroup g;
        g.kind = kind;
        b.groups.push_back(std::move(g));
        return b.groups.back();
    };
    auto text_font = [&](Node& t, double size, bool via_css) {
        if (!(r_.stylesheet && via_css)) t.attr("font-size", size);
    };

    // Title.
    if (r_.title) {
        Node t = make("text", "title");
        t.attr("class", "title").attr("x", pl).attr("y", title_top + kBaseline * kLineHeight * title_fs_);
        text_font(t, title_fs_, true);
        if (!r_.stylesheet) t.attr("font-weight", "bold");
        t.text = d_.title;
        b.items.push_back({"title", GroupKind::TitleText,
                           {pl, title_top, pl + text_width(d_.title, title_fs_), title_bottom}, true, title_fs_});
        root.add(std::move(t));
        auto& g = add_group(GroupKind::TitleText);
        g.members = {"title"};
        g.dependency = Dependency::ReactiveGeometry;
        g.anchor_kind = GroupKind::AxisLine;
        g.anchor_member = "y-domain";
        g.horizontal = ExpectedAnchor{AnchorPosition::Left, AnchorPosition::Left, 0.0};
        g.vertical = ExpectedAnchor{AnchorPosition::Bottom, AnchorPosition::Top, title_bottom - pt};
        g.per_member = true;
    }

    // Legend.
    if (legend) {
        Node lg = make("g", "legend");
        lg.attr("class", "legend");
        auto& shapes = add_group(GroupKind::LegendShape);
        shapes.dependency = Dependency::ReactiveGeometry;
        shapes.anchor_kind = GroupKind::AxisLine;
        shapes.anchor_member = "y-domain";
        shapes.horizontal = ExpectedAnchor{AnchorPosition::Left, AnchorPosition::Left, 0.0};
        shapes.vertical = ExpectedAnchor{AnchorPosition::Bottom, AnchorPosition::Top, row_center + 5 - pt};
        ManifestGroup texts;
        texts.kind = GroupKind::LegendText;
        texts.dependency = Dependency::ReactiveGeometry;
        texts.anchor_kind = GroupKind::LegendShape;
        texts.anchor_member = "legend-swatch-0";
        texts.horizontal = ExpectedAnchor{AnchorPosition::Left, AnchorPosition::Right, 4.0};
        texts.vertical = ExpectedAnchor{AnchorPosition::YCenter, AnchorPosition::YCenter, 0.0};
        texts.per_member = true;
        double x = pl;
        for (std::size_t s = 0; s < r_.series; ++s) {
            const std::string sid = "legend-swatch-" + std::to_string(s);
            const std::string tid = "legend-label-" + std::to_string(s);
            Node sw = make("rect", sid);
            sw.attr("class", "swatch").attr("x", x).attr("y", row_center - 5).attr("width", 10).attr("height", 10);
            sw.attr("fill", kPalette[s % kPalette.size()]);
            lg.add(std::move(sw));
            b.items.push_back({sid, GroupKind::LegendShape, {x, row_center - 5, x + 10, row_center + 5}});
            shapes.members.push_back(sid);
            const std::string& name = d_.series_names[s];
            const double w = text_width(name, fs_);
            Node t = make("text", tid);
            t.attr("class", "legend-label").attr("x", x + 14).attr("y", row_center).attr("dominant-baseline", "middle");
            text_font(t, fs_, false);
            t.text = name;
            lg.add(std::move(t));
            b.items.push_back({tid, GroupKind::LegendText,
                               {x + 14, row_center - kLineHeight * fs_ / 2, x + 14 + w, row_center + kLineHeight * fs_ / 2},
                               true, fs_});
            texts.members.push_back(tid);
            x += 14 + w + 12;
        }
        b.groups.push_back(std::move(texts));
        root.add(std::move(lg));
    }

    // Grid.
    const auto yt = y_ticks();
    if (r_.grid) {
        Node gg = make("g", "grid");
        gg.attr("class", "grid");
        auto& g = add_group(GroupKind::Grid);
        for (std::size_t k = 0; k < yt.size(); ++k) {
            const std::string id = "grid-" + std::to_string(k);
            const double ty = ypix(yt[k]);
            Node l = make("line", id);
            l.attr("x1", pl).attr("x2", pr).attr("y1", ty).attr("y2", ty).attr("stroke", "#e0e0e0");
            gg.add(std::move(l));
            b.items.push_back({id, GroupKind::Grid, {pl, ty, pr, ty}});
            g.members.push_back(id);
        }
        root.add(std::move(gg));
    }

    // X axis.
    {
        Node ax = make("g", "x-axis");
        ax.attr("class", "axis x-axis").attr("transform", "translate(0," + format_number(pb) + ")");
        if (!r_.stylesheet) ax.attr("font-size", axis_fs_);
        Node dom = make("path", "x-domain");
        dom.attr("class", "domain").attr("stroke", "#000").attr("fill", "none");
        dom.attr("d", "M" + format_number(pl) + ",0H" + format_number(pr));
        ax.add(std::move(dom));
        b.items.push_back({"x-domain", GroupKind::AxisLine, {pl, pb, pr, pb}});
        auto& line = add_group(GroupKind::AxisLine);
        line.members = {"x-domain"};
        ManifestGroup ticks, labels;
        ticks.kind = GroupKind::AxisTick;
        labels.kind = GroupKind::AxisLabel;
        labels.dependency = Dependency::ReactiveGeometry;
        labels.anchor_kind = GroupKind::AxisTick;
        labels.anchor_member = "x-tick-line-0";
        labels.horizontal = ExpectedAnchor{AnchorPosition::XCenter, AnchorPosition::XCenter, 0.0};
        labels.vertical = ExpectedAnchor{AnchorPosition::Top, AnchorPosition::Bottom, 3.0};
        labels.per_member = true;
        const std::size_t count = discrete_x ? n : x_ticks().size();
        for (std::size_t i = 0; i < count; ++i) {
            const double cx = discrete_x ? xband(i) : xlin(x_ticks()[i]);
            const std::string label = discrete_x ? d_.categories[i] : format_value(x_ticks()[i], false);
            const std::string si = std::to_string(i);
            Node tg = make("g", "x-tick-" + si);
            tg.attr("class", "tick").attr("transform", "translate(" + format_number(cx) + ",0)");
            Node l = make("line", "x-tick-line-" + si);
            l.attr("stroke", "#000").attr("y2", 6);
            tg.add(std::move(l));
            b.items.push_back({"x-tick-line-" + si, GroupKind::AxisTick, {cx, pb, cx, pb + 6}});
            ticks.members.push_back("x-tick-line-" + si);
            Node t = make("text", "x-label-" + si);
            t.attr("fill", "#000").attr("y", 9).attr("dominant-baseline", "hanging").attr("text-anchor", "middle");
            t.text = label;
            tg.add(std::move(t));
            const double w = text_width(label, axis_fs_);
            b.items.push_back({"x-label-" + si, GroupKind::AxisLabel,
                               {cx - w / 2, pb + 9, cx + w / 2, pb + 9 + kLineHeight * axis_fs_}, true, axis_fs_});
            labels.members.push_back("x-label-" + si);
            ax.add(std::move(tg));
        }
        b.groups.push_back(std::move(ticks));
        b.groups.push_back(std::move(labels));
        root.add(std::move(ax));
        if (discrete_x) {
            b.x_scale.variant = Scale::Variant::Discrete;
            b.x_scale.categories = d_.categories;
            b.x_scale.range_min = pl;
            b.x_scale.range_max = pr;
        } else {
            b.x_scale.variant = Scale::Variant::Linear;
            b.x_scale.domain_min = 0;
            b.x_scale.domain_max = d_.x_max;
            b.x_scale.range_min = pl;
            b.x_scale.range_max = pr;
        }
    }

    // Y axis.
    {
        Node ax = make("g", "y-axis");
        ax.attr("class", "axis y-axis").attr("transform", "translate(" + format_number(pl) + ",0)");
        if (!r_.stylesheet) ax.attr("font-size", axis_fs_);
        Node dom = make("path", "y-domain");
        dom.attr("class", "domain").attr("stroke", "#000").attr("fill", "none");
        dom.attr("d", "M0," + format_number(pt) + "V" + format_number(pb));
        ax.add(std::move(dom));
        b.items.push_back({"y-domain", GroupKind::AxisLine, {pl, pt, pl, pb}});
        auto& line = add_group(GroupKind::AxisLine);
        line.members = {"y-domain"};
        ManifestGroup ticks, labels;
        ticks.kind = GroupKind::AxisTick;
        labels.kind = GroupKind::AxisLabel;
        labels.dependency = Dependency::ReactiveGeometry;
        labels.anchor_kind = GroupKind::AxisTick;
        labels.anchor_member = "y-tick-line-0";
        labels.horizontal = ExpectedAnchor{AnchorPosition::Right, AnchorPosition::Left, -3.0};
        labels.vertical = ExpectedAnchor{AnchorPosition::YCenter, AnchorPosition::YCenter, 0.0};
        labels.per_member = true;
        for (std::size_t k = 0; k < yt.size(); ++k) {
            const double ty = ypix(yt[k]);
            const std::string label = format_value(yt[k], d_.comma_values);
            const std::string si = std::to_string(k);
            Node tg = make("g", "y-tick-" + si);
            tg.attr("class", "tick").attr("transform", "translate(0," + format_number(ty) + ")");
            Node l = make("line", "y-tick-line-" + si);
            l.attr("stroke", "#000").attr("x2", -6);
            tg.add(std::move(l));
            b.items.push_back({"y-tick-line-" + si, GroupKind::AxisTick, {pl - 6, ty, pl, ty}});
            ticks.members.push_back("y-tick-line-" + si);
            Node t = make("text", "y-label-" + si);
            t.attr("fill", "#000").attr("x", -9).attr("dominant-baseline", "middle").attr("text-anchor", "end");
            t.text = label;
            tg.add(std::move(t));
            const double w = text_width(label, axis_fs_);
            b.items.push_back({"y-label-" + si, GroupKind::AxisLabel,
                               {pl - 9 - w, ty - kLineHeight * axis_fs_ / 2, pl - 9, ty + kLineHeight * axis_fs_ / 2},
                               true, axis_fs_});
            labels.members.push_back("y-label-" + si);
            ax.add(std::move(tg));
        }
        b.groups.push_back(std::move(ticks));
        b.groups.push_back(std::move(labels));
        root.add(std::move(ax));
        b.y_scale.variant = Scale::Variant::Linear;
        b.y_scale.domain_min = 0;
        b.y_scale.domain_max = d_.y_max;
        b.y_scale.range_min = pt;
        b.y_scale.range_max = pb;
    }

    // Marks.
    Node marks = make("g", "marks");
    marks.attr("class", "marks");
    b.mark_right = -1e300;
    std::vector<Rect2D> bar_boxes;
    if (r_.kind == ChartKind::Bar || r_.kind == ChartKind::GroupedBar) {
        auto& g = add_group(GroupKind::Shape);
        const double band = 0.8 * step;
        const double sub = band / static_cast<double>(r_.series);
        for (std::size_t s = 0; s < r_.series; ++s) {
            for (std::size_t i = 0; i < n; ++i) {
                const std::string id = "bar-" + std::to_string(s) + "-" + std::to_string(i);
                const double x0 = xband(i) - band / 2 + sub * static_cast<double>(s);
                const double top = ypix(d_.values[s][i]);
                Node rect = make("rect", id);
                rect.attr("class", "bar").attr("x", x0).attr("y", top).attr("width", sub).attr("height", pb - top);
                rect.attr("fill", kPalette[s % kPalette.size()]);
                marks.add(std::move(rect));
                const Rect2D box{x0, top, x0 + sub, pb};
                b.items.push_back({id, GroupKind::Shape, box});
                bar_boxes.push_back(box);
                b.mark_right = std::max(b.mark_right, box.x_max);
                g.members.push_back(id);
            }
        }
    } else if (r_.kind == ChartKind::Line) {
        auto& lines = add_group(GroupKind::Shape);
        for (std::size_t s = 0; s < r_.series; ++s) {
            const std::string id = "line-" + std::to_string(s);
            std::string dpath;
            Rect2D box;
            for (std::size_t i = 0; i < n; ++i) {
                const Vec2 p{xband(i), ypix(d_.values[s][i])};
                dpath += (i == 0 ? "M" : "L") + format_number(p.x) + "," + format_number(p.y);
                box.include(p);
            }
            Node path = make("path", id);
            path.attr("class", "line").attr("fill", "none").attr("stroke", kPalette[s % kPalette.size()]);
            path.attr("stroke-width", 2).attr("d", dpath);
            marks.add(std::move(path));
            b.items.push_back({id, GroupKind::Shape, box});
            b.mark_right = std::max(b.mark_right, box.x_max);
            lines.members.push_back(id);
        }
        if (r_.points) {
            auto& dots = add_group(GroupKind::Shape);
            for (std::size_t s = 0; s < r_.series; ++s) {
                for (std::size_t i = 0; i < n; ++i) {
                    const std::string id = "dot-" + std::to_string(s) + "-" + std::to_string(i);
                    const Vec2 p{xband(i), ypix(d_.values[s][i])};
                    Node c = make("circle", id);
                    c.attr("class", "dot").attr("cx", p.x).attr("cy", p.y).attr("r", 3.5);
                    c.attr("fill", kPalette[s % kPalette.size()]);
                    marks.add(std::move(c));
                    b.items.push_back({id, GroupKind::Shape, {p.x - 3.5, p.y - 3.5, p.x + 3.5, p.y + 3.5}});
                    b.mark_right = std::max(b.mark_right, p.x + 3.5);
                    dots.members.push_back(id);
                }
            }
        }
    } else {
        auto& g = add_group(GroupKind::Shape);
        for (std::size_t s = 0; s < r_.series; ++s) {
            for (std::size_t i = 0; i < n; ++i) {
                const std::string id = "dot-" + std::to_string(s) + "-" + std::to_string(i);
                const Vec2 p{xlin(d_.xs[s][i]), ypix(d_.values[s][i])};
                Node c = make("circle", id);
                c.attr("class", "dot").attr("cx", p.x).attr("cy", p.y).attr("r", 4);
                c.attr("fill", kPalette[s % kPalette.size()]);
                marks.add(std::move(c));
                b.items.push_back({id, GroupKind::Shape, {p.x - 4, p.y - 4, p.x + 4, p.y + 4}});
                b.mark_right = std::max(b.mark_right, p.x + 4);
                g.members.push_back(id);
            }
        }
    }
    root.add(std::move(marks));

    // Bar value labels.
    if (r_.bar_labels) {
        Node lg = make("g", "bar-labels");
        lg.attr("class", "labels");
        auto& g = add_group(GroupKind::LabelText);
        g.dependency = Dependency::ReactiveGeometry;
        g.anchor_kind = GroupKind::Shape;
        g.anchor_member = "bar-0-0";
        g.horizontal = ExpectedAnchor{AnchorPosition::XCenter, AnchorPosition::XCenter, 0.0};
        g.vertical = ExpectedAnchor{AnchorPosition::Bottom, AnchorPosition::Top, -4.0};
        g.per_member = true;
        for (std::size_t i = 0; i < n; ++i) {
            const std::string id = "bar-label-" + std::to_string(i);
            const std::string label = format_value(d_.values[0][i], d_.comma_values);
            const Rect2D& bar = bar_boxes[i];
            const double cx = bar.x_center();
            const double bottom = bar.y_min - 4;
            Node t = make("text", id);
            t.attr("class", "bar-label").attr("x", cx).attr("y", bottom - (1 - kBaseline) * kLineHeight * label_fs_);
            t.attr("text-anchor", "middle");
            text_font(t, label_fs_, true);
            t.text = label;
            lg.add(std::move(t));
            const double w = text_width(label, label_fs_);
            b.items.push_back({id, GroupKind::LabelText,
                               {cx - w / 2, bottom - kLineHeight * label_fs_, cx + w / 2, bottom}, true, label_fs_});
            g.members.push_back(id);
        }
        root.add(std::move(lg));
    }

    // Axis titles.
    if (r_.axis_titles) {
        double labels_bottom = pb + 9 + kLineHeight * axis_fs_;
        const double top = labels_bottom + 8;
        const double cx = (pl + pr) / 2;
        Node xt = make("text", "x-title");
        xt.attr("class", "axis-title").attr("x", cx).attr("y", top + kBaseline * kLineHeight * fs_);
        xt.attr("text-anchor", "middle");
        text_font(xt, fs_, false);
        xt.text = d_.x_title;
        root.add(std::move(xt));
        const double wx = text_width(d_.x_title, fs_);
        b.items.push_back({"x-title", GroupKind::AxisTitle, {cx - wx / 2, top, cx + wx / 2, top + kLineHeight * fs_}, true, fs_});
        auto& gx = add_group(GroupKind::AxisTitle);
        gx.members = {"x-title"};
        gx.dependency = Dependency::ReactiveGeometry;
        gx.anchor_kind = GroupKind::AxisLine;
        gx.anchor_member = "x-domain";
        gx.horizontal = ExpectedAnchor{AnchorPosition::XCenter, AnchorPosition::XCenter, 0.0};
        gx.vertical = ExpectedAnchor{AnchorPosition::Top, AnchorPosition::Bottom, top - pb};
        gx.per_member = true;

        // Rotated y title; its right edge sits 8 px left of the y labels.
        const double right = pl - 9 - axis_label_width_y() - 8;
        const double base = right - (1 - kBaseline) * kLineHeight * fs_;
        const double cy = (pt + pb) / 2;
        Node yt_node = make("text", "y-title");
        yt_node.attr("class", "axis-title").attr("transform", "rotate(-90)").attr("x", -cy).attr("y", base);
        yt_node.attr("text-anchor", "middle");
        text_font(yt_node, fs_, false);
        yt_node.text = d_.y_title;
        root.add(std::move(yt_node));
        const double wy = text_width(d_.y_title, fs_);
        b.items.push_back({"y-title", GroupKind::AxisTitle,
                           {right - kLineHeight * fs_, cy - wy / 2, right, cy + wy / 2}, true, fs_});
        auto& gy = add_group(GroupKind::AxisTitle);
        gy.members = {"y-title"};
        gy.dependency = Dependency::ReactiveGeometry;
        gy.anchor_kind = GroupKind::AxisLine;
        gy.anchor_member = "y-domain";
        gy.horizontal = ExpectedAnchor{AnchorPosition::Right, AnchorPosition::Left, right - pl};
        gy.vertical = ExpectedAnchor{AnchorPosition::YCenter, AnchorPosition::YCenter, 0.0};
        gy.per_member = true;
    }
    return b;
}

Rect2D content_box(const std::vector<Item>& items) {
    Rect2D r;
    for (const auto& it : items) r = r.united(it.box);
    return r;
}

/// Costs of the 28 issue states computed from generator-side boxes. This is
/// an independent derivation used to label seeded defects.
struct OracleCosts {
    double top_margin = 0, left_margin = 0, right_margin = 0;
    std::array<std::array<double, 3>, kClassCount> oov{};  // left, right, top
    std::array<double, kClassCount> font{};
    std::array<double, kClassCount> overlap{};
};

OracleCosts oracle_costs(const std::vector<Item>& items, double tau) {
    OracleCosts c;
    const Rect2D all = content_box(items);
    c.top_margin = std::max(0.0, all.y_min - 0.1 * kViewportHeight);
    c.left_margin = std::max(0.0, all.x_min - 0.1 * kViewportWidth);
    c.right_margin = std::max(0.0, (kViewportWidth - all.x_max) - 0.1 * kViewportWidth);
    std::array<double, kClassCount> font_sum{};
    std::array<int, kClassCount> font_n{};
    for (const auto& it : items) {
        const auto k = static_cast<std::size_t>(class_of(it.kind));
        c.oov[k][0] = std::max(c.oov[k][0], -it.box.x_min);
        c.oov[k][1] = std::max(c.oov[k][1], it.box.x_max - kViewportWidth);
        c.oov[k][2] = std::max(c.oov[k][2], -it.box.y_min);
        if (it.text) {
            font_sum[k] += std::max(0.0, tau - it.font);
            ++font_n[k];
        }
    }
    for (std::size_t k = 0; k < kClassCount; ++k) {
        if (font_n[k] > 0) c.font[k] = font_sum[k] / font_n[k];
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (!items[i].text || static_cast<std::size_t>(class_of(items[i].kind)) != k) continue;
            for (std::size_t j = i + 1; j < items.size(); ++j) {
                if (!items[j].text || static_cast<std::size_t>(class_of(items[j].kind)) != k) continue;
                const auto& a = items[i].box;
                const auto& b = items[j].box;
                const double w = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
                const double h = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
                if (w > 0 && h > 0) c.overlap[k] += w * h;
            }
        }
    }
    return c;
}

double expected_cost(const OracleCosts& c, const Defect& d) {
    const auto k = static_cast<std::size_t>(d.target);
    switch (d.kind) {
        case DefectKind::TopMargin: return c.top_margin;
        case DefectKind::LeftMargin: return c.left_margin;
        case DefectKind::RightMargin: return c.right_margin;
        case DefectKind::LeftOverflow: return c.oov[k][0];
        case DefectKind::RightOverflow: return c.oov[k][1];
        case DefectKind::TopOverflow: return c.oov[k][2];
        case DefectKind::FontSize: return c.font[k];
        case DefectKind::Overlap: return c.overlap[k];
        case DefectKind::DistortedRatio: return 0.0;
    }
    return 0.0;
}

void validate(const ChartRecipe& r) {
    if (r.categories == 0) throw Error(ErrorCode::InvalidRecipe, "zero data points");
    if (r.series == 0) throw Error(ErrorCode::InvalidRecipe, "zero series");
    if (r.kind == ChartKind::Bar && r.series != 1) throw Error(ErrorCode::InvalidRecipe, "bar charts have one series");
    if (r.font_size <= 4) throw Error(ErrorCode::InvalidRecipe, "font size too small");
    if (r.plot_height <= 20) throw Error(ErrorCode::InvalidRecipe, "plot height too small");
    if (r.bar_labels && r.kind != ChartKind::Bar) throw Error(ErrorCode::InvalidRecipe, "value labels need a bar chart");
    int top = 0, left = 0, right = 0;
    for (const auto& d : r.defects) {
        if (d.kind != DefectKind::Overlap && d.kind != DefectKind::DistortedRatio && d.magnitude <= 0)
            throw Error(ErrorCode::InvalidRecipe, "defect magnitude must be positive");
        top += d.kind == DefectKind::TopMargin || d.kind == DefectKind::TopOverflow;
        left += d.kind == DefectKind::LeftMargin || d.kind == DefectKind::LeftOverflow;
        right += d.kind == DefectKind::RightMargin || d.kind == DefectKind::RightOverflow;
        if (d.kind == DefectKind::TopOverflow && !r.title) throw Error(ErrorCode::InvalidRecipe, "top overflow needs a title");
        if ((d.kind == DefectKind::FontSize || d.kind == DefectKind::Overlap) && d.target == ElementClass::Label &&
            !r.bar_labels)
            throw Error(ErrorCode::InvalidRecipe, "label defects need value labels");
        if (d.kind == DefectKind::FontSize && d.magnitude >= r.font_size)
            throw Error(ErrorCode::InvalidRecipe, "font deficit exceeds font size");
    }
    if (top > 1 || left > 1 || right > 1) throw Error(ErrorCode::InvalidRecipe, "conflicting defects on one side");
}

}  // namespace

std::string_view to_string(ChartKind k) {
    switch (k) {
        case ChartKind::Bar: return "bar";
        case ChartKind::GroupedBar: return "grouped_bar";
        case ChartKind::Line: return "line";
        case ChartKind::Scatter: return "scatter";
    }
    return "?";
}

std::string_view to_string(DefectKind k) {
    switch (k) {
        case DefectKind::TopMargin: return "TopMargin";
        case DefectKind::LeftMargin: return "LeftMargin";
        case DefectKind::RightMargin: return "RightMargin";
        case DefectKind::TopOverflow: return "TopOverflow";
        case DefectKind::LeftOverflow: return "LeftOverflow";
        case DefectKind::RightOverflow: return "RightOverflow";
        case DefectKind::FontSize: return "FontSize";
        case DefectKind::Overlap: return "Overlap";
        case DefectKind::DistortedRatio: return "DistortedRatio";
    }
    return "?";
}

GeneratedChart generate(const ChartRecipe& recipe) {
    validate(recipe);
    Rng rng(recipe.seed);
    const bool dense = [&] {
        const auto* o = find_defect(recipe, DefectKind::Overlap);
        return o && o->target == ElementClass::Label;
    }();
    const ChartData data = make_data(recipe, rng, dense);
    const Builder builder(recipe, data);

    // Horizontal targets.
    double left_target = 12.0, right_target = kViewportWidth - 12.0;
    bool right_is_marks = false;
    if (const auto* d = find_defect(recipe, DefectKind::LeftMargin)) left_target = 0.1 * kViewportWidth + d->magnitude;
    if (const auto* d = find_defect(recipe, DefectKind::LeftOverflow)) left_target = -d->magnitude;
    if (const auto* d = find_defect(recipe, DefectKind::RightMargin))
        right_target = kViewportWidth - 0.1 * kViewportWidth - d->magnitude;
    if (const auto* d = find_defect(recipe, DefectKind::RightOverflow)) {
        right_target = kViewportWidth + d->magnitude;
        right_is_marks = true;
    }
    double top_target = 12.0;
    bool top_is_title = false;
    if (const auto* d = find_defect(recipe, DefectKind::TopMargin)) top_target = 0.1 * kViewportHeight + d->magnitude;
    if (const auto* d = find_defect(recipe, DefectKind::TopOverflow)) {
        top_target = -d->magnitude;
        top_is_title = true;
    }

    Frame f;
    f.plot_left = left_target + builder.left_extent();
    f.plot_right = right_target;
    for (int iter = 0; iter < 60; ++iter) {
        Built b = builder.build(f);
        const Rect2D box = content_box(b.items);
        const double dl = left_target - box.x_min;
        f.plot_left += dl;
        f.plot_right += dl;
        b = builder.build(f);
        const double right_now = right_is_marks ? b.mark_right : content_box(b.items).x_max;
        f.plot_right += right_target - right_now;
        if (std::abs(dl) < 1e-9 && std::abs(right_target - right_now) < 1e-9) break;
    }
    if (f.plot_right - f.plot_left < 40) throw Error(ErrorCode::InvalidRecipe, "plot area collapsed");
    {
        Built b = builder.build(f);
        double top = content_box(b.items).y_min;
        if (top_is_title) {
            for (const auto& it : b.items)
                if (it.kind == GroupKind::TitleText) top = it.box.y_min;
        }
        f.dy = top_target - top;
    }

    Built b = builder.build(f);
    const Rect2D box = content_box(b.items);
    b.root.attrs.insert(b.root.attrs.begin() + 1, {"width", format_number(std::max(kViewportWidth, box.x_max + 12))});
    b.root.attrs.insert(b.root.attrs.begin() + 2, {"height", format_number(box.y_max + 12)});

    GeneratedChart out;
    out.svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    emit(b.root, out.svg, 0);
    Manifest& m = out.manifest;
    m.recipe = recipe;
    m.element_count = count_nodes(b.root);
    m.groups = std::move(b.groups);
    m.x_scale = b.x_scale;
    m.y_scale = b.y_scale;
    const OracleCosts costs = oracle_costs(b.items, 12.0);
    for (const auto& d : recipe.defects) {
        const double c = expected_cost(costs, d);
        if (d.kind != DefectKind::DistortedRatio && c <= 0)
            throw Error(ErrorCode::InvalidRecipe, "seeded defect " + std::string(to_string(d.kind)) + " has no effect");
        m.defects.push_back({d.kind, d.target, d.magnitude, c});
    }
    return out;
}

CorpusMix default_mix() { return {}; }

CorpusMix holdout_mix() {
    CorpusMix m;
    m.clean_fraction = 0.05;
    m.multi_defect_fraction = 0.5;
    m.margin_weight = 2.0;
    m.overflow_weight = 3.0;
    m.font_weight = 2.0;
    m.overlap_weight = 1.5;
    return m;
}

namespace {

enum class Family { Margin, Overflow, Font, Overlap };

Family pick_family(const CorpusMix& mix, Rng& rng) {
    const double total = mix.margin_weight + mix.overflow_weight + mix.font_weight + mix.overlap_weight;
    double u = rng.uniform() * total;
    if ((u -= mix.margin_weight) < 0) return Family::Margin;
    if ((u -= mix.overflow_weight) < 0) return Family::Overflow;
    if ((u -= mix.font_weight) < 0) return Family::Font;
    return Family::Overlap;
}

bool side_taken(const ChartRecipe& r, int side) {
    for (const auto& d : r.defects) {
        const int s = (d.kind == DefectKind::TopMargin || d.kind == DefectKind::TopOverflow)     ? 0
                      : (d.kind == DefectKind::LeftMargin || d.kind == DefectKind::LeftOverflow) ? 1
                      : (d.kind == DefectKind::RightMargin || d.kind == DefectKind::RightOverflow) ? 2
                                                                                                  : -1;
        if (s == side) return true;
    }
    return false;
}

bool has_kind(const ChartRecipe& r, DefectKind k) { return find_defect(r, k) != nullptr; }

void add_defect(ChartRecipe& r, Family fam, Rng& rng) {
    const double mag = static_cast<double>(rng.uniform_int(10, 40));
    switch (fam) {
        case Family::Margin:
        case Family::Overflow: {
            for (int attempt = 0; attempt < 6; ++attempt) {
                const int side = static_cast<int>(rng.uniform_int(0, 2));
                if (side_taken(r, side)) continue;
                Defect d;
                d.magnitude = mag;
                if (fam == Family::Margin) {
                    d.kind = side == 0 ? DefectKind::TopMargin : side == 1 ? DefectKind::LeftMargin : DefectKind::RightMargin;
                } else if (side == 0) {
                    d.kind = DefectKind::TopOverflow;
                    d.target = ElementClass::Title;
                    r.title = true;
                } else if (side == 1) {
                    d.kind = DefectKind::LeftOverflow;
                    d.target = ElementClass::Axis;
                } else {
                    d.kind = DefectKind::RightOverflow;
                    d.target = ElementClass::Mark;
                }
                r.defects.push_back(d);
                return;
            }
            return;
        }
        case Family::Font: {
            if (has_kind(r, DefectKind::FontSize)) return;
            Defect d;
            d.kind = DefectKind::FontSize;
            d.magnitude = static_cast<double>(rng.uniform_int(2, 4));
            d.target = (r.kind == ChartKind::Bar && rng.chance(0.4)) ? ElementClass::Label : ElementClass::Axis;
            if (d.target == ElementClass::Label) r.bar_labels = true;
            r.defects.push_back(d);
            return;
        }
        case Family::Overlap: {
            if (has_kind(r, DefectKind::Overlap)) return;
            Defect d;
            d.kind = DefectKind::Overlap;
            if (r.kind == ChartKind::Bar && rng.chance(0.5)) {
                d.target = ElementClass::Label;
                r.bar_labels = true;
                r.categories = static_cast<std::size_t>(rng.uniform_int(10, 14));
            } else if (r.kind != ChartKind::Scatter) {
                d.target = ElementClass::Axis;
                r.label_chars = static_cast<std::size_t>(rng.uniform_int(9, 14));
                r.categories = static_cast<std::size_t>(rng.uniform_int(5, 8));
            } else {
                return;
            }
            r.defects.push_back(d);
            return;
        }
    }
}

ChartRecipe base_recipe(Rng& rng, std::uint64_t seed) {
    ChartRecipe r;
    r.seed = seed;
    r.kind = static_cast<ChartKind>(rng.uniform_int(0, 3));
    switch (r.kind) {
        case ChartKind::Bar:
            r.categories = static_cast<std::size_t>(rng.uniform_int(4, 8));
            r.bar_labels = rng.chance(0.4);
            break;
        case ChartKind::GroupedBar:
            r.categories = static_cast<std::size_t>(rng.uniform_int(3, 6));
            r.series = static_cast<std::size_t>(rng.uniform_int(2, 3));
            break;
        case ChartKind::Line:
            r.categories = static_cast<std::size_t>(rng.uniform_int(5, 12));
            r.series = static_cast<std::size_t>(rng.uniform_int(1, 3));
            r.points = rng.chance(0.5);
            break;
        case ChartKind::Scatter:
            r.categories = static_cast<std::size_t>(rng.uniform_int(8, 25));
            r.series = static_cast<std::size_t>(rng.uniform_int(1, 2));
            break;
    }
    r.title = rng.chance(0.85);
    r.axis_titles = rng.chance(0.7);
    r.grid = rng.chance(0.4);
    r.stylesheet = rng.chance(0.3);
    r.plot_height = static_cast<double>(rng.uniform_int(180, 260));
    return r;
}

}  // namespace

std::vector<ChartRecipe> sample_recipes(std::size_t count, std::uint64_t seed, const CorpusMix& mix) {
    Rng rng(seed);
    // Exact quotas, shuffled, so small corpora still honour the mix.
    const auto n_clean = static_cast<std::size_t>(std::llround(mix.clean_fraction * static_cast<double>(count)));
    const auto n_multi = std::min(count - n_clean,
                                  static_cast<std::size_t>(std::ceil(mix.multi_defect_fraction * static_cast<double>(count))));
    std::vector<int> plan(count, 1);
    for (std::size_t i = 0; i < n_clean; ++i) plan[i] = 0;
    for (std::size_t i = n_clean; i < n_clean + n_multi; ++i) plan[i] = 2;
    for (std::size_t i = count; i > 1; --i) std::swap(plan[i - 1], plan[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);

    std::vector<ChartRecipe> out;
    for (std::size_t i = 0; i < count; ++i) {
        for (int attempt = 0;; ++attempt) {
            ChartRecipe r = base_recipe(rng, rng.next());
            const std::size_t want = plan[i] == 0 ? 0 : plan[i] == 1 ? 1 : static_cast<std::size_t>(rng.uniform_int(2, 3));
            for (int tries = 0; r.defects.size() < want && tries < 20; ++tries) add_defect(r, pick_family(mix, rng), rng);
            if (r.defects.size() != want) continue;
            if (rng.chance(0.05)) r.defects.push_back({DefectKind::DistortedRatio, ElementClass::Mark, 0.0});
            try {
                generate(r);
            } catch (const Error&) {
                if (attempt < 50) continue;
                throw;
            }
            out.push_back(std::move(r));
            break;
        }
    }
    return out;
}

namespace {

void write_file(const std::filesystem::path& p, const std::string& content) {
    const auto tmp = p.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw Error(ErrorCode::Io, "cannot write " + tmp);
        f << content;
    }
    std::filesystem::rename(tmp, p);
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw Error(ErrorCode::Io, "cannot read " + p.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

void write_corpus(const std::filesystem::path& dir, std::size_t count, std::uint64_t seed, const CorpusMix& mix) {
    std::filesystem::create_directories(dir);
    const auto recipes = sample_recipes(count, seed, mix);
    nlohmann::json index;
    index["format_version"] = Manifest::kFormatVersion;
    index["seed"] = seed;
    index["charts"] = nlohmann::json::array();
    for (std::size_t i = 0; i < recipes.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "chart_%03zu", i);
        const auto chart = generate(recipes[i]);
        write_file(dir / (std::string(name) + ".svg"), chart.svg);
        write_file(dir / (std::string(name) + ".json"), to_json(chart.manifest).dump(2) + "\n");
        index["charts"].push_back({{"name", name}, {"recipe", to_json(recipes[i])}});
    }
    write_file(dir / "index.json", index.dump(2) + "\n");
}

std::vector<CorpusEntry> load_corpus(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw Error(ErrorCode::Io, "not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.path().extension() == ".svg") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<CorpusEntry> out;
    for (const auto& f : files) {
        CorpusEntry e;
        e.name = f.stem().string();
        e.svg = read_file(f);
        auto mpath = f;
        mpath.replace_extension(".json");
        if (std::filesystem::exists(mpath)) e.manifest = manifest_from_json(nlohmann::json::parse(read_file(mpath)));
        out.push_back(std::move(e));
    }
    return out;
}

// JSON ----------------------------------------------------------------------

namespace {

nlohmann::json anchor_json(const std::optional<ExpectedAnchor>& a) {
    if (!a) return nullptr;
    return {{"self", to_string(a->self)}, {"target", to_string(a->target)}, {"offset", a->offset}};
}

std::optional<ExpectedAnchor> anchor_from(const nlohmann::json& j) {
    if (j.is_null()) return std::nullopt;
    ExpectedAnchor a;
    a.self = *anchor_position_from_string(j.at("self").get<std::string>());
    a.target = *anchor_position_from_string(j.at("target").get<std::string>());
    a.offset = j.at("offset").get<double>();
    return a;
}

template <typename E, std::size_t N>
E enum_from(std::string_view s, const std::array<E, N>& all) {
    for (E e : all)
        if (to_string(e) == s) return e;
    throw Error(ErrorCode::InvalidArgument, "unknown enum value " + std::string(s));
}

constexpr std::array kAllDefects = {DefectKind::TopMargin,    DefectKind::LeftMargin,    DefectKind::RightMargin,
                                    DefectKind::TopOverflow,  DefectKind::LeftOverflow,  DefectKind::RightOverflow,
                                    DefectKind::FontSize,     DefectKind::Overlap,       DefectKind::DistortedRatio};
constexpr std::array kAllCharts = {ChartKind::Bar, ChartKind::GroupedBar, ChartKind::Line, ChartKind::Scatter};
constexpr std::array kAllClasses = {ElementClass::Title, ElementClass::Axis, ElementClass::Legend, ElementClass::Mark,
                                    ElementClass::Label};
constexpr std::array kAllDeps = {Dependency::GlobalScale, Dependency::LocalScale, Dependency::ReactiveGeometry};

nlohmann::json scale_json(const ManifestScale& s) {
    nlohmann::json j{{"variant", to_string(s.variant)}, {"range", {s.range_min, s.range_max}}};
    if (s.variant == Scale::Variant::Linear) j["domain"] = {s.domain_min, s.domain_max};
    else j["categories"] = s.categories;
    return j;
}

ManifestScale scale_from(const nlohmann::json& j) {
    ManifestScale s;
    s.variant = j.at("variant") == "Linear" ? Scale::Variant::Linear : Scale::Variant::Discrete;
    s.range_min = j.at("range")[0];
    s.range_max = j.at("range")[1];
    if (j.contains("domain")) {
        s.domain_min = j["domain"][0];
        s.domain_max = j["domain"][1];
    }
    if (j.contains("categories")) s.categories = j["categories"].get<std::vector<std::string>>();
    return s;
}

}  // namespace

nlohmann::json to_json(const ChartRecipe& r) {
    nlohmann::json defects = nlohmann::json::array();
    for (const auto& d : r.defects)
        defects.push_back({{"kind", to_string(d.kind)}, {"target", to_string(d.target)}, {"magnitude", d.magnitude}});
    return {{"kind", to_string(r.kind)},     {"categories", r.categories}, {"series", r.series},
            {"label_chars", r.label_chars}, {"title", r.title},           {"axis_titles", r.axis_titles},
            {"grid", r.grid},               {"bar_labels", r.bar_labels}, {"points", r.points},
            {"stylesheet", r.stylesheet},   {"font_size", r.font_size},   {"plot_height", r.plot_height},
            {"defects", defects},           {"seed", r.seed}};
}

ChartRecipe recipe_from_json(const nlohmann::json& j) {
    ChartRecipe r;
    r.kind = enum_from(j.at("kind").get<std::string>(), kAllCharts);
    r.categories = j.at("categories");
    r.series = j.at("series");
    r.label_chars = j.at("label_chars");
    r.title = j.at("title");
    r.axis_titles = j.at("axis_titles");
    r.grid = j.at("grid");
    r.bar_labels = j.at("bar_labels");
    r.points = j.at("points");
    r.stylesheet = j.at("stylesheet");
    r.font_size = j.at("font_size");
    r.plot_height = j.at("plot_height");
    r.seed = j.at("seed");
    for (const auto& d : j.at("defects")) {
        r.defects.push_back({enum_from(d.at("kind").get<std::string>(), kAllDefects),
                             enum_from(d.at("target").get<std::string>(), kAllClasses), d.at("magnitude").get<double>()});
    }
    return r;
}

nlohmann::json to_json(const Manifest& m) {
    nlohmann::json groups = nlohmann::json::array();
    for (const auto& g : m.groups) {
        nlohmann::json jg{{"kind", to_string(g.kind)},
                          {"members", g.members},
                          {"dependency", to_string(g.dependency)},
                          {"per_member", g.per_member}};
        if (g.anchor_kind) {
            jg["anchor_kind"] = to_string(*g.anchor_kind);
            jg["anchor_member"] = g.anchor_member;
            jg["horizontal"] = anchor_json(g.horizontal);
            jg["vertical"] = anchor_json(g.vertical);
        }
        groups.push_back(std::move(jg));
    }
    nlohmann::json defects = nlohmann::json::array();
    for (const auto& d : m.defects) {
        defects.push_back({{"kind", to_string(d.kind)},
                           {"target", to_string(d.target)},
                           {"magnitude", d.magnitude},
                           {"expected_cost", d.expected_cost},
                           {"cost_only_metadata", d.kind == DefectKind::DistortedRatio}});
    }
    return {{"format_version", Manifest::kFormatVersion},
            {"recipe", to_json(m.recipe)},
            {"element_count", m.element_count},
            {"groups", groups},
            {"scales", {{"x", scale_json(m.x_scale)}, {"y", scale_json(m.y_scale)}}},
            {"defects", defects}};
}

Manifest manifest_from_json(const nlohmann::json& j) {
    Manifest m;
    m.recipe = recipe_from_json(j.at("recipe"));
    m.element_count = j.at("element_count");
    for (const auto& jg : j.at("groups")) {
        ManifestGroup g;
        g.kind = *group_kind_from_string(jg.at("kind").get<std::string>());
        g.members = jg.at("members").get<std::vector<std::string>>();
        g.dependency = enum_from(jg.at("dependency").get<std::string>(), kAllDeps);
        g.per_member = jg.at("per_member");
        if (jg.contains("anchor_kind")) {
            g.anchor_kind = group_kind_from_string(jg["anchor_kind"].get<std::string>());
            g.anchor_member = jg.at("anchor_member");
            g.horizontal = anchor_from(jg.at("horizontal"));
            g.vertical = anchor_from(jg.at("vertical"));
        }
        m.groups.push_back(std::move(g));
    }
    m.x_scale = scale_from(j.at("scales").at("x"));
    m.y_scale = scale_from(j.at("scales").at("y"));
    for (const auto& d : j.at("defects")) {
        m.defects.push_back({enum_from(d.at("kind").get<std::string>(), kAllDefects),
                             enum_from(d.at("target").get<std::string>(), kAllClasses), d.at("magnitude").get<double>(),
                             d.at("expected_cost").get<double>()});
    }
    return m;
}

}  // namespace chartfix::corpus
