#include <doctest.h>

#include <random>

#include "chartfix/actions.hpp"
#include "chartfix/corpus_gen.hpp"
#include "chartfix/deconstructor.hpp"
#include "chartfix/error.hpp"
#include "chartfix/interpreter.hpp"
#include "chartfix/layout.hpp"

using namespace chartfix;
using namespace chartfix::corpus;

namespace {

// Linear x axis 0..100 with 5 ticks over [40, 340], four categories on y.
const char* kHandChart = R"SVG(<svg width="375" height="300">
<g class="x axis" transform="translate(0,250)">
  <path class="domain" stroke="#000" fill="none" d="M40,0H340"/>
  <line stroke="#000" x1="40" x2="40" y2="6"/><line stroke="#000" x1="115" x2="115" y2="6"/><line stroke="#000" x1="190" x2="190" y2="6"/>
  <line stroke="#000" x1="265" x2="265" y2="6"/><line stroke="#000" x1="340" x2="340" y2="6"/>
  <text x="40" y="9" text-anchor="middle" dominant-baseline="hanging">0</text>
  <text x="115" y="9" text-anchor="middle" dominant-baseline="hanging">25</text>
  <text x="190" y="9" text-anchor="middle" dominant-baseline="hanging">50</text>
  <text x="265" y="9" text-anchor="middle" dominant-baseline="hanging">75</text>
  <text x="340" y="9" text-anchor="middle" dominant-baseline="hanging">100</text>
</g>
<g class="y axis" transform="translate(40,0)">
  <path class="domain" stroke="#000" fill="none" d="M0,50V250"/>
  <line stroke="#000" x2="-6" y1="75" y2="75"/><line stroke="#000" x2="-6" y1="125" y2="125"/><line stroke="#000" x2="-6" y1="175" y2="175"/><line stroke="#000" x2="-6" y1="225" y2="225"/>
  <text x="-9" y="75" text-anchor="end" dominant-baseline="middle">A</text>
  <text x="-9" y="125" text-anchor="end" dominant-baseline="middle">B</text>
  <text x="-9" y="175" text-anchor="end" dominant-baseline="middle">C</text>
  <text x="-9" y="225" text-anchor="end" dominant-baseline="middle">D</text>
</g>
<rect class="bar" x="40" y="60" width="120" height="30"/><rect class="bar" x="40" y="110" width="60" height="30"/>
<rect class="bar" x="40" y="160" width="300" height="30"/><rect class="bar" x="40" y="210" width="210" height="30"/>
</svg>)SVG";

double max_layout_difference(const DeclarativeSpec& a, const DeclarativeSpec& b) {
    const Layout la = compute_layout(a), lb = compute_layout(b);
    if (la.slots.size() != lb.slots.size()) return INFINITY;
    double worst = 0;
    for (std::size_t i = 0; i < la.slots.size(); ++i) {
        const Rect2D &x = la.slots[i].box, &y = lb.slots[i].box;
        if (la.slots[i].hidden != lb.slots[i].hidden || x.empty() != y.empty()) return INFINITY;
        if (x.empty()) continue;
        worst = std::max({worst, std::abs(x.x_min - y.x_min), std::abs(x.x_max - y.x_max), std::abs(x.y_min - y.y_min),
                          std::abs(x.y_max - y.y_max)});
    }
    return worst;
}

std::string rendered(const DeclarativeSpec& s) { return svg::serialize(render_spec(s)); }

}  // namespace

TEST_CASE("catalogue has 23 stable actions") {
    const auto& cat = action_catalog();
    std::size_t counts[6] = {};
    for (std::size_t i = 0; i < kActionCount; ++i) {
        CHECK(cat[i].id == i);
        ++counts[static_cast<int>(cat[i].category)];
    }
    CHECK(counts[0] == 8);
    CHECK(counts[1] == 8);
    CHECK(counts[2] == 2);
    CHECK(counts[3] == 2);
    CHECK(counts[4] == 1);
    CHECK(counts[5] == 2);
    CHECK(action_label(4) == "A4(y-range-min \xE2\x88\x92" "5)");
    CHECK(action_label(21) == "A21(place-labels)");
    CHECK_THROWS_AS(action_label(23), Error);
    const auto spec = build_spec_from_svg(kHandChart);
    CHECK_THROWS_AS(apply_action(spec, 23, 0), Error);
}

TEST_CASE("global scale actions move range ends by delta") {
    const auto spec = build_spec_from_svg(kHandChart);
    CHECK(spec.x_scale.range_min == doctest::Approx(40));
    CHECK(spec.x_scale.range_max == doctest::Approx(340));
    const auto a0 = apply_action(spec, 0, 1);
    CHECK(a0.x_scale.range_min == doctest::Approx(35));
    CHECK(a0.x_scale.range_max == doctest::Approx(340));
    CHECK(apply_action(spec, 3, 1).x_scale.range_max == doctest::Approx(345));
    CHECK(apply_action(spec, 4, 0).y_scale.range_min == doctest::Approx(spec.y_scale.range_min - 5));
    CHECK(apply_action(spec, 7, 0).y_scale.range_max == doctest::Approx(spec.y_scale.range_max + 5));
}

TEST_CASE("adding a tick regenerates round ticks") {
    const auto spec = build_spec_from_svg(kHandChart);
    REQUIRE(spec.axis(AxisId::X));
    CHECK(spec.axis(AxisId::X)->tick_count == 5);
    const auto more = apply_action(spec, 19, 1);
    CHECK(more.axis(AxisId::X)->tick_count == 6);
    const auto doc = render_spec(more);
    std::vector<std::string> labels;
    std::vector<double> centres;
    for (auto id : doc.visible_leaves()) {
        const auto& e = doc.at(id);
        if (e.kind != svg::ElementKind::Text || !e.parent || doc.at(*e.parent).attribute("class") == nullptr) continue;
        if (*doc.at(*e.parent).attribute("class") != "x axis") continue;
        labels.push_back(element_text(e));
        centres.push_back(svg::compute_bbox(doc, id).x_center());
    }
    CHECK(labels == std::vector<std::string>{"0", "20", "40", "60", "80", "100"});
    REQUIRE(centres.size() == 6);
    for (std::size_t k = 0; k < 6; ++k) CHECK(centres[k] == doctest::Approx(40 + 60.0 * static_cast<double>(k)));
    const auto back = apply_action(more, 18, 1);
    CHECK(rendered(back) == rendered(spec));
    // Two ticks minimum.
    auto fewer = spec;
    for (int i = 0; i < 6; ++i) fewer = apply_action(fewer, 18, 1);
    CHECK(fewer.axis(AxisId::X)->tick_count == 2);
}

TEST_CASE("nice tick values") {
    CHECK(nice_ticks(0, 100, 6) == std::vector<double>{0, 20, 40, 60, 80, 100});
    CHECK(nice_ticks(0, 100, 7) == std::vector<double>{0, 20, 40, 60, 80, 100});
    CHECK(nice_ticks(0, 100, 11) == std::vector<double>{0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100});
    CHECK(nice_ticks(0, 1, 3) == std::vector<double>{0, 0.5, 1});
    CHECK(nice_ticks(3, 47, 5) == std::vector<double>{10, 20, 30, 40});
    const auto t = nice_ticks(0, 100, 7);
    for (double v : t) CHECK(v == std::round(v));
}

TEST_CASE("tick edits keep other groups' wrapped lines") {
    const auto recipes = sample_recipes(40, 3, default_mix());
    int checked = 0;
    for (const auto& r : recipes) {
        if (!r.title) continue;
        const auto spec = build_spec_from_svg(generate(r).svg);
        const auto top = state_index(Issue::TopOutOfViewport, ElementClass::Title);
        const auto wrapped = apply_action(spec, 22, top);
        const auto ticked = apply_action(wrapped, 18, top);
        for (std::size_t gi = 0; gi < wrapped.groups.size(); ++gi) {
            if (wrapped.groups[gi].cls != ElementClass::Title) continue;
            for (std::size_t i = 0; i < wrapped.groups[gi].member_state.size(); ++i)
                CHECK(wrapped.groups[gi].member_state[i].lines == ticked.groups[gi].member_state[i].lines);
        }
        ++checked;
    }
    CHECK(checked > 5);
}

TEST_CASE("discrete axes thin out their categories") {
    ChartRecipe r;
    r.categories = 12;
    auto spec = build_spec_from_svg(generate(r).svg);
    const auto fewer = apply_action(spec, 18, 1);
    const auto* a = fewer.axis(AxisId::X);
    CHECK(a->tick_count == 11);
    std::size_t hidden = 0;
    for (const auto& m : fewer.groups[*a->label_group].member_state) hidden += m.hidden;
    CHECK(hidden == 1);
    CHECK(fewer.x_scale.categories.size() == 12);
    CHECK(rendered(apply_action(fewer, 19, 1)) == rendered(spec));
    CHECK(rendered(apply_action(spec, 19, 1)) == rendered(spec));  // capped at the category count
}

TEST_CASE("increment and decrement pairs cancel") {
    for (const auto& recipe : sample_recipes(12, 8, default_mix())) {
        const auto spec = build_spec_from_svg(generate(recipe).svg);
        for (std::size_t state : {std::size_t{0}, std::size_t{1}, std::size_t{18}, std::size_t{19}, std::size_t{21},
                                  std::size_t{24}, std::size_t{27}}) {
            for (std::size_t a = 0; a < 20; a += 2) {
                for (int order = 0; order < 2; ++order) {
                    const std::size_t first = order ? a + 1 : a, second = order ? a : a + 1;
                    const auto once = apply_action(spec, first, state);
                    if (max_layout_difference(once, spec) == 0 && rendered(once) == rendered(spec)) continue;  // blocked
                    const auto twice = apply_action(once, second, state);
                    CHECK_MESSAGE(max_layout_difference(twice, spec) < 1e-9, "A", first, "/A", second, " in ", state_name(state));
                }
            }
        }
    }
}

TEST_CASE("actions preserve the encoding and stay within their class") {
    std::mt19937_64 rng(17);
    for (const auto& recipe : sample_recipes(10, 12, default_mix())) {
        auto spec = build_spec_from_svg(generate(recipe).svg);
        const auto x0 = spec.x_scale, y0 = spec.y_scale;
        std::size_t marks = 0;
        for (const auto& g : spec.groups) marks += g.cls == ElementClass::Mark ? g.members.size() : 0;
        for (int step = 0; step < 40; ++step) {
            const std::size_t state = rng() % kStateCount;
            const std::size_t action = rng() % kActionCount;
            auto next = apply_action(spec, action, state);
            const auto cls = state_at(state).cls;
            const bool local = (action >= 8 && action <= 17) || action >= 20;
            if (local) {
                for (std::size_t g = 0; g < spec.groups.size(); ++g) {
                    if (cls && spec.groups[g].cls == *cls) continue;
                    const auto& a = spec.groups[g];
                    const auto& b = next.groups[g];
                    CHECK(a.font_size == b.font_size);
                    CHECK(a.members == b.members);
                    CHECK(spec_to_json(spec)["groups"][g] == spec_to_json(next)["groups"][g]);
                }
            }
            spec = std::move(next);
            CHECK(spec.x_scale.variant == x0.variant);
            CHECK(spec.x_scale.categories == x0.categories);
            CHECK(spec.x_scale.domain_min == x0.domain_min);
            CHECK(spec.y_scale.domain_max == y0.domain_max);
            std::size_t m = 0;
            for (const auto& g : spec.groups) m += g.cls == ElementClass::Mark ? g.members.size() : 0;
            CHECK(m == marks);
        }
        (void)render_spec(spec);
    }
}

TEST_CASE("anchor switching flips to the opposite side and back") {
    const auto spec = build_spec_from_svg(kHandChart);
    const std::size_t axis_state = state_index(Issue::OverlappingText, ElementClass::Axis);
    const auto* xl = &spec.groups[*spec.axis(AxisId::X)->label_group];
    REQUIRE(xl->layout.vertical);
    CHECK(xl->layout.vertical->self == AnchorPosition::Top);
    const auto once = apply_action(spec, 20, axis_state);
    const auto& v1 = *once.groups[xl->id].layout.vertical;
    CHECK(v1.self == AnchorPosition::Bottom);
    CHECK(v1.target == AnchorPosition::Top);
    CHECK(v1.offset == doctest::Approx(-xl->layout.vertical->offset));
    const auto layout = compute_layout(once);
    const auto& tick = layout.slots[once.slot_of(once.groups[*once.axis(AxisId::X)->tick_group].members[0])].box;
    const auto& label = layout.slots[once.slot_of(xl->members[0])].box;
    CHECK(label.y_max <= tick.y_min);
    const auto twice = apply_action(once, 20, axis_state);
    CHECK(max_layout_difference(twice, spec) < 1e-9);
    CHECK(rendered(apply_action(spec, 20, 0)) == rendered(spec));  // global state: no class to act on
}

TEST_CASE("place_labels removes overlap") {
    ChartRecipe r;
    r.categories = 12;
    r.bar_labels = true;
    r.defects = {{DefectKind::Overlap, ElementClass::Label, 0}};
    const auto spec = build_spec_from_svg(generate(r).svg);
    const auto before = detect_state(spec);
    const std::size_t s = state_index(Issue::OverlappingText, ElementClass::Label);
    REQUIRE(before.cost[s] > 0);
    const auto placed = place_labels(spec, ElementClass::Label);
    const auto after = detect_state(placed);
    CHECK(after.cost[s] == 0);
    std::size_t visible = 0;
    for (const auto& g : placed.groups)
        if (g.cls == ElementClass::Label)
            for (const auto& m : g.member_state) visible += !m.hidden;
    CHECK(visible >= 2);

    const auto clean = build_spec_from_svg(generate(ChartRecipe{}).svg);
    CHECK(rendered(place_labels(clean, ElementClass::Axis)) == rendered(clean));
}

TEST_CASE("place_labels does not hide labels that only overflow the viewport") {
    for (const auto& r : sample_recipes(40, 9, default_mix())) {
        const auto spec = build_spec_from_svg(generate(r).svg);
        for (auto cls : {ElementClass::Axis, ElementClass::Label}) {
            const auto out = place_labels(spec, cls);
            if (cost_overlap(spec, compute_layout(spec), cls) > 0) continue;
            for (std::size_t gi = 0; gi < out.groups.size(); ++gi)
                for (std::size_t i = 0; i < out.groups[gi].member_state.size(); ++i)
                    CHECK(out.groups[gi].member_state[i].hidden == spec.groups[gi].member_state[i].hidden);
        }
    }
}

TEST_CASE("place_labels strictly decreases overlap on the corpus") {
    for (const auto& recipe : sample_recipes(40, 2, default_mix())) {
        const auto spec = build_spec_from_svg(generate(recipe).svg);
        for (auto cls : {ElementClass::Axis, ElementClass::Legend, ElementClass::Label}) {
            const auto layout = compute_layout(spec);
            const double before = cost_overlap(spec, layout, cls);
            const auto out = place_labels(spec, cls);
            const double after = cost_overlap(out, compute_layout(out), cls);
            if (before > 0) CHECK(after < before);
            else CHECK(after == 0);
        }
    }
}

TEST_CASE("greedy word wrap") {
    const double w8 = 8 * 0.6 * 10;
    CHECK(wrap_words("Monthly Active Users", w8, 10) == std::vector<std::string>{"Monthly", "Active", "Users"});
    CHECK(wrap_words("Sales", w8, 10) == std::vector<std::string>{"Sales"});
    CHECK(wrap_words("Pneumonoultramicroscopicsilico", w8, 10) == std::vector<std::string>{"Pneumonoultramicroscopicsilico"});
    CHECK(wrap_words("a b c d", 3 * 0.6 * 10, 10) == std::vector<std::string>{"a b", "c d"});
}

TEST_CASE("wrap_text splits long axis labels into stacked lines") {
    std::string svg = kHandChart;
    svg.replace(svg.find(">A<"), 3, ">Alpha Beta Gamma<");
    const auto spec = build_spec_from_svg(svg);
    const auto wrapped = wrap_text(spec, ElementClass::Axis);
    const auto& labels = wrapped.groups[*wrapped.axis(AxisId::Y)->label_group];
    REQUIRE(labels.member_state[0].lines.has_value());
    CHECK(*labels.member_state[0].lines == std::vector<std::string>{"Alpha", "Beta", "Gamma"});
    CHECK_FALSE(labels.member_state[1].lines.has_value());
    const auto layout = compute_layout(wrapped);
    const auto doc = render_spec(wrapped, layout);
    for (std::size_t s = 0; s < wrapped.slot_count(); ++s) {
        const auto& geo = wrapped.slot_geometry(s);
        const Rect2D got = svg::compute_bbox(doc, geo.element);
        CHECK(std::abs(got.y_min - layout.slots[s].box.y_min) < 0.01);
        CHECK(std::abs(got.y_max - layout.slots[s].box.y_max) < 0.01);
        CHECK(std::abs(got.x_max - layout.slots[s].box.x_max) < 0.01);
    }
    CHECK(svg::compute_bbox(doc, labels.members[0]).height() == doctest::Approx(3 * 1.2 * 16));
    const auto again = wrap_text(wrapped, ElementClass::Axis);
    CHECK(rendered(again) == rendered(wrapped));
}
