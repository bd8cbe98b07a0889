#include <doctest.h>

#include <filesystem>
#include <set>

#include "chartfix/corpus_gen.hpp"
#include "chartfix/error.hpp"
#include "chartfix/svg.hpp"

using namespace chartfix;
using namespace chartfix::corpus;

namespace {

Rect2D members_box(const svg::Document& doc, const ManifestGroup& g) {
    Rect2D r;
    for (const auto& id : g.members) r = r.united(svg::compute_bbox(doc, *doc.find_by_xml_id(id)));
    return r;
}

Rect2D content_box(const svg::Document& doc, const Manifest& m) {
    Rect2D r;
    for (const auto& g : m.groups) r = r.united(members_box(doc, g));
    return r;
}

}  // namespace

TEST_CASE("generate is deterministic and ids resolve") {
    ChartRecipe r;
    r.categories = 12;
    r.bar_labels = true;
    r.seed = 42;
    const auto a = generate(r);
    const auto b = generate(r);
    CHECK(a.svg == b.svg);
    const auto doc = svg::parse_svg(a.svg);
    CHECK(doc.size() == a.manifest.element_count);
    for (const auto& g : a.manifest.groups)
        for (const auto& id : g.members) CHECK_MESSAGE(doc.find_by_xml_id(id).has_value(), id);
}

TEST_CASE("clean recipes stay inside the viewport and margins") {
    for (auto kind : {ChartKind::Bar, ChartKind::GroupedBar, ChartKind::Line, ChartKind::Scatter}) {
        ChartRecipe r;
        r.kind = kind;
        r.series = kind == ChartKind::Bar ? 1 : 2;
        r.grid = true;
        r.stylesheet = kind == ChartKind::Line;
        const auto chart = generate(r);
        const auto doc = svg::parse_svg(chart.svg);
        const Rect2D box = content_box(doc, chart.manifest);
        CHECK(box.x_min == doctest::Approx(12).epsilon(1e-4));
        CHECK(box.x_max == doctest::Approx(363).epsilon(1e-4));
        CHECK(box.y_min == doctest::Approx(12).epsilon(1e-4));
    }
}

TEST_CASE("right overflow puts marks past the edge by the magnitude") {
    ChartRecipe r;
    r.categories = 12;
    r.defects = {{DefectKind::RightOverflow, ElementClass::Mark, 30}};
    const auto chart = generate(r);
    const auto doc = svg::parse_svg(chart.svg);
    Rect2D marks;
    for (const auto& g : chart.manifest.groups)
        if (g.kind == GroupKind::Shape) marks = marks.united(members_box(doc, g));
    CHECK(marks.x_max - 375 == doctest::Approx(30).epsilon(1e-4));
    REQUIRE(chart.manifest.defects.size() == 1);
    CHECK(chart.manifest.defects[0].expected_cost == doctest::Approx(30));
}

TEST_CASE("font defect lowers the axis label size") {
    ChartRecipe r;
    r.axis_titles = false;
    r.defects = {{DefectKind::FontSize, ElementClass::Axis, 4}};
    const auto chart = generate(r);
    CHECK(chart.manifest.defects[0].expected_cost == doctest::Approx(4));
    const auto doc = svg::parse_svg(chart.svg);
    CHECK(doc.at(*doc.find_by_xml_id("x-label-0")).font_size() == doctest::Approx(8));
}

TEST_CASE("invalid recipes are rejected") {
    ChartRecipe r;
    r.categories = 0;
    CHECK_THROWS_AS(generate(r), Error);
    ChartRecipe both;
    both.defects = {{DefectKind::TopMargin, ElementClass::Axis, 10}, {DefectKind::TopOverflow, ElementClass::Title, 10}};
    CHECK_THROWS_AS(generate(both), Error);
}

TEST_CASE("default corpus mix") {
    const auto recipes = sample_recipes(81, 7, default_mix());
    REQUIRE(recipes.size() == 81);
    std::size_t multi = 0;
    std::set<DefectKind> kinds;
    std::set<GroupKind> groups;
    for (const auto& r : recipes) {
        std::size_t n = 0;
        for (const auto& d : r.defects) {
            if (d.kind == DefectKind::DistortedRatio) continue;
            ++n;
            kinds.insert(d.kind);
        }
        multi += n >= 2;
        for (const auto& g : generate(r).manifest.groups) groups.insert(g.kind);
    }
    CHECK(multi * 3 >= recipes.size());
    CHECK(kinds.count(DefectKind::FontSize) == 1);
    CHECK(kinds.count(DefectKind::Overlap) == 1);
    CHECK(kinds.count(DefectKind::TopMargin) + kinds.count(DefectKind::LeftMargin) +
              kinds.count(DefectKind::RightMargin) >= 1);
    CHECK(kinds.count(DefectKind::TopOverflow) + kinds.count(DefectKind::LeftOverflow) +
              kinds.count(DefectKind::RightOverflow) >= 1);
    CHECK(groups.size() == kGroupKindCount);
}

TEST_CASE("corpus files round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "chartfix_corpus_test";
    std::filesystem::remove_all(dir);
    write_corpus(dir, 5, 3, default_mix());
    const auto first = load_corpus(dir);
    REQUIRE(first.size() == 5);
    REQUIRE(first[0].manifest.has_value());
    const auto again = generate(first[0].manifest->recipe);
    CHECK(again.svg == first[0].svg);
    CHECK(to_json(*first[0].manifest) == to_json(again.manifest));
    std::filesystem::remove_all(dir);
}
