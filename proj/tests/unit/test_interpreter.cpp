#include <doctest.h>

#include <algorithm>
#include <random>

#include "chartfix/corpus_gen.hpp"
#include "chartfix/deconstructor.hpp"
#include "chartfix/interpreter.hpp"

using namespace chartfix;
using namespace chartfix::corpus;

TEST_CASE("state catalogue") {
    CHECK(kStateCount == 28);
    CHECK(state_name(0) == "TopMargin");
    CHECK(state_name(1) == "LeftMargin");
    CHECK(state_name(2) == "RightMargin");
    CHECK(state_name(3) == "LeftOutOfViewport@Title");
    CHECK(state_name(13) == "RightOutOfViewport@Mark");
    CHECK(state_name(18) == "FontSize@Title");
    CHECK(state_name(27) == "OverlappingText@Label");
    for (std::size_t i = 0; i < kStateCount; ++i) {
        const auto s = state_at(i);
        CHECK(state_index(s.issue, s.cls) == i);
        CHECK(state_from_name(state_name(i)) == i);
        CHECK(s.cls.has_value() == (scope_of(s.issue) == IssueScope::Local));
    }
}

TEST_CASE("geometric cost examples") {
    const svg::Viewport vp;
    CHECK(out_of_viewport_length({{300, 10, 400, 20}}, vp, Side::Right) == doctest::Approx(25));
    CHECK(out_of_viewport_length({{10, 10, 20, 20}}, vp, Side::Left) == 0);
    CHECK(out_of_viewport_length({{10, -8, 20, 20}}, vp, Side::Top) == doctest::Approx(8));
    CHECK(out_of_viewport_length({{10, 10, 20, 2000}}, vp, Side::Top) == 0);

    Thresholds t;
    CHECK(t.margin(Side::Left, vp) == doctest::Approx(37.5));
    CHECK(std::max(0.0, margin_length({{80, 100, 300, 200}}, vp, Side::Left) - t.margin(Side::Left, vp)) == doctest::Approx(42.5));
    CHECK(std::max(0.0, margin_length({{37.5, 100, 300, 200}}, vp, Side::Left) - 37.5) == 0);
    CHECK(std::max(0.0, margin_length({{-20, 100, 300, 200}}, vp, Side::Left) - 37.5) == 0);

    CHECK(std::abs(mean_font_deficit({8, 12, 16}, 12) - 4.0 / 3.0) < 1e-9);
    CHECK(mean_font_deficit({12, 14}, 12) == 0);
    CHECK(mean_font_deficit({6}, 12) == doctest::Approx(6));

    CHECK(overlap_area({Rect2D::from_xywh(0, 0, 20, 10), Rect2D::from_xywh(10, 0, 20, 10)}) == doctest::Approx(100));
    CHECK(overlap_area({Rect2D::from_xywh(0, 0, 20, 10), Rect2D::from_xywh(30, 0, 20, 10)}) == 0);
    const Rect2D b = Rect2D::from_xywh(5, 5, 20, 10);
    CHECK(overlap_area({b, b, b}) == doctest::Approx(600));
}

TEST_CASE("overlap is invariant under reordering") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0, 100);
    std::vector<Rect2D> boxes;
    for (int i = 0; i < 12; ++i) boxes.push_back(Rect2D::from_xywh(u(rng), u(rng), 5 + u(rng) / 5, 5 + u(rng) / 10));
    const double base = overlap_area(boxes);
    for (int k = 0; k < 10; ++k) {
        std::shuffle(boxes.begin(), boxes.end(), rng);
        CHECK(overlap_area(boxes) == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("deleting a small text never beats raising it") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(4, 20);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> sizes(2 + trial % 6);
        for (auto& s : sizes) s = u(rng);
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            if (sizes[i] >= 12) continue;
            auto raised = sizes;
            raised[i] = 12;
            auto deleted = sizes;
            deleted.erase(deleted.begin() + static_cast<long>(i));
            CHECK(mean_font_deficit(deleted, 12) >= mean_font_deficit(raised, 12) - 1e-12);
        }
    }
}

TEST_CASE("seeded defects are measured at their magnitude") {
    std::size_t checked = 0;
    for (const auto& recipe : sample_recipes(60, 21, default_mix())) {
        const auto chart = generate(recipe);
        const auto spec = build_spec_from_svg(chart.svg);
        const auto report = detect_state(spec);
        bool any = false;
        for (const auto& d : chart.manifest.defects) {
            if (d.kind == DefectKind::DistortedRatio) continue;
            any = true;
            std::size_t state = 0;
            switch (d.kind) {
                case DefectKind::TopMargin: state = 0; break;
                case DefectKind::LeftMargin: state = 1; break;
                case DefectKind::RightMargin: state = 2; break;
                case DefectKind::LeftOverflow: state = state_index(Issue::LeftOutOfViewport, d.target); break;
                case DefectKind::RightOverflow: state = state_index(Issue::RightOutOfViewport, d.target); break;
                case DefectKind::TopOverflow: state = state_index(Issue::TopOutOfViewport, d.target); break;
                case DefectKind::FontSize: state = state_index(Issue::FontSize, d.target); break;
                case DefectKind::Overlap: state = state_index(Issue::OverlappingText, d.target); break;
                default: break;
            }
            const double tol = d.kind == DefectKind::Overlap ? 2.0 : 1.0;
            CHECK_MESSAGE(std::abs(report.cost[state] - d.expected_cost) <= tol, state_name(state), " ", report.cost[state],
                          " vs ", d.expected_cost);
            CHECK(report.cost[state] > 0);
            ++checked;
        }
        if (!any) CHECK(report.solved());
    }
    CHECK(checked > 40);
}

TEST_CASE("global issues come before local ones") {
    ChartRecipe r;
    r.categories = 12;
    r.label_chars = 10;
    r.defects = {{DefectKind::LeftMargin, ElementClass::Axis, 40}, {DefectKind::Overlap, ElementClass::Axis, 0}};
    const auto spec = build_spec_from_svg(generate(r).svg);
    const auto report = detect_state(spec);
    REQUIRE(report.active_state.has_value());
    CHECK(state_name(*report.active_state) == "LeftMargin");
    CHECK(report.cost[state_index(Issue::OverlappingText, ElementClass::Axis)] > 0);
    CHECK(report.total == doctest::Approx(std::accumulate(report.cost.begin(), report.cost.end(), 0.0)));
}

TEST_CASE("height compression never lowers out-of-viewport cost") {
    for (const auto& recipe : sample_recipes(30, 4, default_mix())) {
        auto spec = build_spec_from_svg(generate(recipe).svg);
        const auto before = detect_state(spec);
        for (int k = 0; k < 8; ++k) {
            spec.y_scale.range_max -= 5;  // squash the plot from the bottom
            const auto after = detect_state(spec);
            for (std::size_t s = 3; s < 18; ++s) {
                const auto st = state_at(s);
                if (st.issue == Issue::TopOutOfViewport) continue;
                CHECK(after.cost[s] >= before.cost[s] - 1e-9);
            }
        }
    }
}
