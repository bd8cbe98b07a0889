#include <doctest.h>

#include <cmath>
#include <random>

#include "chartfix/corpus_gen.hpp"
#include "chartfix/deconstructor.hpp"
#include "chartfix/error.hpp"
#include "chartfix/policy.hpp"

using namespace chartfix;
using namespace chartfix::corpus;

namespace {

double row_sum(const Row& p) {
    double s = 0;
    for (double v : p) s += v;
    return s;
}

DeclarativeSpec top_margin_chart(double magnitude) {
    ChartRecipe r;
    r.kind = ChartKind::Bar;
    r.defects = {{DefectKind::TopMargin, ElementClass::Axis, magnitude}};
    return build_spec_from_svg(generate(r).svg);
}

}  // namespace

TEST_CASE("softmax of policy rows") {
    Policy p;
    for (double v : action_probs(p, 0)) CHECK(v == doctest::Approx(1.0 / 23).epsilon(1e-12));
    p.theta[5][0] = 1.0;
    const Row q = action_probs(p, 5);
    CHECK(q[0] == doctest::Approx(std::exp(1.0) / (std::exp(1.0) + 22)).epsilon(1e-12));
    CHECK(q[0] == doctest::Approx(0.1100).epsilon(1e-3));
    CHECK(std::abs(row_sum(q) - 1.0) < 1e-9);
    p.theta[6].fill(800.0);
    p.theta[6][3] = -800.0;
    const Row big = action_probs(p, 6);
    CHECK(std::abs(row_sum(big) - 1.0) < 1e-9);
    CHECK(std::isfinite(big[3]));
}

TEST_CASE("reinforce update on a zero row") {
    Policy p;
    reinforce_update(p, 2, 3, 0.2);
    CHECK(std::abs(p.theta[2][3] - 5 * 0.2 * 22.0 / 23) < 1e-12);
    CHECK(std::abs(p.theta[2][3] - 0.9565) < 1e-4);
    for (std::size_t a = 0; a < kActionCount; ++a)
        if (a != 3) CHECK(std::abs(p.theta[2][a] + 5 * 0.2 / 23) < 1e-12);
    for (std::size_t s = 0; s < kStateCount; ++s)
        if (s != 2)
            for (double v : p.theta[s]) CHECK(v == 0.0);

    Policy z;
    reinforce_update(z, 0, 0, 0.0);
    for (const auto& row : z.theta)
        for (double v : row) CHECK(v == 0.0);

    const double before = action_probs(p, 2)[7];
    reinforce_update(p, 2, 7, 0.3);
    CHECK(action_probs(p, 2)[7] > before);
}

TEST_CASE("reward is normalised cost reduction") {
    CHECK(compute_reward(80, 100, 100) == 0.2);
    CHECK(compute_reward(40, 40, 100) == 0.0);
    CHECK(compute_reward(0, 100, 100) == 1.0);
    CHECK(compute_reward(110, 100, 100) < 0.0);
    CHECK_THROWS_AS(compute_reward(1, 1, 0), Error);
}

TEST_CASE("deadlock penalty") {
    Policy p;
    penalize_deadlock(p, {{4, 9}});
    CHECK(std::abs(p.theta[4][9] + 0.005 * 22.0 / 23) < 1e-12);
    CHECK(std::abs(p.theta[4][9] + 0.004783) < 1e-6);
    CHECK(action_probs(p, 4)[9] < 1.0 / 23);

    Policy zero_beta;
    zero_beta.beta = 0.0;
    penalize_deadlock(zero_beta, {{4, 9}, {4, 2}});
    for (const auto& row : zero_beta.theta)
        for (double v : row) CHECK(v == 0.0);

    Policy once, thrice;
    penalize_deadlock(once, {{1, 1}});
    penalize_deadlock(once, {{1, 1}});
    penalize_deadlock(once, {{1, 1}});
    penalize_deadlock(thrice, {{1, 1}, {1, 1}, {1, 1}});
    for (std::size_t a = 0; a < kActionCount; ++a) CHECK(once.theta[1][a] == thrice.theta[1][a]);
    CHECK(thrice.theta[1][1] < 3 * -0.0047);
}

TEST_CASE("analytic log-softmax gradient matches central differences") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(-3, 3);
    std::uniform_int_distribution<std::size_t> s_of(0, kStateCount - 1), a_of(0, kActionCount - 1);
    const double h = 1e-5;
    double worst = 0;
    for (int probe = 0; probe < 200; ++probe) {
        Policy p;
        const std::size_t s = s_of(gen), a = a_of(gen);
        for (double& v : p.theta[s]) v = u(gen);
        const Row probs = action_probs(p, s);
        for (std::size_t j = 0; j < kActionCount; ++j) {
            Policy plus = p, minus = p;
            plus.theta[s][j] += h;
            minus.theta[s][j] -= h;
            const double fd = (log_prob(plus, s, a) - log_prob(minus, s, a)) / (2 * h);
            const double analytic = (j == a ? 1.0 : 0.0) - probs[j];
            worst = std::max(worst, std::abs(fd - analytic));
        }
        Policy g = p;
        apply_log_gradient(g, s, a, 1.0);
        for (std::size_t j = 0; j < kActionCount; ++j)
            CHECK(std::abs((g.theta[s][j] - p.theta[s][j]) - ((j == a ? 1.0 : 0.0) - probs[j])) < 1e-12);
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("sampling follows the distribution") {
    Row p{};
    p[4] = 0.75;
    p[20] = 0.25;
    Rng rng(3);
    int hits = 0;
    for (int i = 0; i < 4000; ++i) {
        const auto a = sample_action(p, rng);
        CHECK((a == 4 || a == 20));
        hits += a == 4;
    }
    CHECK(hits > 2800);
    CHECK(hits < 3200);
}

TEST_CASE("clean chart solves in zero steps") {
    ChartRecipe r;
    Policy p;
    const auto res = run_episode(p, build_spec_from_svg(generate(r).svg), {});
    CHECK(res.trace.status == Termination::Solved);
    CHECK(res.trace.steps.empty());
    CHECK(res.trace.initial_total == 0.0);
}

TEST_CASE("excess top margin is solved by shrinking the y range") {
    const auto spec = top_margin_chart(20);
    const auto before = detect_state(spec);
    REQUIRE(before.active_state == state_index(Issue::TopMargin));
    Policy p;
    p.theta[0][4] = 60.0;
    EpisodeConfig cfg;
    cfg.learn = false;
    const auto res = run_episode(p, spec, cfg);
    CHECK(res.trace.status == Termination::Solved);
    CHECK(res.trace.steps.size() <= 4);
    for (const auto& s : res.trace.steps) CHECK(s.action == 4);
    CHECK(detect_state(res.spec).solved());
}

TEST_CASE("episode traces are deterministic and rewards are consistent") {
    const auto recipes = sample_recipes(12, 5, default_mix());
    for (std::size_t i = 0; i < recipes.size(); ++i) {
        const auto spec = build_spec_from_svg(generate(recipes[i]).svg);
        EpisodeConfig cfg;
        cfg.max_steps = 150;
        cfg.seed = 100 + i;
        Policy a, b;
        const auto ra = run_episode(a, spec, cfg);
        const auto rb = run_episode(b, spec, cfg);
        REQUIRE(ra.trace.steps.size() == rb.trace.steps.size());
        for (std::size_t k = 0; k < ra.trace.steps.size(); ++k) {
            CHECK(ra.trace.steps[k].action == rb.trace.steps[k].action);
            CHECK(ra.trace.steps[k].reward == rb.trace.steps[k].reward);
        }
        CHECK(a.theta == b.theta);

        // Rewards reproduce from recorded costs, and telescope over each visit.
        std::size_t entry_idx = 0;
        double sum = 0;
        for (const auto& st : ra.trace.steps) {
            while (entry_idx + 1 < ra.trace.entries.size() && ra.trace.entries[entry_idx + 1].step < st.step) ++entry_idx;
            const auto& e = ra.trace.entries[entry_idx];
            CHECK(e.state == st.state);
            CHECK(st.reward == compute_reward(st.cost_after, st.cost_before, e.entry_cost));
            sum += st.reward;
            const bool leaves = !st.next_state || *st.next_state != st.state;
            if (leaves) {
                CHECK(std::abs(sum - (e.entry_cost - st.cost_after) / e.entry_cost) < 1e-9);
                if (!st.next_state) CHECK(std::abs(sum - 1.0) < 1e-9);
                sum = 0;
            }
        }
        for (std::size_t s = 0; s < kStateCount; ++s) CHECK(std::abs(row_sum(action_probs(a, s)) - 1.0) < 1e-9);
    }
}

TEST_CASE("revisiting a state triggers the penalty") {
    // Font deficit fix causes overlap, overlap fix reintroduces the deficit.
    ChartRecipe r;
    r.kind = ChartKind::Bar;
    r.categories = 10;
    r.bar_labels = true;
    r.defects = {{DefectKind::FontSize, ElementClass::Label, 4}};
    const auto spec = build_spec_from_svg(generate(r).svg);
    Policy p;
    p.theta[state_index(Issue::FontSize, ElementClass::Label)][16] = 50;
    p.theta[state_index(Issue::OverlappingText, ElementClass::Label)][17] = 50;
    EpisodeConfig cfg;
    cfg.max_steps = 40;
    const auto res = run_episode(p, spec, cfg);
    bool penalised = false;
    for (const auto& s : res.trace.steps) penalised |= s.penalty;
    if (res.trace.entries.size() > 2) CHECK(penalised);
}

TEST_CASE("policy and trace json round trip") {
    Policy p;
    reinforce_update(p, 3, 5, 0.4);
    const auto j = to_json(p);
    CHECK(j["state_names"].size() == kStateCount);
    CHECK(j["action_names"].size() == kActionCount);
    CHECK(j["format_version"] == 1);
    const Policy q = policy_from_json(j);
    CHECK(q.theta == p.theta);
    CHECK(q.alpha == p.alpha);
    auto bad = j;
    bad["theta"].erase(0);
    CHECK_THROWS_AS(policy_from_json(bad), Error);

    const auto res = run_episode(p, top_margin_chart(20), {});
    const auto tj = to_json(res.trace);
    const auto t = trace_from_json(tj);
    CHECK(t.steps.size() == res.trace.steps.size());
    CHECK(to_json(t) == tj);
    if (!t.steps.empty()) {
        const auto line = explain_step(t.steps.front());
        CHECK(line.rfind("step 1: state=TopMargin action=A", 0) == 0);
    }
}

TEST_CASE("a title wider than the viewport at the minimum font size is never solved") {
    const std::string word(60, 'W');
    const std::string svg =
        "<svg width=\"375\" height=\"300\"><text class=\"title\" x=\"187\" y=\"20\" font-size=\"12\" "
        "text-anchor=\"middle\">" + word + "</text>"
        "<g class=\"x axis\" font-size=\"12\" transform=\"translate(0,250)\"><path class=\"domain\" d=\"M40,0H340\"/>"
        "<text x=\"90\" y=\"9\" text-anchor=\"middle\">A</text><text x=\"190\" y=\"9\" text-anchor=\"middle\">B</text>"
        "<text x=\"290\" y=\"9\" text-anchor=\"middle\">C</text></g>"
        "<rect class=\"bar\" x=\"50\" y=\"60\" width=\"80\" height=\"190\"/>"
        "<rect class=\"bar\" x=\"150\" y=\"100\" width=\"80\" height=\"150\"/>"
        "<rect class=\"bar\" x=\"250\" y=\"150\" width=\"80\" height=\"100\"/></svg>";
    const auto spec = build_spec_from_svg(svg);
    REQUIRE_FALSE(detect_state(spec).solved());
    Policy p;
    EpisodeConfig cfg;
    cfg.max_steps = 300;
    const auto res = run_episode(p, spec, cfg);
    CHECK(res.trace.status == Termination::StepBudgetExhausted);
    CHECK(res.trace.steps.size() == 300);
    CHECK(res.trace.final_total > 0);
}
