#include <doctest.h>

#include <sstream>

#include "chartfix/corpus_gen.hpp"
#include "chartfix/deconstructor.hpp"
#include "chartfix/error.hpp"
#include "chartfix/trainer.hpp"

using namespace chartfix;
using namespace chartfix::corpus;

namespace {

std::vector<TrainingChart> small_corpus(std::size_t n, std::uint64_t seed) {
    std::vector<TrainingChart> out;
    const auto recipes = sample_recipes(n, seed, default_mix());
    for (std::size_t i = 0; i < recipes.size(); ++i)
        out.push_back({"c" + std::to_string(i), build_spec_from_svg(generate(recipes[i]).svg)});
    return out;
}

}  // namespace

TEST_CASE("checkpoints are logarithmic") {
    CHECK(default_checkpoints(1000) == std::vector<std::size_t>{1, 2, 5, 10, 20, 50, 100, 200, 500, 1000});
    CHECK(default_checkpoints(300) == std::vector<std::size_t>{1, 2, 5, 10, 20, 50, 100, 200, 300});
}

TEST_CASE("empty corpus is rejected") {
    TrainConfig cfg;
    try {
        train({}, cfg);
        FAIL("expected EmptyCorpus");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyCorpus);
    }
}

TEST_CASE("zero budget returns the zero policy") {
    TrainConfig cfg;
    cfg.budget = 0;
    cfg.runs = 1;
    cfg.eval_max_steps = 5;
    const auto res = train(small_corpus(3, 1), cfg);
    for (const auto& row : res.runs[0].policy.theta)
        for (double v : row) CHECK(v == 0.0);
    REQUIRE(res.runs[0].metrics.size() == 1);
    CHECK(res.runs[0].metrics[0].step == 0);
}

TEST_CASE("clean charts are solved at zero steps") {
    std::vector<TrainingChart> clean;
    for (auto kind : {ChartKind::Bar, ChartKind::Line, ChartKind::Scatter}) {
        ChartRecipe r;
        r.kind = kind;
        clean.push_back({"clean", build_spec_from_svg(generate(r).svg)});
    }
    const auto report = evaluate(clean, Policy{}, 50, 3);
    CHECK(report.solve_rate(0) == 1.0);
    for (const auto& c : report.charts) CHECK(c.steps == 0);
}

TEST_CASE("training is reproducible and metrics are consistent") {
    const auto charts = small_corpus(12, 4);
    TrainConfig cfg;
    cfg.runs = 2;
    cfg.budget = 200;
    cfg.eval_max_steps = 100;
    cfg.seed = 5;
    const auto a = train(charts, cfg);
    const auto b = train(charts, cfg);
    for (std::size_t r = 0; r < 2; ++r) {
        CHECK(a.runs[r].policy.theta == b.runs[r].policy.theta);
        CHECK(a.runs[r].steps_used == 200);
        CHECK(metrics_csv(a.runs[r].metrics) == metrics_csv(b.runs[r].metrics));
        const auto& rep = a.runs[r].eval;
        std::size_t solved = 0;
        for (const auto& c : rep.charts) solved += c.solved;
        CHECK(rep.solve_rate() == doctest::Approx(static_cast<double>(solved) / static_cast<double>(charts.size())));
        double last = -1;
        for (const auto& m : a.runs[r].metrics) {
            CHECK(m.solve_rate_pct >= last);
            last = m.solve_rate_pct;
            CHECK(m.normalized_return_pct <= 100.0 + 1e-9);
        }
    }
    CHECK(a.runs[0].policy.theta != a.runs[1].policy.theta);
    CHECK(metrics_csv(a.metrics()).rfind("run,step,normalized_return_pct,solve_rate_pct\n", 0) == 0);
}

TEST_CASE("evaluation is independent of thread count") {
    const auto charts = small_corpus(10, 6);
    Policy p;
    p.theta[0][4] = 3;
    const auto one = evaluate(charts, p, 80, 9, {}, {}, 1);
    const auto many = evaluate(charts, p, 80, 9, {}, {}, 4);
    CHECK(to_json(one) == to_json(many));
}

TEST_CASE("heat map equals the policy probabilities") {
    Policy p;
    auto cells = export_policy_heatmap(p);
    REQUIRE(cells.size() == kStateCount * kActionCount);
    for (const auto& c : cells) CHECK(c.probability == doctest::Approx(1.0 / 23).epsilon(1e-12));
    reinforce_update(p, 0, 4, 0.7);
    cells = export_policy_heatmap(p);
    for (std::size_t s = 0; s < kStateCount; ++s) {
        const Row probs = action_probs(p, s);
        double sum = 0;
        for (std::size_t a = 0; a < kActionCount; ++a) {
            CHECK(cells[s * kActionCount + a].probability == probs[a]);
            CHECK(cells[s * kActionCount + a].state == state_name(s));
            sum += cells[s * kActionCount + a].probability;
        }
        CHECK(std::abs(sum - 1.0) < 1e-9);
    }
    const auto csv = heatmap_csv(cells);
    CHECK(csv.rfind("state,action,probability\n", 0) == 0);
    std::istringstream lines(csv);
    std::size_t n = 0;
    for (std::string l; std::getline(lines, l);) ++n;
    CHECK(n == 1 + kStateCount * kActionCount);
}
