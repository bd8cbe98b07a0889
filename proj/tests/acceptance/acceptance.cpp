// Acceptance checks. One PASS/FAIL line per criterion, details indented below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "chartfix/corpus_gen.hpp"
#include "chartfix/deconstructor.hpp"
#include "chartfix/interpreter.hpp"
#include "chartfix/layout.hpp"
#include "chartfix/trainer.hpp"
#include "oracle.hpp"

using namespace chartfix;
using namespace chartfix::corpus;

namespace {

// Tolerances.
constexpr std::size_t kCorpusSize = 81;
constexpr std::uint64_t kTrainSeed = 7;
constexpr std::uint64_t kHoldoutSeed = 8;
constexpr std::size_t kRuns = 5;
constexpr double kSolve100 = 0.85;
constexpr double kSolve1000 = 0.92;
constexpr double kGeneralizationGap = 0.10;
constexpr double kRuleProbability = 0.8;
constexpr std::size_t kRuleRuns = 4;
constexpr std::size_t kDeadlockSeeds = 20;
constexpr std::size_t kDeadlockBudget = 1000;
constexpr double kExactTol = 1e-9;
constexpr double kUpdateTol = 1e-6;
constexpr double kGeometryTol = 1.0;
constexpr double kManifestAccuracy = 0.95;
constexpr std::size_t kGradientProbes = 1000;
constexpr double kGradientTol = 1e-6;
constexpr std::size_t kPerfElements = 500;
constexpr std::size_t kPerfSteps = 100;
constexpr double kPerfSeconds = 1.0;

int failures = 0;

void verdict(int n, bool ok, const std::string& what) {
    std::printf("%s %d %s\n", ok ? "PASS" : "FAIL", n, what.c_str());
    std::fflush(stdout);
    failures += !ok;
}

void detail(const std::string& s) {
    std::printf("    %s\n", s.c_str());
    std::fflush(stdout);
}

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", 100 * v);
    return buf;
}

std::vector<TrainingChart> build_corpus(std::size_t n, std::uint64_t seed, const CorpusMix& mix) {
    std::vector<TrainingChart> out;
    std::size_t i = 0;
    for (const auto& r : sample_recipes(n, seed, mix))
        out.push_back({"chart_" + std::to_string(i++), build_spec_from_svg(generate(r).svg)});
    return out;
}

double mean(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / double(v.size());
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Raising the value labels past their minimum makes them collide, and shrinking
// them to clear the collision brings the font deficit back.
std::string oscillation_svg() {
    const int n = 8;
    const double x0 = 36, w = 332, band = w / n;
    std::string s = "<svg width=\"375\" height=\"300\">"
                    "<text class=\"title\" x=\"187\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">Quarterly sales</text>";
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<g class=\"x axis\" font-size=\"12\" transform=\"translate(0,250)\"><path class=\"domain\" stroke=\"#000\" "
                  "fill=\"none\" d=\"M%g,0H%g\"/>",
                  x0, x0 + w);
    s += buf;
    for (int i = 0; i < n; ++i) {
        const double c = x0 + band * (i + 0.5);
        std::snprintf(buf, sizeof buf,
                      "<line stroke=\"#000\" x1=\"%g\" x2=\"%g\" y2=\"6\"/><text x=\"%g\" y=\"9\" text-anchor=\"middle\" "
                      "dominant-baseline=\"hanging\">%c</text>",
                      c, c, c, "ABCDEFGH"[i]);
        s += buf;
    }
    std::snprintf(buf, sizeof buf,
                  "</g><g class=\"y axis\" font-size=\"12\" transform=\"translate(%g,0)\"><path class=\"domain\" "
                  "stroke=\"#000\" fill=\"none\" d=\"M0,50V250\"/>",
                  x0);
    s += buf;
    for (int v = 0; v <= 100; v += 25) {
        const int y = 250 - 2 * v;
        std::snprintf(buf, sizeof buf,
                      "<line stroke=\"#000\" x2=\"-6\" y1=\"%d\" y2=\"%d\"/><text x=\"-9\" y=\"%d\" text-anchor=\"end\" "
                      "dominant-baseline=\"middle\">%d</text>",
                      y, y, y, v);
        s += buf;
    }
    s += "</g>";
    for (int i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof buf, "<rect class=\"bar\" x=\"%g\" y=\"60\" width=\"%g\" height=\"190\"/>",
                      x0 + band * i + 3, band - 6);
        s += buf;
    }
    for (int i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof buf,
                      "<text class=\"value\" x=\"%g\" y=\"55\" font-size=\"8\" text-anchor=\"middle\">12,345</text>",
                      x0 + band * (i + 0.5));
        s += buf;
    }
    return s + "</svg>";
}

struct DeadlockArm {
    std::vector<double> steps;  // steps to solve, budget when exhausted
    std::size_t exhausted = 0;
    std::size_t penalties = 0;
};

DeadlockArm run_deadlock_arm(const DeclarativeSpec& spec, double beta, bool learn) {
    const std::size_t font_state = state_index(Issue::FontSize, ElementClass::Label);
    const std::size_t overlap_state = state_index(Issue::OverlappingText, ElementClass::Label);
    DeadlockArm arm;
    for (std::size_t seed = 0; seed < kDeadlockSeeds; ++seed) {
        Policy p;
        p.beta = beta;
        p.theta[font_state][16] = 3.0;
        p.theta[overlap_state][17] = 3.0;
        EpisodeConfig cfg;
        cfg.max_steps = kDeadlockBudget;
        cfg.seed = 1000 + seed;
        cfg.learn = learn;
        const auto res = run_episode(p, spec, cfg);
        arm.steps.push_back(double(res.trace.steps.size()));
        arm.exhausted += res.trace.status != Termination::Solved;
        for (const auto& s : res.trace.steps) arm.penalties += s.penalty;
    }
    return arm;
}

std::string describe(const DeadlockArm& a) {
    return "median " + std::to_string(median(a.steps)) + " steps, " + std::to_string(a.exhausted) + "/" +
           std::to_string(kDeadlockSeeds) + " exhausted, " + std::to_string(a.penalties) + " revisit penalties";
}

}  // namespace

int main() {
    const auto t_start = std::chrono::steady_clock::now();

    // Criteria 1-4 share one training on the acceptance corpus.
    const auto charts = build_corpus(kCorpusSize, kTrainSeed, default_mix());
    const auto holdout = build_corpus(kCorpusSize, kHoldoutSeed, holdout_mix());
    TrainConfig cfg;
    cfg.runs = kRuns;
    const auto trained = train(charts, cfg);

    {
        std::vector<double> at100, at1000;
        for (std::size_t r = 0; r < kRuns; ++r) {
            at100.push_back(trained.runs[r].eval.solve_rate(100));
            at1000.push_back(trained.runs[r].eval.solve_rate(1000));
            detail("run " + std::to_string(r) + ": " + pct(at100.back()) + " within 100, " + pct(at1000.back()) +
                   " within 1000, " + std::to_string(trained.runs[r].episodes) + " training episodes");
        }
        const double m100 = mean(at100), m1000 = mean(at1000);
        verdict(1, m100 >= kSolve100 && m1000 >= kSolve1000,
                "solve rate " + pct(m100) + " within 100 (>= " + pct(kSolve100) + "), " + pct(m1000) +
                    " within 1000 (>= " + pct(kSolve1000) + ")");
    }

    {
        std::vector<double> train_rate, held_rate;
        for (std::size_t r = 0; r < kRuns; ++r) {
            train_rate.push_back(trained.runs[r].eval.solve_rate());
            held_rate.push_back(evaluate(holdout, trained.runs[r].policy, cfg.eval_max_steps, evaluation_seed(cfg, r))
                                    .solve_rate());
        }
        const double gap = std::abs(mean(train_rate) - mean(held_rate));
        verdict(2, gap <= kGeneralizationGap + 1e-12,
                "held-out solve rate " + pct(mean(held_rate)) + " vs training " + pct(mean(train_rate)) + ", gap " +
                    pct(gap) + " (<= " + pct(kGeneralizationGap) + ")");
    }

    {
        struct Rule {
            std::size_t state;
            std::size_t first, last;
        };
        const Rule rules[] = {{0, 4, 7}, {1, 0, 3}, {2, 0, 3}};
        bool ok = true;
        for (const auto& rule : rules) {
            std::size_t good = 0;
            std::string argmaxes;
            for (const auto& run : trained.runs) {
                const Row p = action_probs(run.policy, rule.state);
                const auto best = std::size_t(std::max_element(p.begin(), p.end()) - p.begin());
                const bool hit = best >= rule.first && best <= rule.last &&
                                 action_catalog()[best].category == ActionCategory::GlobalScale &&
                                 p[best] >= kRuleProbability;
                good += hit;
                char buf[48];
                std::snprintf(buf, sizeof buf, " A%zu:%.3f", best, p[best]);
                argmaxes += buf;
            }
            ok &= good >= kRuleRuns;
            detail(state_name(rule.state) + ": " + std::to_string(good) + "/" + std::to_string(kRuns) + " runs," +
                   argmaxes);
        }
        verdict(3, ok, "margin states pick a matching-axis scale action with p >= 0.8 in >= 4 of 5 runs");
    }

    {
        bool ok = true;
        for (std::size_t r = 0; r < kRuns; ++r) {
            const auto zero = evaluate(charts, Policy{}, cfg.eval_max_steps, evaluation_seed(cfg, r));
            const double a = trained.runs[r].eval.solve_rate(100), b = zero.solve_rate(100);
            ok &= a > b;
            detail("run " + std::to_string(r) + ": trained " + pct(a) + " vs zero policy " + pct(b));
        }
        verdict(4, ok, "trained policy beats the zero policy at 100 steps in every run");
    }

    {
        const auto spec = build_spec_from_svg(oscillation_svg());
        const auto with_penalty = run_deadlock_arm(spec, 0.005, true);
        const auto without = run_deadlock_arm(spec, 0.0, true);
        const auto frozen = run_deadlock_arm(spec, 0.0, false);
        detail("beta 0.005, learning: " + describe(with_penalty));
        detail("beta 0, learning:     " + describe(without));
        detail("beta 0, frozen:       " + describe(frozen));
        const bool ok = median(with_penalty.steps) < median(without.steps) && without.exhausted >= 1;
        verdict(5, ok, "revisit penalty lowers median steps to solve and beta 0 exhausts at least one seed");
    }

    {
        bool ok = true;
        const double eq3 = mean_font_deficit({8, 12, 16}, 12);
        ok &= std::abs(eq3 - 4.0 / 3.0) <= kExactTol;
        Policy p;
        reinforce_update(p, 0, 0, 0.2);
        ok &= std::abs(p.theta[0][0] - 0.9565) <= 1e-4 && std::abs(p.theta[0][0] - 5 * 0.2 * 22.0 / 23.0) <= kUpdateTol;
        ok &= compute_reward(80, 100, 100) == 0.2;
        for (double v : action_probs(Policy{}, 5)) ok &= std::abs(v - 1.0 / 23.0) <= kExactTol;

        std::size_t visits = 0;
        double worst = 0;
        for (const auto& chart : build_corpus(20, 31, default_mix())) {
            Policy q;
            EpisodeConfig ec;
            ec.max_steps = 200;
            ec.seed = visits + 5;
            const auto res = run_episode(q, chart.spec, ec);
            std::size_t e = 0;
            double sum = 0;
            for (const auto& st : res.trace.steps) {
                while (e + 1 < res.trace.entries.size() && res.trace.entries[e + 1].step < st.step) ++e;
                sum += st.reward;
                if (!st.next_state || *st.next_state != st.state) {
                    const double entry = res.trace.entries[e].entry_cost;
                    worst = std::max(worst, std::abs(sum - (entry - st.cost_after) / entry));
                    sum = 0;
                    ++visits;
                }
            }
        }
        ok &= worst <= kExactTol;
        detail("mean font deficit " + std::to_string(eq3) + ", update " + std::to_string(p.theta[0][0]) +
               ", telescoping error " + std::to_string(worst) + " over " + std::to_string(visits) + " visits");
        verdict(6, ok, "exact values and telescoping rewards");
    }

    {
        std::size_t geometry_ok = 0, n = 0, correct = 0, total = 0;
        double worst_box = 0;
        for (const auto& r : sample_recipes(kCorpusSize, kTrainSeed, default_mix())) {
            const auto chart = generate(r);
            const auto doc = svg::parse_svg(chart.svg);
            const auto spec = build_spec(doc);
            const double d = oracle::max_box_difference(doc, render_spec(spec));
            worst_box = std::max(worst_box, d);
            geometry_ok += d <= kGeometryTol;
            const auto m = oracle::compare_manifest(spec, chart.manifest);
            correct += m.correct;
            total += m.total;
            ++n;
        }
        const double accuracy = double(correct) / double(total);

        std::mt19937_64 gen(2024);
        std::uniform_real_distribution<double> u(-4, 4);
        std::uniform_int_distribution<std::size_t> s_of(0, kStateCount - 1), a_of(0, kActionCount - 1);
        double worst_grad = 0;
        const double h = 1e-5;
        for (std::size_t probe = 0; probe < kGradientProbes; ++probe) {
            Policy p;
            for (auto& row : p.theta)
                for (double& v : row) v = u(gen);
            const std::size_t s = s_of(gen), a = a_of(gen);
            const Row probs = action_probs(p, s);
            for (std::size_t j = 0; j < kActionCount; ++j) {
                Policy plus = p, minus = p;
                plus.theta[s][j] += h;
                minus.theta[s][j] -= h;
                const double fd = (log_prob(plus, s, a) - log_prob(minus, s, a)) / (2 * h);
                worst_grad = std::max(worst_grad, std::abs(fd - ((j == a) - probs[j])));
            }
        }
        detail(std::to_string(geometry_ok) + "/" + std::to_string(n) + " charts re-render within 1 px (worst " +
               std::to_string(worst_box) + " px); manifest accuracy " + pct(accuracy) + "; worst gradient error " +
               std::to_string(worst_grad));
        verdict(7, geometry_ok == n && accuracy >= kManifestAccuracy && worst_grad <= kGradientTol,
                "oracle suite: geometry, manifests, gradient");
    }

    {
        bool ok = true;
        std::size_t squashes = 0;
        for (const auto& r : sample_recipes(40, 17, default_mix())) {
            auto spec = build_spec_from_svg(generate(r).svg);
            const auto before = detect_state(spec);
            for (int k = 0; k < 8; ++k) {
                spec.y_scale.range_max -= 5;
                const auto after = detect_state(spec);
                for (std::size_t s = 3; s < 18; ++s)
                    if (state_at(s).issue != Issue::TopOutOfViewport) ok &= after.cost[s] >= before.cost[s] - 1e-9;
                ++squashes;
            }
        }
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> size(4, 20);
        std::size_t deletions = 0;
        for (int trial = 0; trial < 500; ++trial) {
            std::vector<double> sizes(2 + trial % 7);
            for (auto& s : sizes) s = size(rng);
            for (std::size_t i = 0; i < sizes.size(); ++i) {
                if (sizes[i] >= 12) continue;
                auto raised = sizes, deleted = sizes;
                raised[i] = 12;
                deleted.erase(deleted.begin() + long(i));
                ok &= mean_font_deficit(deleted, 12) >= mean_font_deficit(raised, 12) - 1e-12;
                ++deletions;
            }
        }
        detail(std::to_string(squashes) + " height compressions, " + std::to_string(deletions) + " text deletions");
        verdict(8, ok, "height compression and text deletion do not lower cost");
    }

    {
        ChartRecipe r;
        r.kind = ChartKind::Bar;
        r.categories = 40;
        r.bar_labels = true;
        r.grid = true;
        r.defects = {{DefectKind::TopMargin, ElementClass::Axis, 30}, {DefectKind::FontSize, ElementClass::Label, 4}};
        GeneratedChart chart = generate(r);
        while (chart.manifest.element_count < kPerfElements) {
            r.categories += 20;
            chart = generate(r);
        }
        const auto t0 = std::chrono::steady_clock::now();
        const auto spec = build_spec_from_svg(chart.svg);
        std::size_t steps = 0;
        DeclarativeSpec current = spec;
        for (std::uint64_t seed = 0; steps < kPerfSteps; ++seed) {
            Policy p;
            EpisodeConfig ec;
            ec.max_steps = kPerfSteps - steps;
            ec.seed = seed;
            auto res = run_episode(p, current, ec);
            steps += res.trace.steps.size();
            if (res.trace.status == Termination::Solved) {
                if (res.trace.steps.empty()) break;
                current = spec;
            } else {
                current = std::move(res.spec);
            }
        }
        const std::string out = svg::serialize(render_spec(current));
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        detail(std::to_string(chart.manifest.element_count) + " elements, " + std::to_string(steps) + " steps in " +
               std::to_string(secs) + " s");
        verdict(9, steps == kPerfSteps && !out.empty() && secs <= kPerfSeconds,
                "100 episode steps on a 500-element chart within 1 s");
    }

    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    std::printf("%d criteria failed; %.1f s\n", failures, total);
    return failures == 0 ? 0 : 1;
}
