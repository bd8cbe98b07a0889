#pragma once

// Independent checks shared by unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "chartfix/corpus_gen.hpp"
#include "chartfix/spec.hpp"
#include "chartfix/svg.hpp"

namespace oracle {

using namespace chartfix;

struct GroupMatch {
    std::size_t correct = 0;
    std::size_t total = 0;
    std::vector<std::string> mismatches;
};

inline std::set<std::string> ids_of(const svg::Document& doc, const std::vector<svg::ElementId>& members) {
    std::set<std::string> out;
    for (auto id : members)
        if (id < doc.size()) out.insert(doc.at(id).xml_id());
    return out;
}

inline const VisualGroup* find_group(const DeclarativeSpec& spec, const corpus::ManifestGroup& mg) {
    const std::set<std::string> want(mg.members.begin(), mg.members.end());
    for (const auto& g : spec.groups)
        if (ids_of(spec.source->document, g.members) == want) return &g;
    return nullptr;
}

/// Two anchors imply the same constraint when their self and target points
/// coincide (within 1 px) on every member of the source geometry.
inline bool same_constraint(const DeclarativeSpec& spec, const VisualGroup& g, const VisualGroup& anchor, const Anchor& ours,
                            const corpus::ExpectedAnchor& theirs, bool per_member, const std::vector<std::size_t>& pairing) {
    const auto& doc = spec.source->document;
    auto box = [&](svg::ElementId id) { return svg::compute_bbox(doc, id, spec.metrics); };
    auto close = [](double a, double b) { return std::abs(a - b) <= 1.0; };
    if (!per_member) {
        Rect2D s, a;
        for (auto id : g.members) s = s.united(box(id));
        for (auto id : anchor.members) a = a.united(box(id));
        return close(position_of(s, ours.self), position_of(s, theirs.self)) &&
               close(position_of(a, ours.target), position_of(a, theirs.target)) &&
               close(position_of(s, ours.self) - position_of(a, ours.target) - ours.offset, 0.0);
    }
    for (std::size_t i = 0; i < g.members.size(); ++i) {
        const Rect2D s = box(g.members[i]);
        const Rect2D a = box(anchor.members[i < pairing.size() ? pairing[i] : i]);
        if (!close(position_of(s, ours.self), position_of(s, theirs.self))) return false;
        if (!close(position_of(a, ours.target), position_of(a, theirs.target))) return false;
    }
    return close(ours.offset, theirs.offset);
}

/// Fraction of manifest groups recovered with the right kind, dependency and anchoring.
inline GroupMatch compare_manifest(const DeclarativeSpec& spec, const corpus::Manifest& m) {
    GroupMatch out;
    const auto& doc = spec.source->document;
    for (const auto& mg : m.groups) {
        ++out.total;
        const VisualGroup* g = find_group(spec, mg);
        std::string why;
        if (!g) {
            why = "no group with members of " + std::string(to_string(mg.kind));
        } else if (g->kind != mg.kind) {
            why = "kind " + std::string(to_string(g->kind)) + " for " + std::string(to_string(mg.kind));
        } else if (mg.dependency == Dependency::ReactiveGeometry) {
            const auto& dep = g->layout;
            if (dep.variant != Dependency::ReactiveGeometry || !dep.horizontal || !dep.vertical) {
                why = "no anchoring for " + std::string(to_string(mg.kind));
            } else {
                const VisualGroup& a = spec.groups.at(dep.horizontal->anchor_group);
                const auto anchor_ids = ids_of(doc, a.members);
                if (a.kind != mg.anchor_kind || !anchor_ids.count(mg.anchor_member)) {
                    why = "anchor group " + std::string(to_string(a.kind)) + " for " + std::string(to_string(mg.kind));
                } else if (!same_constraint(spec, *g, a, *dep.horizontal, *mg.horizontal, dep.per_member, dep.pairing) ||
                           !same_constraint(spec, *g, a, *dep.vertical, *mg.vertical, dep.per_member, dep.pairing)) {
                    why = "anchor tuple of " + std::string(to_string(mg.kind)) + " (" + std::string(to_string(dep.horizontal->self)) +
                          "/" + std::string(to_string(dep.horizontal->target)) + " " + std::to_string(dep.horizontal->offset) + ", " +
                          std::string(to_string(dep.vertical->self)) + "/" + std::string(to_string(dep.vertical->target)) + " " +
                          std::to_string(dep.vertical->offset) + ") expected (" + std::string(to_string(mg.horizontal->self)) + "/" +
                          std::string(to_string(mg.horizontal->target)) + " " + std::to_string(mg.horizontal->offset) + ", " +
                          std::string(to_string(mg.vertical->self)) + "/" + std::string(to_string(mg.vertical->target)) + " " +
                          std::to_string(mg.vertical->offset) + ")";
                }
            }
        } else if (g->layout.variant == Dependency::ReactiveGeometry) {
            why = "unexpected anchoring for " + std::string(to_string(mg.kind));
        }
        if (why.empty()) ++out.correct;
        else out.mismatches.push_back(why);
    }
    return out;
}

inline bool scale_matches(const Scale& s, const corpus::ManifestScale& m) {
    if (s.variant != m.variant) return false;
    if (std::abs(s.range_min - m.range_min) > 1.0 || std::abs(s.range_max - m.range_max) > 1.0) return false;
    if (s.variant == Scale::Variant::Discrete) return s.categories == m.categories;
    return std::abs(s.domain_min - m.domain_min) < 1e-6 && std::abs(s.domain_max - m.domain_max) < 1e-6;
}

/// Largest corner displacement between two renderings of the same elements.
inline double max_box_difference(const svg::Document& a, const svg::Document& b, const svg::TextMetricsConfig& metrics = {}) {
    double worst = 0;
    for (auto id : a.visible_leaves()) {
        const Rect2D x = svg::compute_bbox(a, id, metrics);
        const Rect2D y = svg::compute_bbox(b, id, metrics);
        if (x.empty() != y.empty()) return INFINITY;
        if (x.empty()) continue;
        worst = std::max({worst, std::abs(x.x_min - y.x_min), std::abs(x.x_max - y.x_max), std::abs(x.y_min - y.y_min),
                          std::abs(x.y_max - y.y_max)});
    }
    return worst;
}

}  // namespace oracle
