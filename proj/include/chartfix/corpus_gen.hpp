#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chartfix/spec.hpp"

namespace chartfix::corpus {

enum class ChartKind { Bar, GroupedBar, Line, Scatter };

enum class DefectKind {
    TopMargin,      // excess white space above the chart
    LeftMargin,
    RightMargin,
    TopOverflow,    // title pushed above the viewport
    LeftOverflow,   // axis content left of the viewport
    RightOverflow,  // marks extend past the right edge
    FontSize,       // texts of the target class below the minimum size
    Overlap,        // overlapping texts within the target class
    DistortedRatio, // metadata only, never costed
};

std::string_view to_string(ChartKind k);
std::string_view to_string(DefectKind k);

struct Defect {
    DefectKind kind = DefectKind::TopMargin;
    ElementClass target = ElementClass::Axis;  // FontSize / Overlap / overflow class
    double magnitude = 0.0;                    // px (length defects, font deficit)
};

struct ChartRecipe {
    ChartKind kind = ChartKind::Bar;
    std::size_t categories = 6;   // bars / points per series
    std::size_t series = 1;
    std::size_t label_chars = 3;  // category label length
    bool title = true;
    bool axis_titles = true;
    bool grid = false;
    bool bar_labels = false;
    bool points = false;          // line charts: dots on the vertices
    bool stylesheet = false;      // set fonts through an embedded stylesheet
    double font_size = 12.0;
    double plot_height = 220.0;
    std::vector<Defect> defects;
    std::uint64_t seed = 0;
};

struct ExpectedAnchor {
    AnchorPosition self = AnchorPosition::Left;
    AnchorPosition target = AnchorPosition::Left;
    double offset = 0.0;
};

struct ManifestGroup {
    GroupKind kind = GroupKind::Shape;
    std::vector<std::string> members;  // element ids
    Dependency dependency = Dependency::GlobalScale;
    std::optional<GroupKind> anchor_kind;
    std::string anchor_member;         // first member id of the anchor group
    std::optional<ExpectedAnchor> horizontal, vertical;
    bool per_member = false;
};

struct ManifestScale {
    Scale::Variant variant = Scale::Variant::Linear;
    double domain_min = 0.0, domain_max = 0.0;
    std::vector<std::string> categories;
    double range_min = 0.0, range_max = 0.0;
};

struct ExpectedCost {
    DefectKind kind = DefectKind::TopMargin;
    ElementClass target = ElementClass::Axis;
    double magnitude = 0.0;
    double expected_cost = 0.0;  // interpreter cost this defect should produce
};

struct Manifest {
    static constexpr int kFormatVersion = 1;
    ChartRecipe recipe;
    std::size_t element_count = 0;
    std::vector<ManifestGroup> groups;
    ManifestScale x_scale, y_scale;
    std::vector<ExpectedCost> defects;
};

struct GeneratedChart {
    std::string svg;
    Manifest manifest;
};

/// Build one chart. Throws Error{InvalidRecipe} for unusable recipes.
GeneratedChart generate(const ChartRecipe& recipe);

/// Defect mix used when sampling a corpus.
struct CorpusMix {
    double clean_fraction = 0.1;
    double multi_defect_fraction = 0.4;
    // Relative weights of single defect families.
    double margin_weight = 3.0;
    double overflow_weight = 2.0;
    double font_weight = 2.0;
    double overlap_weight = 2.0;
};

CorpusMix default_mix();
/// A different defect mix for held-out evaluation.
CorpusMix holdout_mix();

std::vector<ChartRecipe> sample_recipes(std::size_t count, std::uint64_t seed, const CorpusMix& mix);

/// Write chart_NNN.svg + chart_NNN.json for each recipe and an index.json.
void write_corpus(const std::filesystem::path& dir, std::size_t count, std::uint64_t seed, const CorpusMix& mix);

struct CorpusEntry {
    std::string name;
    std::string svg;
    std::optional<Manifest> manifest;
};

/// Load every *.svg in a directory (sorted by name) with its manifest if present.
std::vector<CorpusEntry> load_corpus(const std::filesystem::path& dir);

nlohmann::json to_json(const Manifest& m);
Manifest manifest_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ChartRecipe& r);
ChartRecipe recipe_from_json(const nlohmann::json& j);

}  // namespace chartfix::corpus
