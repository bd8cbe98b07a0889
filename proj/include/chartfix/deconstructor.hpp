#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chartfix/spec.hpp"
#include "chartfix/svg.hpp"

namespace chartfix {

struct DeconstructOptions {
    svg::Viewport viewport;
    svg::TextMetricsConfig metrics;
};

/// Cluster the measured visible leaves by element kind and encoding
/// signature. Kinds are left unassigned. Throws Error{EmptyDocument}.
std::vector<VisualGroup> detect_groups(const SpecSource& source);

/// Tick/label/line/grid assemblies found by scanning line groups. Assigns
/// AxisTick, AxisLabel, AxisLine and Grid kinds to the groups involved.
/// Throws Error{UnsupportedChart} when one orientation has several plots.
std::vector<AxisAssembly> detect_axes(const SpecSource& source, std::vector<VisualGroup>& groups);

/// Linear when every label is numeric and positions are affine in value
/// within 1 px; otherwise Discrete. Throws Error{DegenerateScale}.
Scale infer_scale(const std::vector<std::string>& labels, const std::vector<double>& positions);

/// Best anchoring of `group` among `candidates`. nullopt means no candidate
/// fits, in which case the group keeps global positioning.
std::optional<LayoutDependency> infer_reactive_geometry(const SpecSource& source,
                                                        const std::vector<VisualGroup>& groups,
                                                        std::size_t group,
                                                        const std::vector<std::size_t>& candidates);

/// Full pipeline from a parsed document to ψ.
DeclarativeSpec build_spec(const svg::Document& doc, const DeconstructOptions& options = {});

/// Parse and deconstruct in one call.
DeclarativeSpec build_spec_from_svg(std::string_view bytes, const DeconstructOptions& options = {});

/// Text of a text element as one string (lines joined by spaces).
std::string element_text(const svg::Element& e);

nlohmann::json spec_to_json(const DeclarativeSpec& spec);

}  // namespace chartfix
