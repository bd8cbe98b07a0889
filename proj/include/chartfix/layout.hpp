#pragma once

#include <string>
#include <vector>

#include "chartfix/spec.hpp"
#include "chartfix/svg.hpp"

namespace chartfix {

/// Where one geometry slot ends up under the current parameters:
/// box = mx/my applied to (base + shift), then translated by d.
struct Placement {
    AxisMap mx, my;
    Vec2 d;
    double local_font = 0.0;
    const std::vector<std::string>* lines = nullptr;
    bool hidden = false;
    Rect2D box;
};

struct Layout {
    std::vector<Placement> slots;
};

/// Position every geometry slot from ψ, anchors after the groups they follow.
/// Throws Error{CyclicDependency} if the render order is inconsistent.
Layout compute_layout(const DeclarativeSpec& spec);

/// Render ψ back to a document. Only layout attributes of moved, resized or
/// hidden elements change; regenerated ticks are cloned from their template.
svg::Document render_spec(const DeclarativeSpec& spec);
svg::Document render_spec(const DeclarativeSpec& spec, const Layout& layout);

/// Local size of the scale in px per band (Discrete) or overall (Linear).
double band_step(const Scale& s);

}  // namespace chartfix
