#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chartfix/geometry.hpp"

namespace chartfix::svg {

struct PathCommand {
    char op = 'M';  // original letter, case preserved
    std::vector<double> args;
};

/// Tokenize SVG path data. Implicit repeats are expanded so every command
/// carries exactly one argument tuple. Returns nullopt on malformed data.
std::optional<std::vector<PathCommand>> parse_path(std::string_view d);

std::string format_path(const std::vector<PathCommand>& cmds);

/// Absolute control-polygon points. Bounds of these points contain the
/// rendered curve; arcs are sampled.
std::vector<Vec2> path_control_points(const std::vector<PathCommand>& cmds);

/// Apply independent x/y affine maps to every coordinate. Relative
/// coordinates and arc radii are scaled only.
std::vector<PathCommand> map_path(const std::vector<PathCommand>& cmds, AxisMap xmap, AxisMap ymap);

/// Parse a points list ("x,y x,y ...") of <polyline>/<polygon>.
std::vector<Vec2> parse_points(std::string_view s);
std::string format_points(const std::vector<Vec2>& pts);

}  // namespace chartfix::svg
