#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chartfix/css.hpp"
#include "chartfix/geometry.hpp"

namespace chartfix::svg {

using ElementId = std::size_t;

enum class ElementKind { Text, Rect, Circle, Ellipse, Line, Path, Group, Other };

std::string_view to_string(ElementKind kind);

struct Viewport {
    double width = 375.0;
    double height = 812.0;
};

/// Fixed-ratio text measurement used in place of a browser layout engine.
/// The first baseline sits at baseline_ratio of the line height below the
/// top of the text box.
struct TextMetricsConfig {
    double avg_char_width_ratio = 0.6;
    double line_height_ratio = 1.2;
    double baseline_ratio = 0.8;
};

using Attribute = std::pair<std::string, std::string>;

/// A <tspan> child of a <text> element, kept verbatim for serialization.
struct TextRun {
    std::vector<Attribute> attributes;
    std::string text;
};

struct Element {
    ElementId id = 0;
    ElementKind kind = ElementKind::Other;
    std::string tag;
    std::vector<Attribute> attributes;
    std::string text;            // character data directly inside the element
    std::vector<TextRun> runs;   // <text> only
    std::optional<ElementId> parent;
    std::vector<ElementId> children;

    // Derived by Document::resolve().
    Affine transform;            // own transform composed with every ancestor's
    css::StyleMap style;         // computed presentation properties
    std::vector<std::string> lines;
    bool visible = true;
    bool rendered = true;        // false inside <defs>, <clipPath>, ...

    const std::string* attribute(std::string_view name) const;
    void set_attribute(std::string_view name, std::string value);
    bool erase_attribute(std::string_view name);

    /// Computed font size in px (texts and groups).
    double font_size() const;
    std::string_view style_value(std::string_view name) const;
    std::string xml_id() const;
    bool is_leaf_visual() const;
};

struct Diagnostic {
    std::string message;
};

/// Parsed SVG tree. elements[0] is the <svg> root; every element id equals
/// its index, and parents always precede their children.
class Document {
public:
    std::vector<Element> elements;
    css::Stylesheet stylesheet;
    std::vector<Diagnostic> diagnostics;
    double canvas_width = 0.0;   // root width/height in px (0 when absent)
    double canvas_height = 0.0;

    const Element& root() const { return elements.front(); }
    const Element& at(ElementId id) const { return elements.at(id); }
    Element& at(ElementId id) { return elements.at(id); }
    std::size_t size() const { return elements.size(); }

    /// Recompute transforms, cascaded styles, text lines and visibility from
    /// the raw attributes. Called by the parser and after any raw edit.
    void resolve();

    std::optional<ElementId> find_by_xml_id(std::string_view id) const;

    /// Insert a copy of `source` as the next sibling of `source`.
    ElementId clone_after(ElementId source);

    std::vector<ElementId> visible_leaves() const;
};

/// Parse SVG bytes. Throws Error{MalformedDocument} for non-XML input or a
/// missing <svg> root; unsupported subtrees are skipped and reported in
/// Document::diagnostics.
Document parse_svg(std::string_view bytes);

std::string serialize(const Document& doc);

/// Bounding box in viewport coordinates. Groups return the union of their
/// visible descendants. Elements lacking the attributes their kind needs
/// return an empty box.
Rect2D compute_bbox(const Document& doc, ElementId id, const TextMetricsConfig& metrics = {});

/// Geometry of a text element that does not depend on its position, used to
/// re-measure text after font or content edits.
struct TextLayoutInput {
    double x = 0.0, y = 0.0;     // local anchor point before dx/dy
    double dx_px = 0.0, dx_em = 0.0;
    double dy_px = 0.0, dy_em = 0.0;
    enum class Anchor { Start, Middle, End } anchor = Anchor::Start;
    enum class Baseline { Alphabetic, Middle, Hanging } baseline = Baseline::Alphabetic;
};

TextLayoutInput text_layout_input(const Element& text);

/// Local-coordinate box of a text with the given font size and lines.
Rect2D text_local_box(const TextLayoutInput& in, double font_size,
                      const std::vector<std::string>& lines, const TextMetricsConfig& metrics);

std::size_t utf8_length(std::string_view s);

// Attribute/length helpers shared by the parser and the renderer.
std::optional<double> parse_number(std::string_view s);
std::optional<double> parse_length(std::string_view s, double font_size, double reference = 0.0);
std::string format_number(double v);
std::optional<Affine> parse_transform(std::string_view s);

}  // namespace chartfix::svg
