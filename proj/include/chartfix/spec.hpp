#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chartfix/geometry.hpp"
#include "chartfix/svg.hpp"

namespace chartfix {

enum class ElementClass { Title, Axis, Legend, Mark, Label };
inline constexpr std::size_t kClassCount = 5;

enum class GroupKind {
    TitleText,
    AxisTick,
    AxisLabel,
    AxisLine,
    AxisTitle,
    Grid,
    LegendShape,
    LegendText,
    Shape,
    LabelText,
};
inline constexpr std::size_t kGroupKindCount = 10;

enum class AnchorPosition { Left, XCenter, Right, Top, YCenter, Bottom };
inline constexpr std::array<AnchorPosition, 3> kHorizontalPositions = {
    AnchorPosition::Left, AnchorPosition::XCenter, AnchorPosition::Right};
inline constexpr std::array<AnchorPosition, 3> kVerticalPositions = {
    AnchorPosition::Top, AnchorPosition::YCenter, AnchorPosition::Bottom};

enum class Dependency { GlobalScale, LocalScale, ReactiveGeometry };
enum class AxisId { X, Y };

std::string_view to_string(ElementClass c);
std::string_view to_string(GroupKind k);
std::string_view to_string(AnchorPosition p);
std::string_view to_string(Dependency d);
std::string_view to_string(AxisId a);
std::optional<GroupKind> group_kind_from_string(std::string_view s);
std::optional<AnchorPosition> anchor_position_from_string(std::string_view s);

ElementClass class_of(GroupKind kind);
bool is_horizontal(AnchorPosition p);
double position_of(const Rect2D& box, AnchorPosition p);
AnchorPosition opposite(AnchorPosition p);

struct Scale {
    enum class Variant { Linear, Discrete };
    Variant variant = Variant::Linear;
    double domain_min = 0.0;
    double domain_max = 1.0;
    std::vector<std::string> categories;
    double range_min = 0.0;
    double range_max = 1.0;
    double step = 0.0;
    bool inverted = false;  // domain_min sits at range_max

    /// Pixel position of a data value (Linear) or category index (Discrete).
    double pixel(double value) const;
    double width() const { return range_max - range_min; }
};

std::string_view to_string(Scale::Variant v);

/// One ⟨p, p_a, o⟩ tuple: pos(self, p) = pos(anchor, p_a) + offset.
struct Anchor {
    AnchorPosition self = AnchorPosition::Left;
    AnchorPosition target = AnchorPosition::Left;
    double offset = 0.0;
    std::size_t anchor_group = 0;
};

/// Group-private scale along one axis, applied to member centres.
struct LocalScale {
    AxisId axis = AxisId::X;
    double original_min = 0.0, original_max = 0.0;
    double range_min = 0.0, range_max = 0.0;
};

/// How the elements of a group follow the editable parameters.
///
/// GlobalScale groups are mapped by the chart's x/y scales. ReactiveGeometry
/// groups are positioned relative to another group, per axis. A group may
/// also carry a LocalScale that spreads its members before anchoring.
struct LayoutDependency {
    Dependency variant = Dependency::GlobalScale;
    std::optional<Anchor> horizontal;
    std::optional<Anchor> vertical;
    bool per_member = false;
    std::vector<std::size_t> pairing;  // member index -> anchor member index
    std::vector<Vec2> nudges;          // residual of each member around the shared offset
    double residual = 0.0;             // std of member offsets, px
    std::optional<LocalScale> local;
    // Anchor switching cycles through the alternatives of the original anchor.
    std::optional<Anchor> original_horizontal, original_vertical;
    int switch_count = 0;
};

struct SignatureEntry {
    std::string key;
    bool shared = true;
};

struct MemberState {
    bool hidden = false;
    std::optional<std::vector<std::string>> lines;  // wrapped text
    std::optional<std::pair<Anchor, Anchor>> placement;  // per-member override (h, v)
};

struct VisualGroup {
    std::size_t id = 0;
    GroupKind kind = GroupKind::Shape;
    ElementClass cls = ElementClass::Mark;
    svg::ElementKind element_kind = svg::ElementKind::Other;
    std::vector<svg::ElementId> members;
    std::vector<SignatureEntry> signature;
    LayoutDependency layout;
    std::optional<double> font_size;           // effective px, text groups only
    std::optional<double> original_font_size;
    std::optional<AxisId> axis;                // axis parts
    std::vector<MemberState> member_state;
};

/// Per-element data captured at deconstruction time and reused by layout.
struct ElementGeometry {
    svg::ElementId element = 0;
    svg::ElementKind kind = svg::ElementKind::Other;
    Rect2D base;                  // viewport bbox in the source document
    Affine transform;             // accumulated transform in the source document
    bool scale_mode = false;      // global scales stretch it rather than move it
    bool synthetic = false;       // regenerated tick member cloned from `element`
    Vec2 shift;                   // viewport offset applied to `base` before scaling
    // Texts.
    svg::TextLayoutInput text;
    std::vector<std::string> lines;
    double local_font = 0.0;      // computed font-size in local units
    double font_scale = 1.0;      // effective px per local unit
};

/// Tick regeneration state of one axis assembly.
struct AxisAssembly {
    AxisId axis = AxisId::X;
    std::optional<std::size_t> line_group, tick_group, label_group, grid_group, title_group;
    std::size_t original_tick_count = 0;
    std::size_t tick_count = 0;
    std::vector<double> tick_values;  // data value (Linear) or category index (Discrete), in member order
    bool comma_labels = false;        // original labels used digit grouping
};

/// Immutable part of ψ shared by every edited copy.
struct SpecSource {
    svg::Document document;
    std::vector<ElementGeometry> geometry;                // one slot per measured visible leaf
    std::vector<std::optional<std::size_t>> slot;        // element id -> geometry slot
};

/// ψ: the reduced parameter space of a chart plus what is needed to map it
/// back onto the source document.
struct DeclarativeSpec {
    static constexpr int kFormatVersion = 1;

    Scale x_scale, y_scale;
    Scale original_x_scale, original_y_scale;
    bool axis_less = false;
    std::vector<VisualGroup> groups;
    std::vector<AxisAssembly> axes;
    svg::Viewport viewport;
    svg::TextMetricsConfig metrics;
    std::shared_ptr<const SpecSource> source;
    // Regenerated tick members. Their ids continue after the document's.
    std::vector<ElementGeometry> synthetic;
    std::vector<std::size_t> render_order;                   // group ids, anchors before dependents
    std::vector<svg::ElementId> unclassified;

    std::size_t slot_count() const { return source->geometry.size() + synthetic.size(); }
    std::size_t slot_of(svg::ElementId id) const {
        const std::size_t n = source->document.size();
        return id < n ? *source->slot[id] : source->geometry.size() + (id - n);
    }
    const ElementGeometry& slot_geometry(std::size_t slot) const {
        const std::size_t n = source->geometry.size();
        return slot < n ? source->geometry[slot] : synthetic[slot - n];
    }
    const ElementGeometry& geometry_of(svg::ElementId id) const { return slot_geometry(slot_of(id)); }
    svg::ElementId synthetic_id(std::size_t k) const { return source->document.size() + k; }
    const AxisAssembly* axis(AxisId id) const;
    AxisAssembly* axis(AxisId id);
    const Scale& scale(AxisId id) const { return id == AxisId::X ? x_scale : y_scale; }
    Scale& scale(AxisId id) { return id == AxisId::X ? x_scale : y_scale; }
    std::vector<std::size_t> groups_of(ElementClass cls) const;
};

}  // namespace chartfix
