#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

namespace chartfix {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
    friend bool operator==(Vec2 a, Vec2 b) = default;
};

/// Axis-aligned box in viewport pixels. A default-constructed box is empty
/// and acts as the identity for united().
struct Rect2D {
    double x_min = std::numeric_limits<double>::infinity();
    double y_min = std::numeric_limits<double>::infinity();
    double x_max = -std::numeric_limits<double>::infinity();
    double y_max = -std::numeric_limits<double>::infinity();

    static Rect2D from_xywh(double x, double y, double w, double h) {
        return {std::min(x, x + w), std::min(y, y + h), std::max(x, x + w), std::max(y, y + h)};
    }

    bool empty() const { return !(x_min <= x_max && y_min <= y_max); }
    double width() const { return empty() ? 0.0 : x_max - x_min; }
    double height() const { return empty() ? 0.0 : y_max - y_min; }
    double x_center() const { return 0.5 * (x_min + x_max); }
    double y_center() const { return 0.5 * (y_min + y_max); }
    double area() const { return width() * height(); }

    void include(Vec2 p) {
        x_min = std::min(x_min, p.x);
        y_min = std::min(y_min, p.y);
        x_max = std::max(x_max, p.x);
        y_max = std::max(y_max, p.y);
    }

    Rect2D united(const Rect2D& o) const {
        if (o.empty()) return *this;
        if (empty()) return o;
        return {std::min(x_min, o.x_min), std::min(y_min, o.y_min), std::max(x_max, o.x_max),
                std::max(y_max, o.y_max)};
    }

    Rect2D translated(Vec2 d) const {
        if (empty()) return *this;
        return {x_min + d.x, y_min + d.y, x_max + d.x, y_max + d.y};
    }

    bool contains(const Rect2D& o, double tol = 0.0) const {
        return o.x_min >= x_min - tol && o.y_min >= y_min - tol && o.x_max <= x_max + tol &&
               o.y_max <= y_max + tol;
    }

    friend bool operator==(const Rect2D&, const Rect2D&) = default;
};

/// Area of the intersection of two boxes (zero when they only touch).
inline double intersection_area(const Rect2D& a, const Rect2D& b) {
    if (a.empty() || b.empty()) return 0.0;
    const double w = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
    const double h = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
    return (w > 0.0 && h > 0.0) ? w * h : 0.0;
}

/// 2D affine transform in SVG matrix(a b c d e f) order:
///   x' = a*x + c*y + e
///   y' = b*x + d*y + f
struct Affine {
    double a = 1, b = 0, c = 0, d = 1, e = 0, f = 0;

    static Affine translate(double tx, double ty) { return {1, 0, 0, 1, tx, ty}; }
    static Affine scale(double sx, double sy) { return {sx, 0, 0, sy, 0, 0}; }
    static Affine rotate_degrees(double deg) {
        const double r = deg * std::numbers::pi / 180.0;
        return {std::cos(r), std::sin(r), -std::sin(r), std::cos(r), 0, 0};
    }

    Vec2 apply(Vec2 p) const { return {a * p.x + c * p.y + e, b * p.x + d * p.y + f}; }
    Vec2 apply_linear(Vec2 v) const { return {a * v.x + c * v.y, b * v.x + d * v.y}; }

    /// this ∘ o  (apply o first, then this)
    Affine operator*(const Affine& o) const {
        return {a * o.a + c * o.b, b * o.a + d * o.b, a * o.c + c * o.d,
                b * o.c + d * o.d, a * o.e + c * o.f + e, b * o.e + d * o.f + f};
    }

    double determinant() const { return a * d - b * c; }

    std::optional<Affine> inverse() const {
        const double det = determinant();
        if (std::abs(det) < 1e-12) return std::nullopt;
        const double ia = d / det, ib = -b / det, ic = -c / det, id = a / det;
        return Affine{ia, ib, ic, id, -(ia * e + ic * f), -(ib * e + id * f)};
    }

    /// True when the transform maps axis-aligned boxes to axis-aligned boxes
    /// without swapping axes (scale + translate only).
    bool axis_aligned() const { return std::abs(b) < 1e-9 && std::abs(c) < 1e-9; }

    bool is_identity() const {
        return a == 1 && b == 0 && c == 0 && d == 1 && e == 0 && f == 0;
    }

    Rect2D map_rect(const Rect2D& r) const {
        if (r.empty()) return r;
        Rect2D out;
        out.include(apply({r.x_min, r.y_min}));
        out.include(apply({r.x_max, r.y_min}));
        out.include(apply({r.x_min, r.y_max}));
        out.include(apply({r.x_max, r.y_max}));
        return out;
    }

    /// Rotation angle of the x basis vector, in whole degrees.
    int rotation_degrees() const {
        const double deg = std::atan2(b, a) * 180.0 / std::numbers::pi;
        return static_cast<int>(std::lround(deg));
    }
};

/// One-dimensional affine map v -> scale * v + offset.
struct AxisMap {
    double scale = 1.0;
    double offset = 0.0;

    double operator()(double v) const { return scale * v + offset; }
    bool is_identity() const { return scale == 1.0 && offset == 0.0; }

    /// Map taking [from_min, from_max] onto [to_min, to_max].
    static AxisMap between(double from_min, double from_max, double to_min, double to_max) {
        const double span = from_max - from_min;
        if (std::abs(span) < 1e-12) return {1.0, to_min - from_min};
        const double s = (to_max - to_min) / span;
        return {s, to_min - s * from_min};
    }
};

}  // namespace chartfix
