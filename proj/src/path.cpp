#include "chartfix/path.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "chartfix/svg.hpp"

namespace chartfix::svg {

namespace {

int arity(char op) {
    switch (std::toupper(static_cast<unsigned char>(op))) {
        case 'M': case 'L': case 'T': return 2;
        case 'H': case 'V': return 1;
        case 'C': return 6;
        case 'S': case 'Q': return 4;
        case 'A': return 7;
        case 'Z': return 0;
        default: return -1;
    }
}

class Scanner {
public:
    explicit Scanner(std::string_view s) : s_(s) {}

    void skip_separators() {
        while (i_ < s_.size() && (std::isspace(static_cast<unsigned char>(s_[i_])) || s_[i_] == ',')) ++i_;
    }
    bool done() {
        skip_separators();
        return i_ >= s_.size();
    }
    bool peek_command(char& op) {
        skip_separators();
        if (i_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[i_])) && s_[i_] != 'e' && s_[i_] != 'E') {
            op = s_[i_];
            return true;
        }
        return false;
    }
    void advance() { ++i_; }

    std::optional<double> number() {
        skip_separators();
        if (i_ >= s_.size()) return std::nullopt;
        const char* begin = s_.data() + i_;
        const char* end = s_.data() + s_.size();
        if (*begin == '+') ++begin;
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(begin, end, v);
        if (ec != std::errc()) return std::nullopt;
        i_ = static_cast<std::size_t>(ptr - s_.data());
        return v;
    }

    // Arc flags may be written without separators ("a1 1 0 00 5 5").
    std::optional<double> flag() {
        skip_separators();
        if (i_ < s_.size() && (s_[i_] == '0' || s_[i_] == '1')) return static_cast<double>(s_[i_++] - '0');
        return std::nullopt;
    }

private:
    std::string_view s_;
    std::size_t i_ = 0;
};

void sample_arc(Vec2 p0, const std::vector<double>& a, Vec2 p1, std::vector<Vec2>& out) {
    double rx = std::abs(a[0]), ry = std::abs(a[1]);
    if (rx < 1e-12 || ry < 1e-12) {
        out.push_back(p1);
        return;
    }
    const double phi = a[2] * std::numbers::pi / 180.0;
    const bool large = a[3] != 0.0, sweep = a[4] != 0.0;
    const double cp = std::cos(phi), sp = std::sin(phi);
    const double dx = (p0.x - p1.x) / 2, dy = (p0.y - p1.y) / 2;
    const double x1 = cp * dx + sp * dy, y1 = -sp * dx + cp * dy;
    const double lambda = (x1 * x1) / (rx * rx) + (y1 * y1) / (ry * ry);
    if (lambda > 1) {
        rx *= std::sqrt(lambda);
        ry *= std::sqrt(lambda);
    }
    const double num = rx * rx * ry * ry - rx * rx * y1 * y1 - ry * ry * x1 * x1;
    const double den = rx * rx * y1 * y1 + ry * ry * x1 * x1;
    double coef = den > 0 ? std::sqrt(std::max(0.0, num / den)) : 0.0;
    if (large == sweep) coef = -coef;
    const double cx1 = coef * rx * y1 / ry, cy1 = -coef * ry * x1 / rx;
    const double cx = cp * cx1 - sp * cy1 + (p0.x + p1.x) / 2;
    const double cy = sp * cx1 + cp * cy1 + (p0.y + p1.y) / 2;
    auto angle = [](double ux, double uy, double vx, double vy) {
        return std::atan2(ux * vy - uy * vx, ux * vx + uy * vy);
    };
    const double t0 = angle(1, 0, (x1 - cx1) / rx, (y1 - cy1) / ry);
    double dt = angle((x1 - cx1) / rx, (y1 - cy1) / ry, (-x1 - cx1) / rx, (-y1 - cy1) / ry);
    if (!sweep && dt > 0) dt -= 2 * std::numbers::pi;
    if (sweep && dt < 0) dt += 2 * std::numbers::pi;
    constexpr int kSamples = 16;
    for (int k = 1; k <= kSamples; ++k) {
        const double t = t0 + dt * k / kSamples;
        out.push_back({cx + rx * std::cos(t) * cp - ry * std::sin(t) * sp,
                       cy + rx * std::cos(t) * sp + ry * std::sin(t) * cp});
    }
}

}  // namespace

std::optional<std::vector<PathCommand>> parse_path(std::string_view d) {
    std::vector<PathCommand> out;
    Scanner sc(d);
    char op = 0;
    while (!sc.done()) {
        char next = 0;
        if (sc.peek_command(next)) {
            if (arity(next) < 0) return std::nullopt;
            op = next;
            sc.advance();
            if (arity(op) == 0) {
                out.push_back({op, {}});
                continue;
            }
        } else if (op == 0 || arity(op) == 0) {
            return std::nullopt;
        }
        PathCommand cmd{op, {}};
        const int n = arity(op);
        const bool arc = std::toupper(static_cast<unsigned char>(op)) == 'A';
        for (int k = 0; k < n; ++k) {
            auto v = (arc && (k == 3 || k == 4)) ? sc.flag() : sc.number();
            if (!v) return std::nullopt;
            cmd.args.push_back(*v);
        }
        out.push_back(std::move(cmd));
        // A moveto followed by bare coordinates continues as lineto.
        if (op == 'M') op = 'L';
        else if (op == 'm') op = 'l';
    }
    return out;
}

std::string format_path(const std::vector<PathCommand>& cmds) {
    std::string out;
    for (const auto& c : cmds) {
        out.push_back(c.op);
        for (std::size_t k = 0; k < c.args.size(); ++k) {
            if (k > 0) out.push_back(',');
            out += format_number(c.args[k]);
        }
    }
    return out;
}

std::vector<Vec2> path_control_points(const std::vector<PathCommand>& cmds) {
    std::vector<Vec2> pts;
    Vec2 cur{}, start{};
    for (const auto& c : cmds) {
        const bool rel = std::islower(static_cast<unsigned char>(c.op));
        const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(c.op)));
        const Vec2 base = rel ? cur : Vec2{};
        auto pt = [&](std::size_t i) { return Vec2{base.x + c.args[i], base.y + c.args[i + 1]}; };
        switch (up) {
            case 'M':
                cur = start = pt(0);
                pts.push_back(cur);
                break;
            case 'L': case 'T':
                cur = pt(0);
                pts.push_back(cur);
                break;
            case 'H':
                cur.x = rel ? cur.x + c.args[0] : c.args[0];
                pts.push_back(cur);
                break;
            case 'V':
                cur.y = rel ? cur.y + c.args[0] : c.args[0];
                pts.push_back(cur);
                break;
            case 'C':
                pts.push_back(pt(0));
                pts.push_back(pt(2));
                cur = pt(4);
                pts.push_back(cur);
                break;
            case 'S': case 'Q':
                pts.push_back(pt(0));
                cur = pt(2);
                pts.push_back(cur);
                break;
            case 'A': {
                const Vec2 end = pt(5);
                sample_arc(cur, c.args, end, pts);
                cur = end;
                break;
            }
            case 'Z':
                cur = start;
                break;
            default:
                break;
        }
    }
    return pts;
}

std::vector<PathCommand> map_path(const std::vector<PathCommand>& cmds, AxisMap xmap, AxisMap ymap) {
    std::vector<PathCommand> out = cmds;
    for (auto& c : out) {
        const bool rel = std::islower(static_cast<unsigned char>(c.op));
        const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(c.op)));
        auto mx = [&](double& v) { v = rel ? v * xmap.scale : xmap(v); };
        auto my = [&](double& v) { v = rel ? v * ymap.scale : ymap(v); };
        switch (up) {
            case 'H': mx(c.args[0]); break;
            case 'V': my(c.args[0]); break;
            case 'A':
                c.args[0] *= std::abs(xmap.scale);
                c.args[1] *= std::abs(ymap.scale);
                mx(c.args[5]);
                my(c.args[6]);
                break;
            case 'Z': break;
            default:
                for (std::size_t k = 0; k + 1 < c.args.size(); k += 2) {
                    mx(c.args[k]);
                    my(c.args[k + 1]);
                }
        }
    }
    return out;
}

std::vector<Vec2> parse_points(std::string_view s) {
    std::vector<Vec2> pts;
    Scanner sc(s);
    while (!sc.done()) {
        auto x = sc.number();
        auto y = sc.number();
        if (!x || !y) break;
        pts.push_back({*x, *y});
    }
    return pts;
}

std::string format_points(const std::vector<Vec2>& pts) {
    std::string out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i > 0) out.push_back(' ');
        out += format_number(pts[i].x);
        out.push_back(',');
        out += format_number(pts[i].y);
    }
    return out;
}

}  // namespace chartfix::svg
