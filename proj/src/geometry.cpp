#include "torusdyn/geometry.hpp"

#include <algorithm>
#include <limits>

namespace torusdyn {

std::vector<Vec2> SeedGrid::points() const {
    std::vector<Vec2> out;
    out.reserve(size());
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) out.push_back(at(i, j));
    return out;
}

namespace {

bool lex_less(const Vec2& a, const Vec2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

double turn(const Vec2& o, const Vec2& a, const Vec2& b) { return cross(a - o, b - o); }

}  // namespace

std::vector<Vec2> convex_hull(std::span<const Vec2> points) {
    std::vector<Vec2> pts(points.begin(), points.end());
    std::sort(pts.begin(), pts.end(), lex_less);
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() <= 2) return pts;

    std::vector<Vec2> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && turn(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && turn(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    // all points collinear: the chain degenerates to the two extremes
    if (hull.size() == 2 || (hull.size() > 2 && std::all_of(hull.begin() + 2, hull.end(), [&](const Vec2& p) {
                                 return turn(hull[0], hull[1], p) == 0.0;
                             }))) {
        return {pts.front(), pts.back()};
    }
    return hull;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return distance(p, a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(p, a + ab * t);
}

namespace {

double boundary_distance(const Vec2& p, std::span<const Vec2> hull) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < hull.size(); ++i)
        best = std::min(best, point_segment_distance(p, hull[i], hull[(i + 1) % hull.size()]));
    return best;
}

bool inside_ccw(const Vec2& p, std::span<const Vec2> hull) {
    for (std::size_t i = 0; i < hull.size(); ++i)
        if (turn(hull[i], hull[(i + 1) % hull.size()], p) < 0.0) return false;
    return true;
}

}  // namespace

double distance_to_convex(const Vec2& p, std::span<const Vec2> hull) {
    if (hull.empty()) return std::numeric_limits<double>::infinity();
    if (hull.size() == 1) return distance(p, hull[0]);
    if (hull.size() == 2) return point_segment_distance(p, hull[0], hull[1]);
    return inside_ccw(p, hull) ? 0.0 : boundary_distance(p, hull);
}

double hausdorff_convex(std::span<const Vec2> a, std::span<const Vec2> b) {
    double h = 0.0;
    for (const auto& v : a) h = std::max(h, distance_to_convex(v, b));
    for (const auto& v : b) h = std::max(h, distance_to_convex(v, a));
    return h;
}

double interior_margin(const Vec2& p, std::span<const Vec2> hull) {
    if (hull.size() < 3) return -distance_to_convex(p, hull);
    const double d = boundary_distance(p, hull);
    return inside_ccw(p, hull) ? d : -d;
}

bool hull_contains(std::span<const Vec2> hull, const Vec2& p, double tol) {
    return distance_to_convex(p, hull) <= tol;
}

bool segment_intersection(const Vec2& p0, const Vec2& p1, const Vec2& q0, const Vec2& q1,
                          SegmentHit& hit) {
    const Vec2 r = p1 - p0;
    const Vec2 s = q1 - q0;
    const double denom = cross(r, s);
    if (denom == 0.0) return false;
    const Vec2 qp = q0 - p0;
    const double t_p = cross(qp, s) / denom;
    const double t_q = cross(qp, r) / denom;
    if (t_p < 0.0 || t_p > 1.0 || t_q < 0.0 || t_q > 1.0) return false;
    hit.s = t_p;
    hit.t = t_q;
    hit.point = p0 + r * t_p;
    return true;
}

}  // namespace torusdyn
