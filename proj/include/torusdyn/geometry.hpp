#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace torusdyn {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
    friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
    friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
    friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
    friend constexpr Vec2 operator/(Vec2 a, double s) { return Vec2{a.x / s, a.y / s}; }
    friend constexpr Vec2 operator-(const Vec2& a) { return Vec2{-a.x, -a.y}; }
    friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
inline double distance(const Vec2& a, const Vec2& b) { return norm(a - b); }
inline bool is_finite(const Vec2& a) { return std::isfinite(a.x) && std::isfinite(a.y); }

/// Integer lattice vector; the deck group of the torus acts by these.
struct IVec2 {
    std::int64_t a = 0;
    std::int64_t b = 0;

    friend constexpr bool operator==(const IVec2&, const IVec2&) = default;
    friend constexpr auto operator<=>(const IVec2&, const IVec2&) = default;
    friend constexpr IVec2 operator+(const IVec2& u, const IVec2& v) { return {u.a + v.a, u.b + v.b}; }
    friend constexpr IVec2 operator-(const IVec2& u, const IVec2& v) { return {u.a - v.a, u.b - v.b}; }
    friend constexpr IVec2 operator-(const IVec2& u) { return {-u.a, -u.b}; }
};

inline Vec2 to_vec(const IVec2& v) { return Vec2{double(v.a), double(v.b)}; }

/// Row-major 2x2 real matrix [[a, b], [c, d]].
struct Mat2 {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    static constexpr Mat2 identity() { return Mat2{}; }
    constexpr double det() const { return a * d - b * c; }
    constexpr double trace() const { return a + d; }
    friend constexpr Vec2 operator*(const Mat2& m, const Vec2& v) {
        return Vec2{m.a * v.x + m.b * v.y, m.c * v.x + m.d * v.y};
    }
    friend constexpr Mat2 operator*(const Mat2& m, const Mat2& n) {
        return Mat2{m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
                    m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
    }
    friend constexpr Mat2 operator-(const Mat2& m, const Mat2& n) {
        return Mat2{m.a - n.a, m.b - n.b, m.c - n.c, m.d - n.d};
    }
    /// Inverse; caller guarantees det() != 0.
    constexpr Mat2 inverse() const {
        const double dt = det();
        return Mat2{d / dt, -b / dt, -c / dt, a / dt};
    }
};

/// Axis-aligned box [xmin, xmax] x [ymin, ymax].
struct Box {
    double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;

    bool contains(const Vec2& p) const {
        return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
    }
    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
};

/// Uniform rectangular seed grid with cell-centred or corner-anchored samples.
struct SeedGrid {
    Box box{0.0, 1.0, 0.0, 1.0};
    int nx = 64;
    int ny = 64;

    std::size_t size() const { return std::size_t(nx) * std::size_t(ny); }
    /// Sample (i, j) at box corner + (i/nx, j/ny) * extent, i.e. the half-open lattice on the box.
    Vec2 at(int i, int j) const {
        return Vec2{box.xmin + box.width() * double(i) / double(nx),
                    box.ymin + box.height() * double(j) / double(ny)};
    }
    /// Row-major (j outer, i inner) list of all samples.
    std::vector<Vec2> points() const;
};

// Convex polygons -----------------------------------------------------------

/// Monotone-chain convex hull; counterclockwise, collinear points dropped,
/// ties broken lexicographically. Degenerate input yields 1 or 2 vertices.
std::vector<Vec2> convex_hull(std::span<const Vec2> points);

/// Euclidean distance from p to the convex region spanned by hull (0 inside).
double distance_to_convex(const Vec2& p, std::span<const Vec2> hull);

/// Hausdorff distance between two convex regions given by their hulls.
double hausdorff_convex(std::span<const Vec2> a, std::span<const Vec2> b);

/// Signed distance to the hull boundary: positive strictly inside, negative
/// outside. Hulls with fewer than 3 vertices have no interior.
double interior_margin(const Vec2& p, std::span<const Vec2> hull);

/// True when the convex hull contains p up to tolerance tol.
bool hull_contains(std::span<const Vec2> hull, const Vec2& p, double tol = 1e-12);

// Segments ------------------------------------------------------------------

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

struct SegmentHit {
    double s = 0.0;  ///< parameter on the first segment
    double t = 0.0;  ///< parameter on the second segment
    Vec2 point;
};

/// Intersection of segments [p0,p1] and [q0,q1] in the non-parallel case.
/// Parameters are accepted in [0,1] inclusive; parallel segments never hit.
bool segment_intersection(const Vec2& p0, const Vec2& p1, const Vec2& q0, const Vec2& q1,
                          SegmentHit& hit);

}  // namespace torusdyn
