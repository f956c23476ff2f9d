#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace torusdyn {

using Rational = boost::multiprecision::cpp_rational;

struct RVec2 {
    Rational x;
    Rational y;

    friend bool operator==(const RVec2&, const RVec2&) = default;
    friend RVec2 operator+(const RVec2& a, const RVec2& b) { return {a.x + b.x, a.y + b.y}; }
    friend RVec2 operator-(const RVec2& a, const RVec2& b) { return {a.x - b.x, a.y - b.y}; }
    friend RVec2 operator*(const Rational& s, const RVec2& a) { return {s * a.x, s * a.y}; }
    Rational norm2() const { return x * x + y * y; }
};

Rational cross(const RVec2& a, const RVec2& b);

/// Parses "p/q", an integer or a finite decimal such as "-0.25" exactly.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& r);
double to_double(const Rational& r);

struct SftEdge {
    std::size_t from = 0;
    std::size_t to = 0;
    RVec2 weight;
};

/// Directed graph of a subshift of finite type with a vector weight on every
/// edge. Parallel edges are allowed (two self-loops at one vertex, say); the
/// 0/1 transition matrix is the support of the edge list.
class WeightedSft {
public:
    WeightedSft(std::size_t vertices, std::vector<SftEdge> edges);

    /// Text form: a header line `vertices N`, then `i j wx wy` per edge with
    /// 0-based vertex indices. Blank lines and `#` comments are ignored.
    /// Throws std::invalid_argument with the offending line number.
    static WeightedSft parse(std::string_view text);
    std::string to_text() const;

    std::size_t vertex_count() const { return vertices_; }
    const std::vector<SftEdge>& edges() const { return edges_; }
    std::vector<std::vector<int>> adjacency() const;
    /// Largest squared edge-weight norm.
    Rational max_weight_norm2() const;

private:
    std::size_t vertices_;
    std::vector<SftEdge> edges_;
};

/// A simple cycle as a closed sequence of edge indices starting at its smallest vertex.
struct SftCycle {
    std::vector<std::size_t> edges;
    RVec2 sum;
    RVec2 mean;
};

struct CycleEnumeration {
    std::vector<SftCycle> cycles;
    bool truncated = false;
};

/// Simple cycles in lexicographic order of (start vertex, edge sequence), at most cap of them.
CycleEnumeration enumerate_simple_cycles(const WeightedSft& sft, std::size_t cap);

struct CycleHull {
    std::vector<RVec2> vertices;  ///< counterclockwise, collinear points dropped
    std::vector<SftCycle> cycles;
    bool partial = false;         ///< cycle cap was reached
    int dimension = 0;            ///< 0 point, 1 segment, 2 polygon
};

/// Convex hull of simple-cycle mean weights. Requires cap >= vertex count.
CycleHull cycle_rotation_hull(const WeightedSft& sft, std::size_t cycle_cap = 10'000);

/// Exact monotone-chain hull of rational points.
std::vector<RVec2> rational_hull(std::vector<RVec2> points);

/// True when p lies in the relative interior of the hull.
bool in_relative_interior(const std::vector<RVec2>& hull, const RVec2& p);

/// Periodic edge word whose mean weight is exactly the target.
struct BoundedDeviationOrbit {
    std::vector<std::size_t> word;          ///< edge indices of one period (a closed walk)
    RVec2 target;
    std::vector<std::size_t> support;       ///< indices into the cycle list that were combined
    std::vector<std::int64_t> repetitions;  ///< how often each support cycle is traversed
    std::int64_t connector_passes = 0;      ///< traversals of the connecting closed walk
    Rational deviation_bound2;              ///< Const^2 = (word length)^2 * max |psi|^2
    double deviation_bound = 0.0;
    std::int64_t verified_horizon = 0;
    Rational max_deviation2;                ///< largest squared deviation seen up to the horizon
};

/// Builds a closed walk with mean exactly rho by combining simple cycles with
/// positive rational weights and joining them with shortest paths, then checks
/// the partial-sum bound up to horizon. rho must equal a simple-cycle mean or
/// lie in the relative interior of the cycle hull (std::invalid_argument
/// otherwise); a missing connecting path raises std::runtime_error.
BoundedDeviationOrbit bounded_deviation_orbit(const WeightedSft& sft, const RVec2& rho, std::int64_t horizon,
                                              std::size_t cycle_cap = 10'000);

struct DeviationScan {
    Rational max2;  ///< max over n of |sum_{j<n} psi(w_j) - n rho|^2
    double max = 0.0;
    std::int64_t argmax = 0;
    std::vector<double> running_max;  ///< running maximum after each n (size n_max)
};

/// Exact partial-sum scan for n = 1..n_max. Throws InvariantViolation if the
/// bound of the orbit is exceeded.
DeviationScan verify_deviation(const WeightedSft& sft, const BoundedDeviationOrbit& orbit, std::int64_t n_max);

}  // namespace torusdyn
