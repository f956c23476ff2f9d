#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "torusdyn/geometry.hpp"
#include "torusdyn/manifold.hpp"

namespace torusdyn {

/// Discretised rectangle for the transversality test: `length` along the local
/// piece of lambda, `width` across it. Defaults correspond to h_max = 1e-3.
struct CrossingParams {
    double length = 1e-2;
    double width = 2e-3;

    static CrossingParams from_h_max(double h_max) { return CrossingParams{10.0 * h_max, 2.0 * h_max}; }
};

/// A rectangle R around a point of lambda such that R \ lambda splits in two and
/// the crossing set K runs from lambda to another side of R in each half.
struct CrossingWitness {
    Vec2 location;
    IVec2 translate;
    std::size_t piece_segment = 0;
    std::size_t target_segment = 0;
    std::array<Vec2, 4> rectangle{};  ///< corners, counterclockwise
    Vec2 exit_left;                   ///< where K leaves R on the left of lambda
    Vec2 exit_right;                  ///< and on the right
};

/// All witnesses between the polyline `piece` (lambda) and `target` + translate.
///
/// Segment intersections are collected with half-open parameters [0,1) on both
/// polylines (closed at the final vertex) so a crossing through a shared vertex
/// is seen once. Each intersection X is then tested in the rectangle centred on
/// X and aligned with the lambda segment: lambda must run from one short side to
/// the other, and K, followed forwards and backwards from X, must leave R on
/// opposite sides of lambda without meeting lambda again. Touching without a
/// side change yields no witness.
std::vector<CrossingWitness> detect_crossings(std::span<const Vec2> piece, std::span<const Vec2> target,
                                              const IVec2& translate, const CrossingParams& params = {});

/// Outcome of a translate scan cell. `found == false` means "not found at the
/// current budget", never "absent".
struct ScanCell {
    IVec2 translate;
    bool found = false;
    std::size_t witnesses = 0;
    std::optional<CrossingWitness> first;
};

struct TranslateScan {
    std::vector<ScanCell> cells;  ///< row-major: b outer, a inner
    const ScanCell* find(const IVec2& v) const;
};

/// For each (a, b) in [amin, amax] x [bmin, bmax], crossings of every unstable
/// branch against every stable branch translated by (a, b).
TranslateScan translate_scan(std::span<const ManifoldCurve> unstable, std::span<const ManifoldCurve> stable,
                             const IVec2& lo, const IVec2& hi, const CrossingParams& params = {});

/// Grows both branches of W^u and W^s of pp, then scans. Convenience wrapper.
TranslateScan translate_scan(const LiftedTorusMap& map, const PeriodicPoint& pp, const IVec2& lo,
                             const IVec2& hi, const GrowthOptions& growth = {});

/// Largest distance from a vertex of (curve + v) lying in region to the nearest
/// vertex of curve; 0 when no translated vertex lies in region. eps is the
/// bucket size of the neighbour search.
double closure_invariance_score(std::span<const Vec2> curve, const IVec2& v, const Box& region, double eps);

struct Ball {
    Vec2 center;
    double radius = 0.0;
};

struct MixingReport {
    std::vector<bool> hits;            ///< hits[n-1]: some sample of U lands in V after n steps
    std::optional<std::int64_t> tail;  ///< smallest N with hits on all of [N, n_max]
    std::size_t samples = 0;
};

/// Samples U on a disk grid of samples_per_axis^2 candidates and records, for
/// n = 1..n_max, whether any image lies in the open ball V.
MixingReport mixing_probe(const LiftedTorusMap& map, const Ball& u, const Ball& v, std::int64_t n_max,
                          int samples_per_axis = 32);

}  // namespace torusdyn
