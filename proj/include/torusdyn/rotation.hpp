#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "torusdyn/geometry.hpp"
#include "torusdyn/map.hpp"

namespace torusdyn {

struct Horizons {
    std::int64_t short_n = 1000;
    std::int64_t long_n = 10000;
};

struct SampleMean {
    Vec2 seed;
    Vec2 mean;
    std::int64_t horizon = 0;
};

/// Inner estimate of the rotation set: hull of Birkhoff means at the long
/// horizon, with the short-horizon hull kept for the convergence gap.
struct RotationPolygon {
    std::vector<Vec2> hull;
    std::vector<Vec2> short_hull;
    std::vector<SampleMean> sample_means;  ///< long-horizon means, seed order
    Horizons horizons;
    double hausdorff_gap = 0.0;

    /// Signed distance of p to the hull boundary (positive inside). Heuristic only.
    double margin(const Vec2& p) const { return interior_margin(p, hull); }
};

/// Vertical analogue for maps in a Dehn-twist class.
struct RotationInterval {
    double lo = 0.0;
    double hi = 0.0;
    double short_lo = 0.0;
    double short_hi = 0.0;
    std::vector<SampleMean> sample_means;  ///< mean.y holds the vertical mean
    Horizons horizons;
    double hausdorff_gap = 0.0;

    /// min(v - lo, hi - v): positive when v is strictly inside.
    double margin(double v) const { return std::min(v - lo, hi - v); }
};

/// (f^n(z) - z) / n. Throws std::invalid_argument for n < 1.
Vec2 birkhoff_mean(const LiftedTorusMap& map, const Vec2& z, std::int64_t n);

/// Requires an identity-class map, short_n < long_n and at least one seed.
RotationPolygon estimate_rotation_set(const LiftedTorusMap& map, std::span<const Vec2> seeds,
                                      const Horizons& horizons = {});
RotationPolygon estimate_rotation_set(const LiftedTorusMap& map, const SeedGrid& grid,
                                      const Horizons& horizons = {});

/// Requires a Dehn-twist-class map.
RotationInterval estimate_vertical_rotation_set(const LiftedTorusMap& map, std::span<const Vec2> seeds,
                                                const Horizons& horizons = {});
RotationInterval estimate_vertical_rotation_set(const LiftedTorusMap& map, const SeedGrid& grid,
                                                const Horizons& horizons = {});

/// Long-horizon mean when the two horizon means differ by less than tol.
std::optional<Vec2> rotation_vector_of_point(const LiftedTorusMap& map, const Vec2& z,
                                             const Horizons& horizons, double tol);
/// Vertical rotation number of z, same convergence rule.
std::optional<double> vertical_rotation_number_of_point(const LiftedTorusMap& map, const Vec2& z,
                                                        const Horizons& horizons, double tol);

/// Mean one-step displacement f(z) - z over the samples (empirical integral of
/// the displacement function against the sampling measure).
Vec2 measure_rotation_vector(const LiftedTorusMap& map, std::span<const Vec2> samples);

}  // namespace torusdyn
