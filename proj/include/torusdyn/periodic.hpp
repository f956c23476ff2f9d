#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "torusdyn/geometry.hpp"
#include "torusdyn/map.hpp"
#include "torusdyn/rng.hpp"

namespace torusdyn {

enum class Hyperbolicity { hyperbolic_positive, hyperbolic_negative, elliptic, parabolic };

std::string_view to_string(Hyperbolicity h);

struct Eigenvalues {
    bool real = true;
    /// Real case: first has the larger modulus. Complex case: first +- i*imag.
    double first = 0.0;
    double second = 0.0;
    double imag = 0.0;
};

Eigenvalues eigenvalues(const Mat2& m);

/// Q with f^q(Q) = Q + (p, r).
struct PeriodicPoint {
    Vec2 point;
    std::int64_t period = 1;
    IVec2 translation;
    Mat2 jacobian;  ///< D(f^q) at point
    Eigenvalues eigen;
    Hyperbolicity classification = Hyperbolicity::elliptic;
    double residual = 0.0;
};

struct NewtonOptions {
    double step_tol = 1e-12;
    double residual_tol = 1e-10;
    int max_iter = 50;
    /// |det(D f^q - I)| below this is treated as a singular Newton matrix.
    double singular_tol = 1e-12;
};

enum class NewtonStatus { converged, singular, no_convergence };

struct NewtonResult {
    NewtonStatus status = NewtonStatus::no_convergence;
    std::optional<PeriodicPoint> point;
    int iterations = 0;
};

/// D(f^q)(z) by the chain rule along the orbit.
Mat2 orbit_jacobian(const LiftedTorusMap& map, const Vec2& z, std::int64_t q);

/// f^q(z) - z - pr.
Vec2 periodic_defect(const LiftedTorusMap& map, const Vec2& z, std::int64_t q, const IVec2& pr);

/// Assembles a PeriodicPoint (jacobian, eigen-data, class, residual) at z.
PeriodicPoint make_periodic_point(const LiftedTorusMap& map, const Vec2& z, std::int64_t q,
                                  const IVec2& pr);

/// Newton's method on F(z) = f^q(z) - z - pr.
NewtonResult newton_periodic(const LiftedTorusMap& map, std::int64_t q, const IVec2& pr, const Vec2& seed,
                             const NewtonOptions& options = {});

/// Trace test on D(f^q); |trace| within 1e-9 of 2 is parabolic.
Hyperbolicity classify(const Mat2& jacobian);
Hyperbolicity classify(const PeriodicPoint& pp);

/// The same point viewed with period 2q and translation pr + A^q pr, whose
/// Jacobian is the square (positive eigenvalues for a hyperbolic_negative point).
PeriodicPoint doubled(const LiftedTorusMap& map, const PeriodicPoint& pp);

struct SweepResult {
    std::vector<PeriodicPoint> orbits;
    std::size_t seeds = 0;
    std::size_t converged = 0;
    std::size_t singular = 0;
    std::size_t diverged = 0;

    /// Singular Newton matrices were met; fixed sets may be non-isolated.
    bool non_isolated() const { return singular > 0; }
};

/// Newton from every seed, deduplicated modulo 1e-8 on the torus, integer
/// translations and cyclic shifts along the q-orbit. Reported points are
/// normalised by translations that keep pr unchanged (both coordinates into
/// [0,1) for the identity class, x only for a Dehn twist). When jitter is
/// given each seed is moved by up to jitter_scale in each coordinate.
SweepResult sweep_periodic(const LiftedTorusMap& map, std::int64_t q, const IVec2& pr,
                           std::span<const Vec2> seeds, const NewtonOptions& options = {},
                           std::optional<SplitRng> jitter = std::nullopt, double jitter_scale = 0.0);
SweepResult sweep_periodic(const LiftedTorusMap& map, std::int64_t q, const IVec2& pr, const SeedGrid& grid,
                           const NewtonOptions& options = {});

/// Distance between the torus projections of a and b.
double torus_distance(const Vec2& a, const Vec2& b);

}  // namespace torusdyn
