#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "torusdyn/geometry.hpp"
#include "torusdyn/map.hpp"
#include "torusdyn/periodic.hpp"

namespace torusdyn {

enum class ManifoldKind { stable, unstable };
enum class Branch { plus, minus };

std::string_view to_string(ManifoldKind k);
std::string_view to_string(Branch b);

/// Unit eigenvectors of D(f^q) at a hyperbolic_positive point. Each is
/// oriented into the upper half plane, or toward +x when horizontal.
struct EigenFrame {
    Vec2 unstable;
    Vec2 stable;
    double lambda_unstable = 0.0;  ///< > 1
    double lambda_stable = 0.0;    ///< in (0, 1)
};

/// Throws std::invalid_argument unless pp is hyperbolic_positive.
EigenFrame eigen_frame(const PeriodicPoint& pp);

struct GrowthOptions {
    double arclength_budget = 200.0;
    double h_max = 1e-3;
    double delta_seed = 1e-6;
    std::size_t vertex_cap = 2'000'000;
};

/// Polyline approximation of one branch of W^u or W^s of a periodic point.
///
/// Vertex i is P(params[i]) with P(t) = G^n(Q + delta mu^(t-n) e), n = floor(t),
/// where G is F(z) = f^q(z) - pr for the unstable kind and F^{-1} for the
/// stable kind, e the signed eigendirection and mu the expansion of G along e.
struct ManifoldCurve {
    PeriodicPoint owner;
    ManifoldKind kind = ManifoldKind::unstable;
    Branch branch = Branch::plus;
    std::vector<Vec2> vertices;
    std::vector<double> params;
    double arclength = 0.0;
    Vec2 direction;        ///< signed eigendirection of the branch
    double expansion = 0;  ///< mu
    double delta_seed = 0;

    struct GrowthLog {
        std::int64_t map_applications = 0;  ///< pushforwards (or pullbacks for stable)
        std::size_t refinements = 0;        ///< rejected steps that were halved
        std::size_t forced = 0;             ///< steps accepted at the minimum parameter step
    } log;
};

/// Grows one branch until its arclength reaches the budget, keeping adjacent
/// vertices at most h_max apart. Throws std::invalid_argument for a
/// non-hyperbolic_positive owner or non-positive options, std::runtime_error when
/// the budget ends inside the first fundamental domain or the vertex cap is hit.
ManifoldCurve grow_manifold(const LiftedTorusMap& map, const PeriodicPoint& pp, ManifoldKind kind,
                            Branch branch, const GrowthOptions& options = {});

/// G (forward for unstable, inverse for stable) and its inverse for the curve's owner.
Vec2 manifold_step(const LiftedTorusMap& map, const PeriodicPoint& pp, ManifoldKind kind, const Vec2& z);
Vec2 manifold_pullback(const LiftedTorusMap& map, const PeriodicPoint& pp, ManifoldKind kind, const Vec2& z);

/// Distances |G^{-m}(v) - Q| for m = 0..floor(param) for one vertex.
std::vector<double> pullback_distances(const LiftedTorusMap& map, const ManifoldCurve& curve,
                                       std::size_t vertex);

/// Pooled least-squares slope of log(distance) against m, with a separate
/// intercept per vertex, using only pullbacks closer than radius to Q.
/// The ideal value is -log(mu).
double pullback_slope(const LiftedTorusMap& map, const ManifoldCurve& curve,
                      const std::vector<std::size_t>& vertices, double radius);

}  // namespace torusdyn
