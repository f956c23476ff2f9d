#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "torusdyn/geometry.hpp"

namespace torusdyn {

/// Action of a torus map on H1: either the identity or the Dehn twist [[1,k],[0,1]], k != 0.
class HomotopyMatrix {
public:
    static HomotopyMatrix identity() { return HomotopyMatrix(0); }
    /// Throws std::invalid_argument for k == 0.
    static HomotopyMatrix dehn_twist(std::int64_t k);

    bool is_identity() const { return k_ == 0; }
    bool is_dehn_twist() const { return k_ != 0; }
    /// Off-diagonal entry; 0 for the identity class.
    std::int64_t dehn_exponent() const { return k_; }

    IVec2 apply(const IVec2& v) const { return IVec2{v.a + k_ * v.b, v.b}; }
    Vec2 apply(const Vec2& v) const { return Vec2{v.x + double(k_) * v.y, v.y}; }
    /// A^q (q may be negative).
    HomotopyMatrix power(std::int64_t q) const { return HomotopyMatrix(k_ * q); }
    Mat2 as_matrix() const { return Mat2{1.0, double(k_), 0.0, 1.0}; }

    friend bool operator==(const HomotopyMatrix&, const HomotopyMatrix&) = default;

private:
    explicit HomotopyMatrix(std::int64_t k) : k_(k) {}
    std::int64_t k_;
};

/// Closed-form plane rules behind a lifted map.
class MapRule {
public:
    virtual ~MapRule() = default;
    virtual Vec2 forward(const Vec2& z) const = 0;
    virtual Vec2 inverse(const Vec2& z) const = 0;
    virtual Mat2 jacobian(const Vec2& z) const = 0;
};

using MapParams = std::vector<std::pair<std::string, double>>;

/// A lift f~ of a torus diffeomorphism: f~(z + v) = f~(z) + A v for integer v.
///
/// Immutable after construction; copies share the rule. The lift contract is
/// not enforced here, see deck_residual() and validate_lift().
class LiftedTorusMap {
public:
    LiftedTorusMap(std::string name, MapParams params, HomotopyMatrix homotopy,
                   std::shared_ptr<const MapRule> rule);

    const std::string& name() const { return name_; }
    const MapParams& params() const { return params_; }
    /// Named parameter; throws std::out_of_range if absent.
    double param(const std::string& key) const;
    const HomotopyMatrix& homotopy() const { return homotopy_; }

    Vec2 forward(const Vec2& z) const { return rule_->forward(z); }
    Vec2 inverse(const Vec2& z) const { return rule_->inverse(z); }
    Mat2 jacobian(const Vec2& z) const { return rule_->jacobian(z); }
    /// Jacobian of the inverse map at z.
    Mat2 inverse_jacobian(const Vec2& z) const { return rule_->jacobian(rule_->inverse(z)).inverse(); }

    const std::shared_ptr<const MapRule>& rule() const { return rule_; }

private:
    std::string name_;
    MapParams params_;
    HomotopyMatrix homotopy_;
    std::shared_ptr<const MapRule> rule_;
};

struct IterationLimits {
    std::int64_t budget = 100'000'000;
    double escape_bound = 1e9;
};

// Families ------------------------------------------------------------------

/// Perturbed Chirikov standard map lift
///   (x, y) -> (x + y + k sin(2 pi x), y + k sin(2 pi x) + epsilon),
/// homotopic to the Dehn twist [[1,1],[0,1]]. epsilon = 0 is the classical family.
LiftedTorusMap make_standard_map(double k, double epsilon = 0.0);

LiftedTorusMap make_identity_map();

/// z -> z + (a, b); homotopic to the identity.
LiftedTorusMap make_translation_map(double a, double b);

/// Composition of a horizontal and a vertical sine shear,
///   y1 = y + b sin(2 pi x),  x1 = x + a sin(2 pi y1).
/// Homotopic to the identity. For a > 1 the points (0, asin(+-1/a)/(2 pi))
/// (second branch) are fixed with translation (+-1, 0); (0,0) and (1/2,1/2)
/// are saddles with zero translation whenever a b > 0.
LiftedTorusMap make_drift_saddle(double a, double b);

/// Diagonal linear plane map (x, y) -> (lu x, ls y). Not a torus lift unless
/// lu = ls = 1; used as an exactly solvable saddle.
LiftedTorusMap make_linear_saddle(double lu, double ls);

/// R f R with R(x, y) = (x, -y); homotopy A -> R A R.
LiftedTorusMap reflect_vertical(const LiftedTorusMap& map);

/// The lift f~^{-1} with forward and inverse rules swapped.
LiftedTorusMap inverse_of(const LiftedTorusMap& map);

// Operations ----------------------------------------------------------------

/// Forward image; throws NumericalAbort on a non-finite result.
Vec2 eval_lift(const LiftedTorusMap& map, const Vec2& z);

/// Orbit segment z, f(z), ..., f^n(z) (inverse rule when n < 0), |n| + 1 points.
/// Throws std::invalid_argument if |n| exceeds the budget and OrbitEscape when a
/// coordinate exceeds the escape bound.
std::vector<Vec2> iterate(const LiftedTorusMap& map, const Vec2& z, std::int64_t n,
                          const IterationLimits& limits = {});

/// f^n(z) without storing the orbit; same error behaviour as iterate().
Vec2 iterate_endpoint(const LiftedTorusMap& map, Vec2 z, std::int64_t n,
                      const IterationLimits& limits = {});

/// Plane point stored as an integer cell plus an offset in [0,1)^2.
///
/// Long orbits of a lift are advanced on the offset only and the cell is carried
/// through the homotopy matrix, which keeps sin() arguments small and makes an
/// orbit started at z + v (v integer, z dyadic) bitwise identical to the one at z.
struct CellPoint {
    Vec2 frac;
    IVec2 cell;

    static CellPoint from(const Vec2& z);
    Vec2 point() const { return Vec2{frac.x + double(cell.a), frac.y + double(cell.b)}; }
    /// Vertical coordinate of point() without the horizontal part.
    double height() const { return frac.y + double(cell.b); }
};

/// One step of the lift in cell form; throws NumericalAbort on non-finite images.
CellPoint advance(const LiftedTorusMap& map, const CellPoint& p);

/// f^n(z) - z for n >= 0 computed in cell form.
Vec2 displacement(const LiftedTorusMap& map, const Vec2& z, std::int64_t n);

/// || f(z + v) - f(z) - A v ||.
double deck_residual(const LiftedTorusMap& map, const Vec2& z, const IVec2& v);

struct LiftValidation {
    double max_deck_residual = 0.0;
    double max_det_error = 0.0;
    double max_inverse_error = 0.0;
    std::size_t samples = 0;
};

/// Random-point sweep of the lift contract: deck equivariance over
/// v in [-vrange, vrange]^2, |det Df| - 1, and f^{-1}(f(z)) - z.
LiftValidation validate_lift(const LiftedTorusMap& map, std::size_t samples, std::uint64_t seed,
                             int vrange = 2);

}  // namespace torusdyn
