#include "torusdyn/map.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "torusdyn/errors.hpp"
#include "torusdyn/rng.hpp"

namespace torusdyn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

class StandardRule final : public MapRule {
public:
    StandardRule(double k, double eps) : k_(k), eps_(eps) {}

    Vec2 forward(const Vec2& z) const override {
        const double kick = k_ * std::sin(kTwoPi * z.x);
        return Vec2{z.x + z.y + kick, z.y + kick + eps_};
    }
    Vec2 inverse(const Vec2& w) const override {
        // x + (y + kick) = X and y + kick = Y - eps
        const double x = w.x - w.y + eps_;
        return Vec2{x, w.y - k_ * std::sin(kTwoPi * x) - eps_};
    }
    Mat2 jacobian(const Vec2& z) const override {
        const double s = kTwoPi * k_ * std::cos(kTwoPi * z.x);
        return Mat2{1.0 + s, 1.0, s, 1.0};
    }

private:
    double k_;
    double eps_;
};

class TranslationRule final : public MapRule {
public:
    explicit TranslationRule(Vec2 shift) : shift_(shift) {}
    Vec2 forward(const Vec2& z) const override { return z + shift_; }
    Vec2 inverse(const Vec2& z) const override { return z - shift_; }
    Mat2 jacobian(const Vec2&) const override { return Mat2::identity(); }

private:
    Vec2 shift_;
};

class DriftSaddleRule final : public MapRule {
public:
    DriftSaddleRule(double a, double b) : a_(a), b_(b) {}

    Vec2 forward(const Vec2& z) const override {
        const double y1 = z.y + b_ * std::sin(kTwoPi * z.x);
        return Vec2{z.x + a_ * std::sin(kTwoPi * y1), y1};
    }
    Vec2 inverse(const Vec2& w) const override {
        const double x = w.x - a_ * std::sin(kTwoPi * w.y);
        return Vec2{x, w.y - b_ * std::sin(kTwoPi * x)};
    }
    Mat2 jacobian(const Vec2& z) const override {
        const double y1 = z.y + b_ * std::sin(kTwoPi * z.x);
        const Mat2 vertical{1.0, 0.0, kTwoPi * b_ * std::cos(kTwoPi * z.x), 1.0};
        const Mat2 horizontal{1.0, kTwoPi * a_ * std::cos(kTwoPi * y1), 0.0, 1.0};
        return horizontal * vertical;
    }

private:
    double a_;
    double b_;
};

class LinearRule final : public MapRule {
public:
    LinearRule(double lu, double ls) : lu_(lu), ls_(ls) {}
    Vec2 forward(const Vec2& z) const override { return Vec2{lu_ * z.x, ls_ * z.y}; }
    Vec2 inverse(const Vec2& z) const override { return Vec2{z.x / lu_, z.y / ls_}; }
    Mat2 jacobian(const Vec2&) const override { return Mat2{lu_, 0.0, 0.0, ls_}; }

private:
    double lu_;
    double ls_;
};

Vec2 reflect(const Vec2& z) { return Vec2{z.x, -z.y}; }

class ReflectedRule final : public MapRule {
public:
    explicit ReflectedRule(std::shared_ptr<const MapRule> base) : base_(std::move(base)) {}
    Vec2 forward(const Vec2& z) const override { return reflect(base_->forward(reflect(z))); }
    Vec2 inverse(const Vec2& z) const override { return reflect(base_->inverse(reflect(z))); }
    Mat2 jacobian(const Vec2& z) const override {
        const Mat2 j = base_->jacobian(reflect(z));
        return Mat2{j.a, -j.b, -j.c, j.d};
    }

private:
    std::shared_ptr<const MapRule> base_;
};

class InverseRule final : public MapRule {
public:
    explicit InverseRule(std::shared_ptr<const MapRule> base) : base_(std::move(base)) {}
    Vec2 forward(const Vec2& z) const override { return base_->inverse(z); }
    Vec2 inverse(const Vec2& z) const override { return base_->forward(z); }
    Mat2 jacobian(const Vec2& z) const override { return base_->jacobian(base_->inverse(z)).inverse(); }

private:
    std::shared_ptr<const MapRule> base_;
};

HomotopyMatrix dehn_or_identity(std::int64_t k) {
    return k == 0 ? HomotopyMatrix::identity() : HomotopyMatrix::dehn_twist(k);
}

}  // namespace

HomotopyMatrix HomotopyMatrix::dehn_twist(std::int64_t k) {
    if (k == 0) throw std::invalid_argument("Dehn twist exponent must be nonzero");
    return HomotopyMatrix(k);
}

LiftedTorusMap::LiftedTorusMap(std::string name, MapParams params, HomotopyMatrix homotopy,
                               std::shared_ptr<const MapRule> rule)
    : name_(std::move(name)), params_(std::move(params)), homotopy_(homotopy), rule_(std::move(rule)) {
    if (!rule_) throw std::invalid_argument("LiftedTorusMap requires a rule");
}

double LiftedTorusMap::param(const std::string& key) const {
    for (const auto& [k, v] : params_)
        if (k == key) return v;
    throw std::out_of_range("map '" + name_ + "' has no parameter '" + key + "'");
}

LiftedTorusMap make_standard_map(double k, double epsilon) {
    if (!std::isfinite(k) || !std::isfinite(epsilon))
        throw std::invalid_argument("standard map parameters must be finite");
    return LiftedTorusMap("standard", {{"k", k}, {"epsilon", epsilon}}, HomotopyMatrix::dehn_twist(1),
                          std::make_shared<StandardRule>(k, epsilon));
}

LiftedTorusMap make_identity_map() {
    return LiftedTorusMap("identity", {}, HomotopyMatrix::identity(),
                          std::make_shared<TranslationRule>(Vec2{0.0, 0.0}));
}

LiftedTorusMap make_translation_map(double a, double b) {
    return LiftedTorusMap("translation", {{"a", a}, {"b", b}}, HomotopyMatrix::identity(),
                          std::make_shared<TranslationRule>(Vec2{a, b}));
}

LiftedTorusMap make_drift_saddle(double a, double b) {
    return LiftedTorusMap("drift_saddle", {{"a", a}, {"b", b}}, HomotopyMatrix::identity(),
                          std::make_shared<DriftSaddleRule>(a, b));
}

LiftedTorusMap make_linear_saddle(double lu, double ls) {
    if (lu == 0.0 || ls == 0.0) throw std::invalid_argument("linear saddle needs nonzero eigenvalues");
    return LiftedTorusMap("linear_saddle", {{"lu", lu}, {"ls", ls}}, HomotopyMatrix::identity(),
                          std::make_shared<LinearRule>(lu, ls));
}

LiftedTorusMap reflect_vertical(const LiftedTorusMap& map) {
    return LiftedTorusMap(map.name() + "_reflected", map.params(),
                          dehn_or_identity(-map.homotopy().dehn_exponent()),
                          std::make_shared<ReflectedRule>(map.rule()));
}

LiftedTorusMap inverse_of(const LiftedTorusMap& map) {
    return LiftedTorusMap(map.name() + "_inverse", map.params(),
                          dehn_or_identity(-map.homotopy().dehn_exponent()),
                          std::make_shared<InverseRule>(map.rule()));
}

Vec2 eval_lift(const LiftedTorusMap& map, const Vec2& z) {
    const Vec2 w = map.forward(z);
    if (!is_finite(w)) throw NumericalAbort("non-finite image under map '" + map.name() + "'");
    return w;
}

namespace {

bool escaped(const Vec2& z, double bound) {
    return !is_finite(z) || std::abs(z.x) > bound || std::abs(z.y) > bound;
}

void check_budget(std::int64_t n, const IterationLimits& limits) {
    if (n > limits.budget || n < -limits.budget)
        throw std::invalid_argument("iteration count exceeds configured budget");
}

}  // namespace

std::vector<Vec2> iterate(const LiftedTorusMap& map, const Vec2& z, std::int64_t n,
                          const IterationLimits& limits) {
    check_budget(n, limits);
    std::vector<Vec2> orbit;
    orbit.reserve(std::size_t(std::abs(n)) + 1);
    orbit.push_back(z);
    const std::int64_t steps = std::abs(n);
    Vec2 w = z;
    for (std::int64_t i = 0; i < steps; ++i) {
        w = n > 0 ? map.forward(w) : map.inverse(w);
        if (escaped(w, limits.escape_bound))
            throw OrbitEscape("orbit left the escape box after " + std::to_string(i + 1) + " steps",
                              std::move(orbit));
        orbit.push_back(w);
    }
    return orbit;
}

Vec2 iterate_endpoint(const LiftedTorusMap& map, Vec2 z, std::int64_t n, const IterationLimits& limits) {
    check_budget(n, limits);
    const std::int64_t steps = std::abs(n);
    for (std::int64_t i = 0; i < steps; ++i) {
        z = n > 0 ? map.forward(z) : map.inverse(z);
        if (escaped(z, limits.escape_bound))
            throw NumericalAbort("orbit left the escape box after " + std::to_string(i + 1) + " steps");
    }
    return z;
}

CellPoint CellPoint::from(const Vec2& z) {
    const double fx = std::floor(z.x);
    const double fy = std::floor(z.y);
    return CellPoint{Vec2{z.x - fx, z.y - fy}, IVec2{std::int64_t(fx), std::int64_t(fy)}};
}

CellPoint advance(const LiftedTorusMap& map, const CellPoint& p) {
    const Vec2 w = map.forward(p.frac);
    if (!is_finite(w) || std::abs(w.x) > 1e15 || std::abs(w.y) > 1e15)
        throw NumericalAbort("non-finite image under map '" + map.name() + "'");
    const CellPoint local = CellPoint::from(w);
    return CellPoint{local.frac, map.homotopy().apply(p.cell) + local.cell};
}

Vec2 displacement(const LiftedTorusMap& map, const Vec2& z, std::int64_t n) {
    const CellPoint start = CellPoint::from(z);
    CellPoint p = start;
    for (std::int64_t i = 0; i < n; ++i) p = advance(map, p);
    const IVec2 dc = p.cell - start.cell;
    return Vec2{(p.frac.x - start.frac.x) + double(dc.a), (p.frac.y - start.frac.y) + double(dc.b)};
}

double deck_residual(const LiftedTorusMap& map, const Vec2& z, const IVec2& v) {
    const Vec2 shifted = map.forward(z + to_vec(v));
    const Vec2 expected = map.forward(z) + to_vec(map.homotopy().apply(v));
    return distance(shifted, expected);
}

LiftValidation validate_lift(const LiftedTorusMap& map, std::size_t samples, std::uint64_t seed,
                             int vrange) {
    SplitRng rng = SplitRng(seed).split("validate_lift");
    LiftValidation out;
    out.samples = samples;
    for (std::size_t s = 0; s < samples; ++s) {
        const Vec2 z{rng.uniform(), rng.uniform()};
        for (int a = -vrange; a <= vrange; ++a)
            for (int b = -vrange; b <= vrange; ++b)
                out.max_deck_residual = std::max(out.max_deck_residual, deck_residual(map, z, IVec2{a, b}));
        out.max_det_error = std::max(out.max_det_error, std::abs(std::abs(map.jacobian(z).det()) - 1.0));
        out.max_inverse_error = std::max(out.max_inverse_error, distance(map.inverse(map.forward(z)), z));
    }
    return out;
}

}  // namespace torusdyn
