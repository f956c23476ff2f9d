#include "torusdyn/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace torusdyn {

std::string_view to_string(ManifoldKind k) { return k == ManifoldKind::stable ? "stable" : "unstable"; }
std::string_view to_string(Branch b) { return b == Branch::plus ? "+" : "-"; }

namespace {

Vec2 eigenvector(const Mat2& m, double lambda) {
    const Vec2 v1{m.b, lambda - m.a};
    const Vec2 v2{lambda - m.d, m.c};
    Vec2 v = norm(v1) >= norm(v2) ? v1 : v2;
    v = v / norm(v);
    if (v.y < 0.0 || (v.y == 0.0 && v.x < 0.0)) v = -v;
    return v;
}

}  // namespace

EigenFrame eigen_frame(const PeriodicPoint& pp) {
    if (classify(pp.jacobian) != Hyperbolicity::hyperbolic_positive)
        throw std::invalid_argument("eigen_frame needs a hyperbolic_positive periodic point");
    const Eigenvalues e = eigenvalues(pp.jacobian);
    EigenFrame f;
    f.lambda_unstable = e.first;
    f.lambda_stable = e.second;
    f.unstable = eigenvector(pp.jacobian, e.first);
    f.stable = eigenvector(pp.jacobian, e.second);
    return f;
}

Vec2 manifold_step(const LiftedTorusMap& map, const PeriodicPoint& pp, ManifoldKind kind, const Vec2& z) {
    Vec2 w = z;
    if (kind == ManifoldKind::unstable) {
        for (std::int64_t i = 0; i < pp.period; ++i) w = map.forward(w);
        return w - to_vec(pp.translation);
    }
    w += to_vec(pp.translation);
    for (std::int64_t i = 0; i < pp.period; ++i) w = map.inverse(w);
    return w;
}

Vec2 manifold_pullback(const LiftedTorusMap& map, const PeriodicPoint& pp, ManifoldKind kind, const Vec2& z) {
    return manifold_step(map, pp, kind == ManifoldKind::unstable ? ManifoldKind::stable : ManifoldKind::unstable, z);
}

ManifoldCurve grow_manifold(const LiftedTorusMap& map, const PeriodicPoint& pp, ManifoldKind kind,
                            Branch branch, const GrowthOptions& options) {
    if (!(options.arclength_budget > 0.0) || !(options.h_max > 0.0) || !(options.delta_seed > 0.0))
        throw std::invalid_argument("growth budget, h_max and delta_seed must be positive");
    const EigenFrame frame = eigen_frame(pp);

    ManifoldCurve curve;
    curve.owner = pp;
    curve.kind = kind;
    curve.branch = branch;
    curve.delta_seed = options.delta_seed;
    const Vec2 e = kind == ManifoldKind::unstable ? frame.unstable : frame.stable;
    curve.direction = branch == Branch::plus ? e : -e;
    curve.expansion = kind == ManifoldKind::unstable ? frame.lambda_unstable : 1.0 / frame.lambda_stable;

    const double log_mu = std::log(curve.expansion);
    auto evaluate = [&](double t) {
        const double level = std::floor(t);
        Vec2 z = pp.point + curve.direction * (options.delta_seed * std::exp(log_mu * (t - level)));
        for (std::int64_t i = 0; i < std::int64_t(level); ++i) z = manifold_step(map, pp, kind, z);
        curve.log.map_applications += std::int64_t(level);
        if (!is_finite(z)) throw std::runtime_error("non-finite manifold point");
        return z;
    };

    constexpr double kMinStep = 1e-12;
    constexpr double kMaxStep = 1.0 / 8.0;
    double t = 0.0;
    double dt = 1.0 / 64.0;
    Vec2 last = evaluate(t);
    curve.vertices.push_back(last);
    curve.params.push_back(t);
    while (curve.arclength < options.arclength_budget) {
        if (curve.vertices.size() >= options.vertex_cap)
            throw std::runtime_error("manifold refinement exceeded the vertex cap");
        double step = dt;
        Vec2 next;
        double gap = 0.0;
        for (;;) {
            next = evaluate(t + step);
            gap = distance(next, last);
            bool ok = gap <= options.h_max;
            if (ok) {
                // the chord test alone misses hairpins folded inside one step
                const Vec2 mid = evaluate(t + 0.5 * step);
                ok = distance(mid, (last + next) * 0.5) <= 0.5 * options.h_max;
            }
            if (ok) break;
            if (step <= kMinStep) {
                ++curve.log.forced;
                break;
            }
            step *= 0.5;
            ++curve.log.refinements;
        }
        t += step;
        curve.vertices.push_back(next);
        curve.params.push_back(t);
        curve.arclength += gap;
        last = next;
        dt = std::min(kMaxStep, gap < 0.25 * options.h_max ? 2.0 * step : step);
    }
    if (t < 1.0)
        throw std::runtime_error("arclength budget exhausted before the first fundamental domain was covered");
    return curve;
}

std::vector<double> pullback_distances(const LiftedTorusMap& map, const ManifoldCurve& curve,
                                       std::size_t vertex) {
    const auto levels = std::int64_t(std::floor(curve.params.at(vertex)));
    std::vector<double> out;
    Vec2 z = curve.vertices[vertex];
    for (std::int64_t m = 0; m <= levels; ++m) {
        out.push_back(distance(z, curve.owner.point));
        z = manifold_pullback(map, curve.owner, curve.kind, z);
    }
    return out;
}

double pullback_slope(const LiftedTorusMap& map, const ManifoldCurve& curve,
                      const std::vector<std::size_t>& vertices, double radius) {
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t v : vertices) {
        const auto d = pullback_distances(map, curve, v);
        std::vector<std::pair<double, double>> pts;
        for (std::size_t m = 0; m < d.size(); ++m)
            if (d[m] > 0.0 && d[m] < radius) pts.emplace_back(double(m), std::log(d[m]));
        if (pts.size() < 2) continue;
        double mx = 0.0, my = 0.0;
        for (const auto& [x, y] : pts) {
            mx += x;
            my += y;
        }
        mx /= double(pts.size());
        my /= double(pts.size());
        for (const auto& [x, y] : pts) {
            sxy += (x - mx) * (y - my);
            sxx += (x - mx) * (x - mx);
        }
    }
    if (sxx == 0.0) throw std::runtime_error("pullback_slope: not enough pullbacks inside the radius");
    return sxy / sxx;
}

}  // namespace torusdyn
