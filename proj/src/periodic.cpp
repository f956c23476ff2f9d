#include "torusdyn/periodic.hpp"

#include <cmath>
#include <stdexcept>

#include "torusdyn/parallel.hpp"

namespace torusdyn {

std::string_view to_string(Hyperbolicity h) {
    switch (h) {
        case Hyperbolicity::hyperbolic_positive: return "hyperbolic_positive";
        case Hyperbolicity::hyperbolic_negative: return "hyperbolic_negative";
        case Hyperbolicity::elliptic: return "elliptic";
        case Hyperbolicity::parabolic: return "parabolic";
    }
    return "unknown";
}

Eigenvalues eigenvalues(const Mat2& m) {
    const double tr = m.trace();
    const double disc = tr * tr - 4.0 * m.det();
    Eigenvalues e;
    if (disc >= 0.0) {
        const double root = std::sqrt(disc);
        // avoid cancellation: the larger root directly, the other from the determinant
        const double big = tr >= 0.0 ? 0.5 * (tr + root) : 0.5 * (tr - root);
        e.real = true;
        e.first = big;
        e.second = big != 0.0 ? m.det() / big : 0.0;
    } else {
        e.real = false;
        e.first = e.second = 0.5 * tr;
        e.imag = 0.5 * std::sqrt(-disc);
    }
    return e;
}

Mat2 orbit_jacobian(const LiftedTorusMap& map, const Vec2& z, std::int64_t q) {
    Mat2 acc = Mat2::identity();
    Vec2 w = z;
    for (std::int64_t i = 0; i < q; ++i) {
        acc = map.jacobian(w) * acc;
        w = map.forward(w);
    }
    return acc;
}

Vec2 periodic_defect(const LiftedTorusMap& map, const Vec2& z, std::int64_t q, const IVec2& pr) {
    Vec2 w = z;
    for (std::int64_t i = 0; i < q; ++i) w = map.forward(w);
    return w - z - to_vec(pr);
}

Hyperbolicity classify(const Mat2& jacobian) {
    const double tr = jacobian.trace();
    if (std::abs(std::abs(tr) - 2.0) < 1e-9) return Hyperbolicity::parabolic;
    if (std::abs(tr) < 2.0) return Hyperbolicity::elliptic;
    return tr > 0.0 ? Hyperbolicity::hyperbolic_positive : Hyperbolicity::hyperbolic_negative;
}

Hyperbolicity classify(const PeriodicPoint& pp) { return classify(pp.jacobian); }

PeriodicPoint make_periodic_point(const LiftedTorusMap& map, const Vec2& z, std::int64_t q, const IVec2& pr) {
    PeriodicPoint pp;
    pp.point = z;
    pp.period = q;
    pp.translation = pr;
    pp.jacobian = orbit_jacobian(map, z, q);
    pp.eigen = eigenvalues(pp.jacobian);
    pp.classification = classify(pp.jacobian);
    pp.residual = norm(periodic_defect(map, z, q, pr));
    return pp;
}

NewtonResult newton_periodic(const LiftedTorusMap& map, std::int64_t q, const IVec2& pr, const Vec2& seed,
                             const NewtonOptions& options) {
    if (q < 1) throw std::invalid_argument("period must be >= 1");
    if (!(options.step_tol > 0.0) || !(options.residual_tol > 0.0))
        throw std::invalid_argument("Newton tolerances must be positive");

    NewtonResult out;
    Vec2 z = seed;
    for (int it = 1; it <= options.max_iter; ++it) {
        out.iterations = it;
        // orbit, defect and chain-rule jacobian in one pass
        Mat2 jac = Mat2::identity();
        Vec2 w = z;
        for (std::int64_t i = 0; i < q; ++i) {
            jac = map.jacobian(w) * jac;
            w = map.forward(w);
        }
        const Vec2 defect = w - z - to_vec(pr);
        const Mat2 dF = jac - Mat2::identity();
        if (!is_finite(defect)) {
            out.status = NewtonStatus::no_convergence;
            return out;
        }
        if (std::abs(dF.det()) < options.singular_tol) {
            out.status = NewtonStatus::singular;
            return out;
        }
        const Vec2 step = dF.inverse() * defect;
        z -= step;
        if (!is_finite(z) || norm(z - seed) > 1e6) {
            out.status = NewtonStatus::no_convergence;
            return out;
        }
        if (norm(step) < options.step_tol) break;
    }
    PeriodicPoint pp = make_periodic_point(map, z, q, pr);
    if (pp.residual < options.residual_tol) {
        out.status = NewtonStatus::converged;
        out.point = pp;
    } else {
        out.status = NewtonStatus::no_convergence;
    }
    return out;
}

PeriodicPoint doubled(const LiftedTorusMap& map, const PeriodicPoint& pp) {
    const IVec2 pr2 = pp.translation + map.homotopy().power(pp.period).apply(pp.translation);
    return make_periodic_point(map, pp.point, 2 * pp.period, pr2);
}

double torus_distance(const Vec2& a, const Vec2& b) {
    double dx = a.x - b.x;
    double dy = a.y - b.y;
    dx -= std::round(dx);
    dy -= std::round(dy);
    return std::hypot(dx, dy);
}

namespace {

double wrap_unit(double v) {
    double r = v - std::floor(v);
    if (r >= 1.0 - 1e-12) r -= 1.0;
    return r;
}

/// Moves Q by the translations v with (A^q - I) v = 0.
Vec2 normalise(const LiftedTorusMap& map, const Vec2& z) {
    if (map.homotopy().is_identity()) return Vec2{wrap_unit(z.x), wrap_unit(z.y)};
    return Vec2{wrap_unit(z.x), z.y};
}

}  // namespace

SweepResult sweep_periodic(const LiftedTorusMap& map, std::int64_t q, const IVec2& pr,
                           std::span<const Vec2> seeds, const NewtonOptions& options,
                           std::optional<SplitRng> jitter, double jitter_scale) {
    std::vector<Vec2> starts(seeds.begin(), seeds.end());
    if (jitter) {
        for (auto& s : starts) s += Vec2{jitter->uniform(-1.0, 1.0), jitter->uniform(-1.0, 1.0)} * jitter_scale;
    }
    std::vector<NewtonResult> results(starts.size());
    parallel_for(starts.size(), [&](std::size_t i) { results[i] = newton_periodic(map, q, pr, starts[i], options); });

    constexpr double kDedupRadius = 1e-8;
    SweepResult out;
    out.seeds = starts.size();
    std::vector<std::vector<Vec2>> known_orbits;
    for (const auto& r : results) {
        switch (r.status) {
            case NewtonStatus::singular: ++out.singular; continue;
            case NewtonStatus::no_convergence: ++out.diverged; continue;
            case NewtonStatus::converged: ++out.converged; break;
        }
        const Vec2 p = r.point->point;
        bool seen = false;
        for (const auto& orbit : known_orbits) {
            for (const auto& o : orbit)
                if (torus_distance(o, p) < kDedupRadius) { seen = true; break; }
            if (seen) break;
        }
        if (seen) continue;

        std::vector<Vec2> orbit;
        Vec2 w = p;
        for (std::int64_t j = 0; j < q; ++j) {
            orbit.push_back(w);
            w = map.forward(w);
        }
        known_orbits.push_back(std::move(orbit));
        const Vec2 shown = normalise(map, p);
        out.orbits.push_back(make_periodic_point(map, shown, q, pr));
    }
    return out;
}

SweepResult sweep_periodic(const LiftedTorusMap& map, std::int64_t q, const IVec2& pr, const SeedGrid& grid,
                           const NewtonOptions& options) {
    const auto seeds = grid.points();
    return sweep_periodic(map, q, pr, seeds, options);
}

}  // namespace torusdyn
