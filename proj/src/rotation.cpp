#include "torusdyn/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "torusdyn/parallel.hpp"

namespace torusdyn {

namespace {

void check_horizons(const Horizons& h) {
    if (h.short_n < 1 || h.long_n <= h.short_n)
        throw std::invalid_argument("horizons must satisfy 1 <= short < long");
}

Vec2 cell_delta(const CellPoint& p, const CellPoint& start) {
    const IVec2 dc = p.cell - start.cell;
    return Vec2{(p.frac.x - start.frac.x) + double(dc.a), (p.frac.y - start.frac.y) + double(dc.b)};
}

/// Means at both horizons from one orbit.
std::pair<Vec2, Vec2> two_horizon_means(const LiftedTorusMap& map, const Vec2& z, const Horizons& h) {
    const CellPoint start = CellPoint::from(z);
    CellPoint p = start;
    Vec2 short_mean;
    for (std::int64_t i = 1; i <= h.long_n; ++i) {
        p = advance(map, p);
        if (i == h.short_n) short_mean = cell_delta(p, start) / double(h.short_n);
    }
    return {short_mean, cell_delta(p, start) / double(h.long_n)};
}

/// Neumaier-compensated running sum.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double v) {
        const double t = sum + v;
        carry += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + carry; }
};

}  // namespace

Vec2 birkhoff_mean(const LiftedTorusMap& map, const Vec2& z, std::int64_t n) {
    if (n < 1) throw std::invalid_argument("birkhoff_mean needs n >= 1");
    return displacement(map, z, n) / double(n);
}

RotationPolygon estimate_rotation_set(const LiftedTorusMap& map, std::span<const Vec2> seeds,
                                      const Horizons& horizons) {
    if (!map.homotopy().is_identity())
        throw std::invalid_argument("rotation set estimation needs a map homotopic to the identity");
    check_horizons(horizons);
    if (seeds.empty()) throw std::invalid_argument("empty seed grid");

    std::vector<std::pair<Vec2, Vec2>> means(seeds.size());
    parallel_for(seeds.size(), [&](std::size_t i) { means[i] = two_horizon_means(map, seeds[i], horizons); });

    RotationPolygon out;
    out.horizons = horizons;
    std::vector<Vec2> shorts, longs;
    shorts.reserve(seeds.size());
    longs.reserve(seeds.size());
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        shorts.push_back(means[i].first);
        longs.push_back(means[i].second);
        out.sample_means.push_back(SampleMean{seeds[i], means[i].second, horizons.long_n});
    }
    out.hull = convex_hull(longs);
    out.short_hull = convex_hull(shorts);
    out.hausdorff_gap = hausdorff_convex(out.hull, out.short_hull);
    return out;
}

RotationPolygon estimate_rotation_set(const LiftedTorusMap& map, const SeedGrid& grid,
                                      const Horizons& horizons) {
    const auto seeds = grid.points();
    return estimate_rotation_set(map, seeds, horizons);
}

RotationInterval estimate_vertical_rotation_set(const LiftedTorusMap& map, std::span<const Vec2> seeds,
                                                const Horizons& horizons) {
    if (!map.homotopy().is_dehn_twist())
        throw std::invalid_argument("vertical rotation set needs a map homotopic to a Dehn twist");
    check_horizons(horizons);
    if (seeds.empty()) throw std::invalid_argument("empty seed grid");

    std::vector<std::pair<Vec2, Vec2>> means(seeds.size());
    parallel_for(seeds.size(), [&](std::size_t i) { means[i] = two_horizon_means(map, seeds[i], horizons); });

    RotationInterval out;
    out.horizons = horizons;
    out.lo = out.short_lo = INFINITY;
    out.hi = out.short_hi = -INFINITY;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        const double s = means[i].first.y;
        const double l = means[i].second.y;
        out.short_lo = std::min(out.short_lo, s);
        out.short_hi = std::max(out.short_hi, s);
        out.lo = std::min(out.lo, l);
        out.hi = std::max(out.hi, l);
        out.sample_means.push_back(SampleMean{seeds[i], Vec2{0.0, l}, horizons.long_n});
    }
    out.hausdorff_gap = std::max(std::abs(out.lo - out.short_lo), std::abs(out.hi - out.short_hi));
    return out;
}

RotationInterval estimate_vertical_rotation_set(const LiftedTorusMap& map, const SeedGrid& grid,
                                                const Horizons& horizons) {
    const auto seeds = grid.points();
    return estimate_vertical_rotation_set(map, seeds, horizons);
}

std::optional<Vec2> rotation_vector_of_point(const LiftedTorusMap& map, const Vec2& z,
                                             const Horizons& horizons, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    check_horizons(horizons);
    const auto [s, l] = two_horizon_means(map, z, horizons);
    if (distance(s, l) < tol) return l;
    return std::nullopt;
}

std::optional<double> vertical_rotation_number_of_point(const LiftedTorusMap& map, const Vec2& z,
                                                        const Horizons& horizons, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    check_horizons(horizons);
    const auto [s, l] = two_horizon_means(map, z, horizons);
    if (std::abs(s.y - l.y) < tol) return l.y;
    return std::nullopt;
}

Vec2 measure_rotation_vector(const LiftedTorusMap& map, std::span<const Vec2> samples) {
    if (samples.empty()) throw std::invalid_argument("measure_rotation_vector needs samples");
    CompensatedSum sx, sy;
    for (const auto& z : samples) {
        const Vec2 d = map.forward(z) - z;
        sx.add(d.x);
        sy.add(d.y);
    }
    const double n = double(samples.size());
    return Vec2{sx.value() / n, sy.value() / n};
}

}  // namespace torusdyn
