#include <doctest.h>

#include <cmath>
#include <numbers>

#include "torusdyn/map.hpp"
#include "torusdyn/periodic.hpp"
#include "torusdyn/rng.hpp"

using namespace torusdyn;

namespace {

constexpr double kPi = std::numbers::pi;

// hand-differentiated Jacobian of the standard map at (x, y)
Mat2 jac(double k, double x) {
    const double c = 2 * kPi * k * std::cos(2 * kPi * x);
    return {1 + c, 1, c, 1};
}

}  // namespace

TEST_CASE("newton finds the closed-form fixed points") {
    const auto m = make_standard_map(2.0);
    const auto a = newton_periodic(m, 1, {0, 0}, {0.1, 0.1});
    REQUIRE(a.status == NewtonStatus::converged);
    CHECK(torus_distance(a.point->point, {0, 0}) < 1e-10);
    const auto b = newton_periodic(m, 1, {0, 0}, {0.45, 0.05});
    REQUIRE(b.status == NewtonStatus::converged);
    CHECK(torus_distance(b.point->point, {0.5, 0}) < 1e-10);
    CHECK(newton_periodic(make_identity_map(), 1, {0, 0}, {0.3, 0.3}).status == NewtonStatus::singular);
}

TEST_CASE("classification by trace") {
    const auto m = make_standard_map(2.0);
    const auto p0 = make_periodic_point(m, {0, 0}, 1, {0, 0});
    CHECK(p0.jacobian.trace() == doctest::Approx(2 + 4 * kPi).epsilon(1e-12));
    CHECK(p0.classification == Hyperbolicity::hyperbolic_positive);
    const auto p1 = make_periodic_point(m, {0.5, 0}, 1, {0, 0});
    CHECK(p1.jacobian.trace() == doctest::Approx(2 - 4 * kPi).epsilon(1e-12));
    CHECK(p1.classification == Hyperbolicity::hyperbolic_negative);
    const auto e = make_periodic_point(make_standard_map(0.05), {0.5, 0}, 1, {0, 0});
    CHECK(e.jacobian.trace() == doctest::Approx(2 - 0.1 * kPi).epsilon(1e-12));
    CHECK(e.classification == Hyperbolicity::elliptic);
    CHECK(classify(Mat2{1, 5, 0, 1}) == Hyperbolicity::parabolic);
    CHECK(classify(Mat2{-1, 0, 3, -1}) == Hyperbolicity::parabolic);

    const Mat2 o = jac(2.0, 0.0);
    CHECK(std::abs(p0.jacobian.a - o.a) + std::abs(p0.jacobian.c - o.c) < 1e-12);
    CHECK(p0.eigen.real);
    CHECK(p0.eigen.first > 1.0);
    CHECK(p0.eigen.first * p0.eigen.second == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("classification ignores conjugation") {
    SplitRng rng(17);
    for (int i = 0; i < 200; ++i) {
        const Mat2 j{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3), 0.0};
        Mat2 m = j;
        if (std::abs(m.a) < 0.1) continue;
        m.d = (1.0 + m.b * m.c) / m.a;  // det 1
        Mat2 p{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        if (std::abs(p.det()) < 0.2) continue;
        const Mat2 c = p * m * p.inverse();
        if (std::abs(std::abs(m.trace()) - 2.0) < 1e-6) continue;
        CHECK(classify(c) == classify(m));
    }
}

TEST_CASE("sweep on the standard map") {
    const auto m = make_standard_map(2.0);
    for (int n : {8, 16, 24}) {
        SeedGrid g;
        g.nx = g.ny = n;
        const auto s = sweep_periodic(m, 1, {0, 0}, g);
        REQUIRE(s.orbits.size() == 2);
        bool has0 = false, hashalf = false;
        for (const auto& pp : s.orbits) {
            CHECK(pp.residual < 1e-10);
            CHECK(std::abs(pp.jacobian.det() - 1.0) < 1e-8);
            has0 = has0 || torus_distance(pp.point, {0, 0}) < 1e-10;
            hashalf = hashalf || torus_distance(pp.point, {0.5, 0}) < 1e-10;
        }
        CHECK(has0);
        CHECK(hashalf);
    }

    SeedGrid g;
    g.nx = g.ny = 16;
    const auto shear = sweep_periodic(make_standard_map(0.0), 1, {0, 0}, g);
    CHECK(shear.non_isolated());

    // translation (0,1) forces 2 sin(2 pi x) = 1 and y = -1: exactly x = 1/12 and 5/12
    const auto up = sweep_periodic(m, 1, {0, 1}, g);
    REQUIRE(up.orbits.size() == 2);
    bool near12 = false, near512 = false;
    for (const auto& pp : up.orbits) {
        CHECK(pp.residual < 1e-10);
        near12 = near12 || torus_distance(pp.point, {1.0 / 12.0, 0.0}) < 1e-10;
        near512 = near512 || torus_distance(pp.point, {5.0 / 12.0, 0.0}) < 1e-10;
    }
    CHECK(near12);
    CHECK(near512);

    // (0,3) would need 2 sin(2 pi x) = 3, so there is nothing to find
    double best = 1e9;
    for (int j = 0; j < 400; ++j)
        for (int i = 0; i < 400; ++i) {
            const Vec2 z{i / 400.0, j / 400.0 - 0.5};
            best = std::min(best, norm(periodic_defect(m, z, 1, {0, 3})));
        }
    CHECK(best > 1e-3);
    CHECK(sweep_periodic(m, 1, {0, 3}, g).orbits.empty());
}

TEST_CASE("sweep deduplicates along the orbit and jitter is seeded") {
    const auto m = make_standard_map(2.0);
    SeedGrid g;
    g.nx = g.ny = 16;
    const auto two = sweep_periodic(m, 2, {0, 0}, g);
    for (std::size_t i = 0; i < two.orbits.size(); ++i)
        for (std::size_t j = i + 1; j < two.orbits.size(); ++j) {
            const Vec2 img = iterate_endpoint(m, two.orbits[i].point, 1);
            CHECK(torus_distance(img, two.orbits[j].point) > 1e-8);
            CHECK(torus_distance(two.orbits[i].point, two.orbits[j].point) > 1e-8);
        }
    const auto pts = g.points();
    const auto j1 = sweep_periodic(m, 1, {0, 0}, pts, {}, SplitRng(5), 0.01);
    const auto j2 = sweep_periodic(m, 1, {0, 0}, pts, {}, SplitRng(5), 0.01);
    REQUIRE(j1.orbits.size() == j2.orbits.size());
    for (std::size_t i = 0; i < j1.orbits.size(); ++i) CHECK(j1.orbits[i].point == j2.orbits[i].point);
}

TEST_CASE("translation covariance") {
    const auto m = make_standard_map(2.0);
    SeedGrid g;
    g.nx = g.ny = 16;
    for (std::int64_t q : {1, 2, 3}) {
        const auto s = sweep_periodic(m, q, {0, 0}, g);
        const auto aq = m.homotopy().power(q);
        for (const auto& pp : s.orbits)
            for (std::int64_t a = -2; a <= 2; ++a)
                for (std::int64_t b = -2; b <= 2; ++b) {
                    const IVec2 v{a, b};
                    const IVec2 extra = aq.apply(v) - v;
                    const Vec2 d = periodic_defect(m, pp.point + to_vec(v), q, pp.translation + extra);
                    CHECK(norm(d) < 1e-9);
                }
    }
}

TEST_CASE("doubling a negative saddle") {
    const auto m = make_standard_map(2.0);
    const auto p1 = make_periodic_point(m, {0.5, 0}, 1, {0, 0});
    const auto d = doubled(m, p1);
    CHECK(d.period == 2);
    CHECK(d.classification == Hyperbolicity::hyperbolic_positive);
    CHECK(d.residual < 1e-10);
}
