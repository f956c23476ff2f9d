#include <doctest.h>

#include <cmath>
#include <numbers>

#include "torusdyn/errors.hpp"
#include "torusdyn/map.hpp"
#include "torusdyn/rng.hpp"

using namespace torusdyn;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// independent closed forms
Vec2 standard_oracle(double k, double eps, Vec2 z) {
    const double s = k * std::sin(kTwoPi * z.x);
    return {z.x + z.y + s, z.y + s + eps};
}

Mat2 standard_jacobian_oracle(double k, double x) {
    const double c = kTwoPi * k * std::cos(kTwoPi * x);
    return {1.0 + c, 1.0, c, 1.0};
}

}  // namespace

TEST_CASE("standard map closed form") {
    const auto s0 = make_standard_map(0.0, 0.0);
    const Vec2 z = eval_lift(s0, {0.3, 0.7});
    CHECK(z.x == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(z.y == doctest::Approx(0.7).epsilon(1e-15));

    const auto se = make_standard_map(0.5, 0.01);
    CHECK(eval_lift(se, {0.0, 0.3}).y - 0.3 == doctest::Approx(0.01).epsilon(1e-12));

    const auto s2 = make_standard_map(2.0);
    CHECK(eval_lift(s2, {0.0, 0.0}) == Vec2{0.0, 0.0});
    const Vec2 q = eval_lift(s2, {0.25, 0.0});
    CHECK(q.x == doctest::Approx(2.25).epsilon(1e-15));
    CHECK(q.y == doctest::Approx(2.0).epsilon(1e-15));

    SplitRng rng(11);
    for (int i = 0; i < 200; ++i) {
        const Vec2 p{rng.uniform(-3, 3), rng.uniform(-3, 3)};
        for (double k : {0.0, 0.5, 2.0}) {
            const auto m = make_standard_map(k, 0.01);
            const Vec2 a = eval_lift(m, p), b = standard_oracle(k, 0.01, p);
            CHECK(std::abs(a.x - b.x) < 1e-13);
            CHECK(std::abs(a.y - b.y) < 1e-13);
            const Mat2 j = m.jacobian(p), jo = standard_jacobian_oracle(k, p.x);
            CHECK(std::abs(j.a - jo.a) + std::abs(j.b - jo.b) + std::abs(j.c - jo.c) + std::abs(j.d - jo.d) < 1e-12);
        }
    }
}

TEST_CASE("vertical deck translate maps to A(0,1)") {
    SplitRng rng(3);
    for (double k : {0.0, 0.7, 2.0, 5.0}) {
        const auto m = make_standard_map(k, 0.02);
        for (int i = 0; i < 50; ++i) {
            const Vec2 z{rng.uniform(), rng.uniform()};
            const Vec2 d = eval_lift(m, z + Vec2{0, 1}) - eval_lift(m, z);
            CHECK(std::abs(d.x - 1.0) < 1e-12);
            CHECK(std::abs(d.y - 1.0) < 1e-12);
        }
    }
    CHECK(make_standard_map(1.0).homotopy().dehn_exponent() == 1);
    CHECK(make_translation_map(0.3, 0.4).homotopy().is_identity());
    CHECK_THROWS_AS(HomotopyMatrix::dehn_twist(0), std::invalid_argument);
}

TEST_CASE("identity and translation maps") {
    const auto id = make_identity_map();
    CHECK(eval_lift(id, {2.5, -1.0}) == Vec2{2.5, -1.0});
    const auto t = make_translation_map(0.3, 0.4);
    CHECK(deck_residual(t, {0.1, 0.2}, {5, -7}) < 1e-12);
}

TEST_CASE("deck residual and area preservation on random points") {
    SplitRng rng(2024);
    for (double k : {0.0, 0.5, 2.0})
        for (double eps : {0.0, 0.01}) {
            const auto m = make_standard_map(k, eps);
            double worst = 0.0, worst_det = 0.0;
            for (int i = 0; i < 2000; ++i) {
                const Vec2 z{rng.uniform(), rng.uniform()};
                for (std::int64_t a = -2; a <= 2; ++a)
                    for (std::int64_t b = -2; b <= 2; ++b) worst = std::max(worst, deck_residual(m, z, {a, b}));
                worst_det = std::max(worst_det, std::abs(std::abs(m.jacobian(z).det()) - 1.0));
            }
            CHECK(worst < 1e-12);
            CHECK(worst_det < 1e-12);
        }
    // shipped identity-class maps too
    for (const auto& m : {make_drift_saddle(1.5, 0.5), make_translation_map(0.25, -0.5), make_identity_map()}) {
        const auto v = validate_lift(m, 1000, 9);
        CHECK(v.max_deck_residual < 1e-12);
        CHECK(v.max_det_error < 1e-12);
        CHECK(v.max_inverse_error < 1e-10);
    }
}

TEST_CASE("linear saddle is not a torus lift") {
    const auto m = make_linear_saddle(2.0, 0.5);
    CHECK(deck_residual(m, {0.1, 0.1}, {1, 0}) > 0.5);
}

TEST_CASE("iterate") {
    const auto s0 = make_standard_map(0.0);
    CHECK(iterate(s0, {0.4, 0.2}, 0).size() == 1);
    const auto orbit = iterate(s0, {0.0, 0.5}, 2);
    REQUIRE(orbit.size() == 3);
    CHECK(orbit[1] == Vec2{0.5, 0.5});
    CHECK(orbit[2] == Vec2{1.0, 0.5});

    const auto s2 = make_standard_map(2.0, 0.01);
    const auto gentle = make_standard_map(0.1, 0.01);
    SplitRng rng(5);
    for (int i = 0; i < 50; ++i) {
        const Vec2 z{rng.uniform(), rng.uniform()};
        const Vec2 back = iterate_endpoint(s2, iterate_endpoint(s2, z, -1), 1);
        CHECK(distance(back, z) < 1e-10);
        const Vec2 far = iterate_endpoint(gentle, iterate_endpoint(gentle, z, 40), -40);
        CHECK(distance(far, z) < 1e-9 * 40.0);
        // rounding grows by roughly the Lyapunov factor per step, so n stays small at k = 2
        for (std::int64_t n = 1; n <= 5; ++n) {
            const Vec2 round = iterate_endpoint(s2, iterate_endpoint(s2, z, n), -n);
            CHECK(distance(round, z) < 1e-9 * double(n));
        }
    }
}

TEST_CASE("escape aborts with the partial orbit") {
    const auto t = make_translation_map(1e8, 0.0);
    try {
        iterate(t, {0.0, 0.0}, 100);
        FAIL("expected OrbitEscape");
    } catch (const OrbitEscape& e) {
        CHECK(e.partial_orbit().size() >= 10);
        CHECK(e.partial_orbit().size() <= 12);
    }
    IterationLimits small;
    small.budget = 10;
    CHECK_THROWS_AS(iterate(make_identity_map(), {0, 0}, 11, small), std::invalid_argument);
    CHECK_THROWS_AS(eval_lift(make_standard_map(1.0), {std::nan(""), 0.0}), NumericalAbort);
}

TEST_CASE("cell form agrees with the plane orbit") {
    const auto m = make_standard_map(2.0, 0.01);
    SplitRng rng(8);
    for (int i = 0; i < 20; ++i) {
        const Vec2 z{rng.uniform(), rng.uniform()};
        CellPoint c = CellPoint::from(z);
        Vec2 p = z;
        for (int n = 0; n < 6; ++n) {
            c = advance(m, c);
            p = eval_lift(m, p);
        }
        CHECK(distance(c.point(), p) < 1e-9 * std::max(1.0, norm(p)));
        const Vec2 d = displacement(m, z, 6);
        CHECK(distance(d, p - z) < 1e-9 * std::max(1.0, norm(p)));
    }
    // integer shifts of a dyadic seed give the same fractional orbit
    const Vec2 z{0.375, 0.625};
    const Vec2 d0 = displacement(m, z, 500), d1 = displacement(m, z + Vec2{3.0, -2.0}, 500);
    CHECK(std::abs(d0.y - d1.y) == 0.0);
}

TEST_CASE("reflection and inverse") {
    const auto m = make_standard_map(1.3, 0.02);
    const auto r = reflect_vertical(m);
    CHECK(r.homotopy().dehn_exponent() == -1);
    SplitRng rng(4);
    for (int i = 0; i < 50; ++i) {
        const Vec2 z{rng.uniform(-2, 2), rng.uniform(-2, 2)};
        const Vec2 a = eval_lift(r, {z.x, -z.y});
        const Vec2 b = eval_lift(m, z);
        CHECK(a.x == b.x);
        CHECK(a.y == -b.y);
        const auto inv = inverse_of(m);
        CHECK(distance(eval_lift(inv, eval_lift(m, z)), z) < 1e-10);
    }
}
