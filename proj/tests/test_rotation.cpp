#include <doctest.h>

#include <cmath>

#include "torusdyn/map.hpp"
#include "torusdyn/periodic.hpp"
#include "torusdyn/rng.hpp"
#include "torusdyn/rotation.hpp"

using namespace torusdyn;

TEST_CASE("birkhoff means") {
    const auto t = make_translation_map(0.3, -0.2);
    for (std::int64_t n : {1, 7, 100}) {
        const Vec2 m = birkhoff_mean(t, {0.1, 0.9}, n);
        CHECK(m.x == doctest::Approx(0.3).epsilon(1e-12));
        CHECK(m.y == doctest::Approx(-0.2).epsilon(1e-12));
    }
    for (double k : {0.0, 0.5, 2.0}) CHECK(birkhoff_mean(make_standard_map(k), {0, 0}, 1000) == Vec2{0, 0});
    const Vec2 shear = birkhoff_mean(make_standard_map(0.0), {0.0, 0.375}, 64);
    CHECK(shear.x == 0.375);
    CHECK(shear.y == 0.0);
    CHECK_THROWS_AS(birkhoff_mean(t, {0, 0}, 0), std::invalid_argument);
}

TEST_CASE("rotation set of simple maps") {
    SeedGrid g;
    g.nx = g.ny = 8;
    const auto poly = estimate_rotation_set(make_translation_map(0.25, -0.5), g, {100, 1000});
    REQUIRE(poly.hull.size() == 1);
    CHECK(std::abs(poly.hull[0].x - 0.25) < 1e-12);
    CHECK(std::abs(poly.hull[0].y + 0.5) < 1e-12);
    CHECK(poly.hausdorff_gap < 1e-12);

    const auto id = estimate_rotation_set(make_identity_map(), g, {10, 20});
    REQUIRE(id.hull.size() == 1);
    CHECK(id.hull[0] == Vec2{0, 0});

    CHECK_THROWS_AS(estimate_rotation_set(make_standard_map(1.0), g, {10, 20}), std::invalid_argument);
    CHECK_THROWS_AS(estimate_rotation_set(make_identity_map(), g, {20, 10}), std::invalid_argument);
    CHECK_THROWS_AS(estimate_rotation_set(make_identity_map(), std::span<const Vec2>{}, {10, 20}),
                    std::invalid_argument);
}

TEST_CASE("drift saddle reaches its programmed extreme means") {
    // for a > 1 the map has fixed points with translations (1,0) and (-1,0)
    const auto m = make_drift_saddle(1.5, 0.5);
    std::vector<Vec2> extremes;
    for (int s : {1, -1}) {
        const double y = 0.5 - std::asin(double(s) / 1.5) / (2.0 * std::numbers::pi);
        const auto res = newton_periodic(m, 1, {s, 0}, {0.0, y});
        REQUIRE(res.point);
        CHECK(res.point->translation == IVec2{s, 0});
        // the points are saddles, so a long floating-point orbit leaves them; one step is exact
        extremes.push_back(birkhoff_mean(m, res.point->point, 1));
    }
    CHECK(extremes[0].x == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(extremes[1].x == doctest::Approx(-1.0).epsilon(1e-9));

    SeedGrid g;
    g.nx = g.ny = 32;
    const auto poly = estimate_rotation_set(m, g, {200, 2000});
    for (const auto& e : extremes) CHECK(hull_contains(poly.hull, e, 0.05));
    CHECK(poly.margin({0, 0}) > 0.0);
}

TEST_CASE("hull monotone in the seed set") {
    const auto m = make_drift_saddle(1.5, 0.5);
    SeedGrid g;
    g.nx = g.ny = 12;
    const auto all = g.points();
    std::vector<Vec2> half;
    for (std::size_t i = 0; i < all.size(); i += 3) half.push_back(all[i]);
    const auto big = estimate_rotation_set(m, all, {100, 400});
    const auto small = estimate_rotation_set(m, half, {100, 400});
    for (const auto& v : small.hull) CHECK(hull_contains(big.hull, v, 1e-12));
}

TEST_CASE("deck invariance of the estimates") {
    // dyadic seeds so the cell-form orbits of G and G+v coincide
    SeedGrid g;
    g.nx = g.ny = 16;
    SeedGrid shifted = g;
    shifted.box = Box{g.box.xmin + 2, g.box.xmax + 2, g.box.ymin - 1, g.box.ymax - 1};
    const auto m = make_standard_map(2.0);
    const auto a = estimate_vertical_rotation_set(m, g, {100, 1000});
    const auto b = estimate_vertical_rotation_set(m, shifted, {100, 1000});
    CHECK(std::abs(a.lo - b.lo) < 1e-9);
    CHECK(std::abs(a.hi - b.hi) < 1e-9);

    const auto ds = make_drift_saddle(1.5, 0.5);
    const auto pa = estimate_rotation_set(ds, g, {100, 500});
    const auto pb = estimate_rotation_set(ds, shifted, {100, 500});
    CHECK(hausdorff_convex(pa.hull, pb.hull) < 1e-9);
}

TEST_CASE("hausdorff gap symmetry") {
    const std::vector<Vec2> a{{0, 0}, {1, 0}, {0, 1}};
    const std::vector<Vec2> b{{0, 0}, {2, 0}, {0, 1}};
    CHECK(hausdorff_convex(a, b) == doctest::Approx(hausdorff_convex(b, a)));
    CHECK(hausdorff_convex(a, b) > 0.0);
    CHECK(hausdorff_convex(a, a) == 0.0);
}

TEST_CASE("vertical rotation sets") {
    SeedGrid g;
    g.nx = g.ny = 16;
    const auto k0 = estimate_vertical_rotation_set(make_standard_map(0.0), g, {100, 1000});
    CHECK(std::abs(k0.lo) < 1e-12);
    CHECK(std::abs(k0.hi) < 1e-12);

    const auto k2 = estimate_vertical_rotation_set(make_standard_map(2.0), g, {1000, 10000});
    CHECK(k2.lo < 0.0);
    CHECK(k2.hi > 0.0);

    const auto se = estimate_vertical_rotation_set(make_standard_map(0.5, 0.01), g, {1000, 10000});
    CHECK(se.hi >= 0.01 - 1e-3);
    CHECK_THROWS_AS(estimate_vertical_rotation_set(make_identity_map(), g, {10, 20}), std::invalid_argument);
}

TEST_CASE("pointwise rotation vectors") {
    const Horizons h{100, 1000};
    const auto fixed = vertical_rotation_number_of_point(make_standard_map(2.0), {0, 0}, h, 1e-9);
    REQUIRE(fixed);
    CHECK(*fixed == 0.0);
    const auto tv = rotation_vector_of_point(make_translation_map(0.125, 0.25), {0.3, 0.3}, h, 1e-12);
    REQUIRE(tv);
    CHECK(tv->x == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(tv->y == doctest::Approx(0.25).epsilon(1e-12));

    // long-run oracle: a converged answer must agree with the mean at 10x the horizon
    const auto m = make_standard_map(2.0);
    const auto r = vertical_rotation_number_of_point(m, {0.25, 0.5}, h, 0.05);
    if (r) CHECK(std::abs(*r - birkhoff_mean(m, {0.25, 0.5}, 10000).y) < 0.1);
}

TEST_CASE("measure rotation vector") {
    std::vector<Vec2> grid;
    for (int j = 0; j < 200; ++j)
        for (int i = 0; i < 200; ++i) grid.push_back({i / 200.0, j / 200.0});
    const Vec2 se = measure_rotation_vector(make_standard_map(0.3, 0.01), grid);
    CHECK(std::abs(se.y - 0.01) < 1e-6);
    const Vec2 k0 = measure_rotation_vector(make_standard_map(0.0), grid);
    CHECK(k0.x == doctest::Approx(0.4975).epsilon(1e-12));  // mean of j/200
    CHECK(std::abs(k0.y) < 1e-15);
    const Vec2 t = measure_rotation_vector(make_translation_map(0.5, -0.25), grid);
    CHECK(t.x == 0.5);
    CHECK(t.y == -0.25);
}
