// Acceptance run: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "torusdyn/confinement.hpp"
#include "torusdyn/crossing.hpp"
#include "torusdyn/harness/commands.hpp"
#include "torusdyn/manifold.hpp"
#include "torusdyn/map.hpp"
#include "torusdyn/periodic.hpp"
#include "torusdyn/rng.hpp"
#include "torusdyn/rotation.hpp"
#include "torusdyn/sft.hpp"

#include "crossing_oracle.hpp"

using namespace torusdyn;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
    void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// --- 1 ----------------------------------------------------------------------
Outcome lift_contract() {
    Outcome out;
    const auto t0 = Clock::now();
    double worst = 0.0, worst_det = 0.0;
    SplitRng rng(1);
    for (double k : {0.0, 0.5, 2.0})
        for (double eps : {0.0, 0.01}) {
            const auto m = make_standard_map(k, eps);
            for (int i = 0; i < 10000; ++i) {
                const Vec2 z{rng.uniform(), rng.uniform()};
                for (std::int64_t a = -2; a <= 2; ++a)
                    for (std::int64_t b = -2; b <= 2; ++b) worst = std::max(worst, deck_residual(m, z, {a, b}));
                worst_det = std::max(worst_det, std::abs(std::abs(m.jacobian(z).det()) - 1.0));
            }
        }
    const double t = seconds_since(t0);
    out.require(worst < 1e-12, "deck residual " + fmt(worst));
    out.require(worst_det < 1e-12, "det error " + fmt(worst_det));
    out.require(t < 1.0, "runtime " + fmt(t) + " s");
    out.note("max deck " + fmt(worst) + ", max |det|-1 " + fmt(worst_det) + ", " + fmt(t) + " s");
    return out;
}

// --- 2 ----------------------------------------------------------------------
Outcome rotation_calculus() {
    Outcome out;
    const auto t0 = Clock::now();
    SeedGrid g;
    const auto tr = estimate_rotation_set(make_translation_map(0.25, -0.5), g, {1000, 10000});
    out.require(tr.hull.size() == 1, "translation hull has " + std::to_string(tr.hull.size()) + " vertices");
    if (!tr.hull.empty()) out.require(tr.hull[0] == Vec2{0.25, -0.5}, "translation hull not exact");

    const auto k0 = estimate_vertical_rotation_set(make_standard_map(0.0), g, {1000, 10000});
    out.require(std::abs(k0.lo) < 1e-9 && std::abs(k0.hi) < 1e-9, "k=0 interval [" + fmt(k0.lo) + ", " + fmt(k0.hi) + "]");

    const double eps = 0.01;
    std::vector<Vec2> grid;
    grid.reserve(1000000);
    for (int j = 0; j < 1000; ++j)
        for (int i = 0; i < 1000; ++i) grid.push_back({i / 1000.0, j / 1000.0});
    const Vec2 mv = measure_rotation_vector(make_standard_map(0.3, eps), grid);
    out.require(std::abs(mv.y - eps) < 1e-6, "measure rotation " + fmt(mv.y));
    const double t = seconds_since(t0);
    out.require(t < 10.0, "runtime " + fmt(t) + " s");
    out.note("vertical measure mean - eps = " + fmt(mv.y - eps) + ", " + fmt(t) + " s");
    return out;
}

// --- 3 ----------------------------------------------------------------------
Outcome periodic_orbits() {
    Outcome out;
    const auto t0 = Clock::now();
    const auto m = make_standard_map(2.0);
    SeedGrid g;
    g.nx = g.ny = 16;
    const auto s = sweep_periodic(m, 1, {0, 0}, g);
    out.require(s.orbits.size() == 2, std::to_string(s.orbits.size()) + " orbits");
    const double pi = std::numbers::pi;
    int matched = 0;
    for (const auto& pp : s.orbits) {
        out.require(pp.residual < 1e-10, "residual " + fmt(pp.residual));
        // hand-derived Jacobian [[1 + 4 pi cos 2 pi x, 1], [4 pi cos 2 pi x, 1]]
        const double c = 4 * pi * std::cos(2 * pi * pp.point.x);
        const bool near_jac = std::abs(pp.jacobian.a - (1 + c)) < 1e-9 && std::abs(pp.jacobian.c - c) < 1e-9;
        out.require(near_jac, "Jacobian differs from the closed form");
        if (torus_distance(pp.point, {0, 0}) < 1e-10) {
            ++matched;
            out.require(std::abs(pp.jacobian.trace() - (2 + 4 * pi)) < 1e-9, "trace at (0,0)");
            out.require(pp.classification == Hyperbolicity::hyperbolic_positive, "(0,0) not hyperbolic_positive");
        } else if (torus_distance(pp.point, {0.5, 0}) < 1e-10) {
            ++matched;
            out.require(std::abs(pp.jacobian.trace() - (2 - 4 * pi)) < 1e-9, "trace at (0.5,0)");
            out.require(pp.classification == Hyperbolicity::hyperbolic_negative, "(0.5,0) not hyperbolic_negative");
        }
    }
    out.require(matched == 2, "closed-form orbits matched: " + std::to_string(matched));
    const double t = seconds_since(t0);
    out.require(t < 1.0, "runtime " + fmt(t) + " s");
    out.note(std::to_string(s.orbits.size()) + " orbits, " + fmt(t) + " s");
    return out;
}

// --- 4 ----------------------------------------------------------------------
Outcome manifolds() {
    Outcome out;
    const auto lin = make_linear_saddle(2.0, 0.5);
    const auto lp = make_periodic_point(lin, {0, 0}, 1, {0, 0});
    GrowthOptions lg;
    lg.arclength_budget = 5.0;
    lg.h_max = 0.01;
    double axis = 0.0;
    for (Branch br : {Branch::plus, Branch::minus}) {
        for (const auto& v : grow_manifold(lin, lp, ManifoldKind::unstable, br, lg).vertices) axis = std::max(axis, std::abs(v.y));
        for (const auto& v : grow_manifold(lin, lp, ManifoldKind::stable, br, lg).vertices) axis = std::max(axis, std::abs(v.x));
    }
    out.require(axis < 1e-12, "linear saddle off-axis " + fmt(axis));

    const auto m = make_standard_map(2.0);
    const auto pp = make_periodic_point(m, {0, 0}, 1, {0, 0});
    GrowthOptions g;
    g.arclength_budget = 50.0;
    const auto u = grow_manifold(m, pp, ManifoldKind::unstable, Branch::plus, g);
    std::vector<std::size_t> picks;
    for (std::size_t i = 0; i < u.vertices.size(); i += 53)
        if (u.params[i] >= 2.0) picks.push_back(i);
    const double slope = pullback_slope(m, u, picks, 0.05);
    const double ideal = -std::log(eigen_frame(pp).lambda_unstable);
    const double rel = std::abs(slope - ideal) / std::abs(ideal);
    out.require(rel < 0.1, "pullback slope off by " + fmt(100 * rel) + "%");

    const auto inv = inverse_of(m);
    const auto ppi = make_periodic_point(inv, {0, 0}, 1, {0, 0});
    double worst = 0.0;
    for (Branch br : {Branch::plus, Branch::minus}) {
        const auto s = grow_manifold(m, pp, ManifoldKind::stable, br, g);
        const auto ui = grow_manifold(inv, ppi, ManifoldKind::unstable, br, g);
        if (s.vertices.size() != ui.vertices.size()) {
            out.require(false, "stable and inverse-unstable vertex counts differ");
            continue;
        }
        for (std::size_t i = 0; i < s.vertices.size(); ++i) worst = std::max(worst, distance(s.vertices[i], ui.vertices[i]));
    }
    out.require(worst < 1e-8, "inverse-map disagreement " + fmt(worst));
    out.note("axis err " + fmt(axis) + ", slope " + fmt(slope) + " vs " + fmt(ideal) + ", inverse-map err " + fmt(worst));
    return out;
}

// --- 5 ----------------------------------------------------------------------
Outcome transversality_oracle() {
    Outcome out;
    const auto run = oracle::compare_with_oracle(20240601);
    out.require(run.random_cases + run.tangencies == 100, "only " + std::to_string(run.random_cases + run.tangencies) + " pairs");
    out.require(run.tangencies >= 10, std::to_string(run.tangencies) + " tangencies");
    out.require(run.mismatches == 0, std::to_string(run.mismatches) + " count mismatches");
    out.require(run.tangency_witnesses == 0, "witnesses on tangencies");
    out.note("100 pairs (" + std::to_string(run.tangencies) + " tangencies), oracle witnesses " +
             std::to_string(run.oracle_total) + ", mismatches " + std::to_string(run.mismatches));
    return out;
}

// --- 6 ----------------------------------------------------------------------
Outcome translate_crossings() {
    Outcome out;
    const auto t0 = Clock::now();
    const auto m = make_standard_map(2.0);
    const auto pp = make_periodic_point(m, {0, 0}, 1, {0, 0});
    GrowthOptions g;
    g.arclength_budget = 200.0;
    const auto scan = translate_scan(m, pp, {-1, -1}, {1, 1}, g);
    // regression baseline: every cell of the 3x3 block had a witness
    std::string cells;
    for (const auto& cell : scan.cells) {
        out.require(cell.found, "no witness at (" + std::to_string(cell.translate.a) + "," +
                                    std::to_string(cell.translate.b) + ") although the baseline had one");
        cells += cell.found ? "+" : ".";
    }
    for (const IVec2 v : {IVec2{0, 0}, IVec2{1, 0}, IVec2{-1, 0}, IVec2{0, 1}, IVec2{0, -1}}) {
        const ScanCell* c = scan.find(v);
        out.require(c && c->found, "required cell missing");
    }
    const double t = seconds_since(t0);
    out.require(t < 60.0, "runtime " + fmt(t) + " s");
    out.note("cells " + cells + ", " + fmt(t) + " s");
    return out;
}

// --- 7 ----------------------------------------------------------------------
Outcome omega_limits() {
    Outcome out;
    const auto t0 = Clock::now();
    const ConfinementGrid grid;  // [-4,4]^2, step 1/128
    auto probe = [&](const LiftedTorusMap& m, ConfinementMode mode) {
        const auto cloud = compute_confinement(m, HalfPlane{mode, 0.0}, grid, 1000);
        return omega_probe(cloud, m, 10000);
    };
    const auto k2 = make_standard_map(2.0);
    for (auto mode : {ConfinementMode::south, ConfinementMode::north}) {
        const auto p = probe(k2, mode);
        const std::string tag = "k=2 " + std::string(to_string(mode));
        out.require(p.verdict == OmegaVerdict::escaping, tag + " " + std::string(to_string(p.verdict)));
        out.require(100 * p.drifting >= 99 * p.survivors, tag + " drifting " + std::to_string(p.drifting));
        out.note(tag + " " + std::to_string(p.drifting) + "/" + std::to_string(p.survivors));
    }
    const auto se = make_standard_map(0.3, 0.01);
    for (auto mode : {ConfinementMode::south, ConfinementMode::north}) {
        const auto p = probe(se, mode);
        const std::string tag = "perturbed " + std::string(to_string(mode));
        out.require(p.verdict == OmegaVerdict::persistent, tag + " " + std::string(to_string(p.verdict)));
        out.note(tag + " " + std::string(to_string(p.verdict)));
    }
    const double t = seconds_since(t0);
    out.require(t < 120.0, "runtime " + fmt(t) + " s");
    out.note(fmt(t) + " s");
    return out;
}

// --- 8 ----------------------------------------------------------------------
Outcome bounded_deviation() {
    Outcome out;
    const WeightedSft g(1, {{0, 0, {1, 0}}, {0, 0, {0, 1}}});
    const auto hull = cycle_rotation_hull(g);
    out.require(hull.vertices.size() == 2 && hull.vertices[0] == RVec2{0, 1} && hull.vertices[1] == RVec2{1, 0},
                "hull is not the segment [(1,0),(0,1)]");
    const auto half = bounded_deviation_orbit(g, {Rational(1, 2), Rational(1, 2)}, 10000);
    out.require(half.verified_horizon == 10000, "horizon");
    out.require(half.max_deviation2 == Rational(1, 2), "max deviation at (1/2,1/2) is not sqrt(2)/2");
    out.require(half.max_deviation2 <= half.deviation_bound2, "bound exceeded at (1/2,1/2)");
    const auto third = bounded_deviation_orbit(g, {Rational(1, 3), Rational(2, 3)}, 10000);
    out.require(third.max_deviation2 <= third.deviation_bound2, "bound exceeded at (1/3,2/3)");
    // recheck both independently of the construction
    for (const auto* o : {&half, &third}) {
        RVec2 sum{0, 0};
        Rational best = 0;
        for (std::int64_t n = 1; n <= 10000; ++n) {
            sum = sum + g.edges()[o->word[std::size_t(n - 1) % o->word.size()]].weight;
            const RVec2 d = sum - Rational(n) * o->target;
            if (d.norm2() > best) best = d.norm2();
        }
        out.require(best == o->max_deviation2 && best <= o->deviation_bound2, "independent partial-sum scan disagrees");
    }
    out.note("max at (1/2,1/2) = " + fmt(std::sqrt(to_double(half.max_deviation2))) + ", at (1/3,2/3) = " +
             fmt(std::sqrt(to_double(third.max_deviation2))) + " <= " + fmt(third.deviation_bound));
    return out;
}

// --- 9 ----------------------------------------------------------------------
std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism() {
    Outcome out;
    const fs::path root = fs::current_path() / "acceptance_determinism";
    fs::remove_all(root);
    fs::create_directories(root);
    std::ofstream(root / "check_all.cfg") << "[map]\nmap = standard\nk = 2\n\n[run]\ncommand = check-all\nseed = 7\n";
    std::vector<fs::path> dirs;
    for (unsigned threads : {1u, 8u}) {
        harness::RunOptions opts;
        opts.threads = threads;
        opts.out_dir = (root / ("threads" + std::to_string(threads))).string();
        std::ostringstream log;
        const int code = harness::run_config_file((root / "check_all.cfg").string(), opts, log);
        out.require(code == harness::kExitPass, "check-all exit " + std::to_string(code) + " at " +
                                                    std::to_string(threads) + " threads");
        dirs.push_back(*opts.out_dir);
    }
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(dirs[0])) {
        ++files;
        const fs::path other = dirs[1] / e.path().filename();
        out.require(fs::exists(other) && slurp(e.path()) == slurp(other),
                    e.path().filename().string() + " differs between thread counts");
    }
    std::size_t files1 = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dirs[1])) ++files1;
    out.require(files == files1 && files >= 2, "file sets differ");
    out.note(std::to_string(files) + " files identical at 1 and 8 threads");
    return out;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"deck equivariance and area", lift_contract},
        {"rotation calculus", rotation_calculus},
        {"periodic orbits", periodic_orbits},
        {"manifold correctness", manifolds},
        {"transversality oracle equivalence", transversality_oracle},
        {"translate crossing scan", translate_crossings},
        {"omega-limit probe", omega_limits},
        {"bounded deviation on a subshift", bounded_deviation},
        {"determinism across thread counts", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failed += o.pass ? 0 : 1;
        std::printf("[%s] %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - std::size_t(failed), criteria.size());
    return failed == 0 ? 0 : 1;
}
