#include "torusdyn/harness/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "torusdyn/confinement.hpp"
#include "torusdyn/crossing.hpp"
#include "torusdyn/errors.hpp"
#include "torusdyn/manifold.hpp"
#include "torusdyn/parallel.hpp"
#include "torusdyn/periodic.hpp"
#include "torusdyn/rng.hpp"
#include "torusdyn/rotation.hpp"
#include "torusdyn/sft.hpp"

namespace torusdyn::harness {

using Json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

Json vec_json(const Vec2& v) { return Json::array({v.x, v.y}); }
Json ivec_json(const IVec2& v) { return Json::array({v.a, v.b}); }

Json points_json(const std::vector<Vec2>& pts) {
    Json out = Json::array();
    for (const auto& p : pts) out.push_back(vec_json(p));
    return out;
}

Json rvec_json(const RVec2& v) { return Json::array({to_string(v.x), to_string(v.y)}); }

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json periodic_json(const PeriodicPoint& pp) {
    Json eig;
    if (pp.eigen.real) {
        eig = Json{{"real", true}, {"values", Json::array({pp.eigen.first, pp.eigen.second})}};
    } else {
        eig = Json{{"real", false}, {"re", pp.eigen.first}, {"im", pp.eigen.imag}};
    }
    return Json{{"point", vec_json(pp.point)},
                {"period", pp.period},
                {"translation", ivec_json(pp.translation)},
                {"jacobian", Json::array({pp.jacobian.a, pp.jacobian.b, pp.jacobian.c, pp.jacobian.d})},
                {"trace", pp.jacobian.trace()},
                {"eigenvalues", eig},
                {"classification", std::string(to_string(pp.classification))},
                {"residual", pp.residual}};
}

Box box_of(const RunConfig& c, const std::string& section, const std::string& prefix = "") {
    return Box{c.real(section, prefix + "xmin"), c.real(section, prefix + "xmax"), c.real(section, prefix + "ymin"),
               c.real(section, prefix + "ymax")};
}

Box bounds(const std::vector<Vec2>& pts, double pad) {
    Box b{1e300, -1e300, 1e300, -1e300};
    for (const auto& p : pts) {
        b.xmin = std::min(b.xmin, p.x);
        b.xmax = std::max(b.xmax, p.x);
        b.ymin = std::min(b.ymin, p.y);
        b.ymax = std::max(b.ymax, p.y);
    }
    if (pts.empty()) b = Box{-1, 1, -1, 1};
    return Box{b.xmin - pad, b.xmax + pad, b.ymin - pad, b.ymax + pad};
}

[[noreturn]] void config_fail(const RunConfig& c, const std::string& section, const std::string& key,
                              const std::string& why) {
    throw ConfigError(c.line_of(section, key), why);
}

void require_positive(const RunConfig& c, const std::string& section, const std::string& key) {
    if (!(c.real(section, key) > 0.0)) config_fail(c, section, key, "[" + section + "] " + key + " must be positive");
}

// ---------------------------------------------------------------------------
// shared pipeline pieces

SeedGrid rotation_grid(const RunConfig& c) {
    SeedGrid g;
    g.box = box_of(c, "rotation");
    g.nx = int(c.integer("rotation", "grid_nx"));
    g.ny = int(c.integer("rotation", "grid_ny"));
    return g;
}

Horizons rotation_horizons(const RunConfig& c) {
    return Horizons{c.integer("rotation", "short_horizon"), c.integer("rotation", "long_horizon")};
}

GrowthOptions growth_options(const RunConfig& c) {
    GrowthOptions g;
    g.arclength_budget = c.real("manifold", "arclength");
    g.h_max = c.real("manifold", "h_max");
    g.delta_seed = c.real("manifold", "delta_seed");
    g.vertex_cap = std::size_t(c.integer("manifold", "vertex_cap"));
    return g;
}

/// Newton-refined periodic point named in [manifold]; a hyperbolic_negative
/// point is replaced by its double so the branches are invariant.
struct Saddle {
    std::optional<PeriodicPoint> point;
    std::optional<PeriodicPoint> found;  ///< before doubling
    std::string note;
};

Saddle find_saddle(const LiftedTorusMap& map, const RunConfig& c) {
    Saddle s;
    const IVec2 pr{c.integer("manifold", "p"), c.integer("manifold", "r")};
    const Vec2 seed{c.real("manifold", "point_x"), c.real("manifold", "point_y")};
    const NewtonResult res = newton_periodic(map, c.integer("manifold", "period"), pr, seed);
    if (res.status != NewtonStatus::converged) {
        s.note = res.status == NewtonStatus::singular ? "Newton matrix singular at the seed (non-isolated or parabolic)"
                                                      : "Newton did not converge from the seed";
        return s;
    }
    s.found = res.point;
    if (res.point->classification == Hyperbolicity::hyperbolic_positive) {
        s.point = res.point;
    } else if (res.point->classification == Hyperbolicity::hyperbolic_negative) {
        s.point = doubled(map, *res.point);
        s.note = "hyperbolic_negative point doubled to period " + std::to_string(s.point->period);
    } else {
        s.note = "periodic point is " + std::string(to_string(res.point->classification)) + ", not a saddle";
    }
    return s;
}

struct Tangle {
    std::vector<ManifoldCurve> unstable;
    std::vector<ManifoldCurve> stable;
};

Tangle grow_tangle(const LiftedTorusMap& map, const PeriodicPoint& pp, const GrowthOptions& g) {
    Tangle t;
    for (Branch br : {Branch::plus, Branch::minus}) {
        t.unstable.push_back(grow_manifold(map, pp, ManifoldKind::unstable, br, g));
        t.stable.push_back(grow_manifold(map, pp, ManifoldKind::stable, br, g));
    }
    return t;
}

std::vector<Vec2> unstable_vertices(const Tangle& t) {
    std::vector<Vec2> out;
    for (const auto& c : t.unstable) out.insert(out.end(), c.vertices.begin(), c.vertices.end());
    return out;
}

/// Every integer translate of the points that lands in region.
std::vector<Vec2> fold_into(const std::vector<Vec2>& pts, const Box& region) {
    std::vector<Vec2> out;
    const auto ax0 = std::int64_t(std::floor(region.xmin)) - 1, ax1 = std::int64_t(std::ceil(region.xmax)) + 1;
    const auto ay0 = std::int64_t(std::floor(region.ymin)) - 1, ay1 = std::int64_t(std::ceil(region.ymax)) + 1;
    for (const auto& p : pts) {
        const Vec2 base{p.x - std::floor(p.x), p.y - std::floor(p.y)};
        for (std::int64_t b = ay0; b <= ay1; ++b)
            for (std::int64_t a = ax0; a <= ax1; ++a) {
                const Vec2 q{base.x + double(a), base.y + double(b)};
                if (region.contains(q)) out.push_back(q);
            }
    }
    return out;
}

double pullback_check(const LiftedTorusMap& map, const ManifoldCurve& curve) {
    std::vector<std::size_t> picks;
    for (std::size_t i = 0; i < curve.vertices.size(); i += 97)
        if (curve.params[i] >= 2.0) picks.push_back(i);
    return pullback_slope(map, curve, picks, 0.05);
}

Json curve_json(const LiftedTorusMap& map, const ManifoldCurve& c) {
    Json j{{"kind", std::string(to_string(c.kind))},
           {"branch", std::string(to_string(c.branch))},
           {"vertices", c.vertices.size()},
           {"arclength", c.arclength},
           {"parameter_end", c.params.back()},
           {"direction", vec_json(c.direction)},
           {"expansion", c.expansion},
           {"map_applications", c.log.map_applications},
           {"refinements", c.log.refinements},
           {"forced_steps", c.log.forced}};
    try {
        const double slope = pullback_check(map, c);
        j["pullback_slope"] = slope;
        j["pullback_slope_ideal"] = -std::log(c.expansion);
    } catch (const std::runtime_error&) {
        j["pullback_slope"] = nullptr;
    }
    return j;
}

std::string curve_csv(const ManifoldCurve& c) {
    Csv csv({"t", "x", "y"});
    for (std::size_t i = 0; i < c.vertices.size(); ++i)
        csv.row({num(c.params[i]), num(c.vertices[i].x), num(c.vertices[i].y)});
    return csv.str();
}

std::string curve_file(const ManifoldCurve& c) {
    return std::string("manifold_") + (c.kind == ManifoldKind::unstable ? "u" : "s") + "_" +
           (c.branch == Branch::plus ? "plus" : "minus") + ".csv";
}

std::vector<Vec2> clipped(const std::vector<Vec2>& pts, const Box& view, std::size_t cap = 20000) {
    std::vector<Vec2> out;
    const std::size_t stride = std::max<std::size_t>(1, pts.size() / cap);
    for (std::size_t i = 0; i < pts.size(); i += stride)
        if (view.contains(pts[i])) out.push_back(pts[i]);
    return out;
}

std::string tangle_svg(const Tangle& t, const PeriodicPoint& pp, const std::vector<CrossingWitness>& marks,
                       const std::vector<IVec2>& translates) {
    const Box view{pp.point.x - 1.5, pp.point.x + 1.5, pp.point.y - 1.5, pp.point.y + 1.5};
    Svg svg(view);
    svg.axes();
    for (const auto& v : translates) {
        if (v == IVec2{0, 0}) continue;
        for (const auto& s : t.stable) {
            std::vector<Vec2> moved;
            for (const auto& p : s.vertices) moved.push_back(p + to_vec(v));
            svg.polyline(clipped(moved, view), "#7fa7d9", 0.6, "3,2");
        }
    }
    for (const auto& s : t.stable) svg.polyline(clipped(s.vertices, view), "#1f4fbf", 0.8);
    for (const auto& u : t.unstable) svg.polyline(clipped(u.vertices, view), "#c8102e", 0.8);
    for (const auto& w : marks)
        if (view.contains(w.location)) svg.circle(w.location, 3.0, "#111111");
    svg.circle(pp.point, 4.0, "#00a000");
    return svg.str();
}

WeightedSft load_graph(const RunConfig& c) {
    const std::string& kind = c.text("sft", "graph");
    if (kind == "two_loops") return WeightedSft::parse("vertices 1\n0 0 1 0\n0 0 0 1\n");
    if (kind == "triangle") return WeightedSft::parse("vertices 2\n0 0 1 0\n1 1 0 1\n0 1 0 0\n1 0 0 0\n");
    std::filesystem::path path(c.text("sft", "file"));
    if (path.is_relative() && !c.base_dir.empty()) path = std::filesystem::path(c.base_dir) / path;
    std::ifstream in(path, std::ios::binary);
    if (!in) config_fail(c, "sft", "file", "cannot read graph file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return WeightedSft::parse(buf.str());
    } catch (const std::invalid_argument& e) {
        config_fail(c, "sft", "file", "graph file '" + path.string() + "': " + e.what());
    }
}

HalfPlane half_plane(const RunConfig& c) {
    const std::string& m = c.text("confinement", "mode");
    HalfPlane hp;
    hp.mode = m == "north" ? ConfinementMode::north : m == "theta" ? ConfinementMode::theta : ConfinementMode::south;
    hp.theta = c.real("confinement", "theta");
    return hp;
}

ConfinementGrid confinement_grid(const RunConfig& c) {
    return ConfinementGrid{box_of(c, "confinement"), c.real("confinement", "step")};
}

Json cloud_json(const ConfinementCloud& cloud) {
    std::size_t unbounded = 0;
    for (bool f : cloud.unbounded_flags) unbounded += f ? 1 : 0;
    return Json{{"mode", std::string(to_string(cloud.half_plane.mode))},
                {"theta", cloud.half_plane.theta},
                {"horizon", cloud.horizon},
                {"window", Json::array({cloud.grid.window.xmin, cloud.grid.window.xmax, cloud.grid.window.ymin,
                                        cloud.grid.window.ymax})},
                {"step", cloud.grid.step},
                {"grid_points", cloud.grid.size()},
                {"points", cloud.points.size()},
                {"components", cloud.components.size()},
                {"unbounded_components", unbounded},
                {"unbounded_points", cloud.unbounded_points()}};
}

std::string cloud_svg(const ConfinementCloud& cloud) {
    const Box& w = cloud.grid.window;
    Svg svg(w);
    constexpr int bins = 128;
    std::vector<int> all(bins * bins, 0), unb(bins * bins, 0);
    std::vector<bool> flag(cloud.points.size(), false);
    for (std::size_t c = 0; c < cloud.components.size(); ++c)
        if (cloud.unbounded_flags[c])
            for (std::size_t k : cloud.components[c]) flag[k] = true;
    for (std::size_t k = 0; k < cloud.points.size(); ++k) {
        const Vec2 p = cloud.point(k);
        const int i = std::clamp(int((p.x - w.xmin) / w.width() * bins), 0, bins - 1);
        const int j = std::clamp(int((p.y - w.ymin) / w.height() * bins), 0, bins - 1);
        ++all[j * bins + i];
        if (flag[k]) ++unb[j * bins + i];
    }
    const double cells = double(cloud.grid.size()) / double(bins * bins);
    for (int j = 0; j < bins; ++j)
        for (int i = 0; i < bins; ++i) {
            const int n = all[j * bins + i];
            if (!n) continue;
            const Vec2 lo{w.xmin + w.width() * i / bins, w.ymin + w.height() * j / bins};
            const Vec2 hi{w.xmin + w.width() * (i + 1) / bins, w.ymin + w.height() * (j + 1) / bins};
            svg.rect(lo, hi, unb[j * bins + i] ? "#c8102e" : "#555555", std::min(1.0, n / cells));
        }
    svg.axes();
    return svg.str();
}

Json probe_json(const OmegaProbe& p) {
    Json hist = Json::array();
    if (!p.drifts.empty()) {
        const auto [lo, hi] = std::minmax_element(p.drifts.begin(), p.drifts.end());
        constexpr int bins = 20;
        const double width = (*hi - *lo) > 0.0 ? (*hi - *lo) / bins : 1.0;
        std::vector<std::size_t> counts(bins, 0);
        for (double d : p.drifts) ++counts[std::size_t(std::clamp(int((d - *lo) / width), 0, bins - 1))];
        for (int b = 0; b < bins; ++b)
            hist.push_back(Json{{"lo", *lo + b * width}, {"hi", *lo + (b + 1) * width}, {"count", counts[b]}});
    }
    return Json{{"verdict", std::string(to_string(p.verdict))},
                {"predicted_sign", p.predicted_sign},
                {"threshold", p.threshold},
                {"sampled", p.sampled},
                {"survivors", p.survivors},
                {"drifting", p.drifting},
                {"drifting_fraction", p.drifting_fraction},
                {"window_persistent", p.window_persistent},
                {"drift_histogram", hist}};
}

std::string probe_csv(const OmegaProbe& p) {
    Csv csv({"seed_x", "seed_y", "drift"});
    for (std::size_t i = 0; i < p.drifts.size(); ++i)
        csv.row({num(p.seeds[i].x), num(p.seeds[i].y), num(p.drifts[i])});
    return csv.str();
}

MixingReport run_mixing(const LiftedTorusMap& map, const RunConfig& c) {
    const Ball u{{c.real("mixing", "u_x"), c.real("mixing", "u_y")}, c.real("mixing", "u_r")};
    const Ball v{{c.real("mixing", "v_x"), c.real("mixing", "v_y")}, c.real("mixing", "v_r")};
    return mixing_probe(map, u, v, c.integer("mixing", "n_max"), int(c.integer("mixing", "samples")));
}

Json mixing_json(const MixingReport& r) {
    std::size_t hits = 0;
    for (bool h : r.hits) hits += h ? 1 : 0;
    Json j{{"samples", r.samples}, {"n_max", r.hits.size()}, {"hit_count", hits}};
    j["tail_start"] = r.tail ? Json(*r.tail) : Json(nullptr);
    return j;
}

std::string mixing_csv(const MixingReport& r) {
    Csv csv({"n", "hit"});
    for (std::size_t n = 0; n < r.hits.size(); ++n) csv.row({std::to_string(n + 1), r.hits[n] ? "1" : "0"});
    return csv.str();
}

DiskReport run_disks(const Tangle& t, const RunConfig& c) {
    const Box region = box_of(c, "disks");
    return complement_disk_stats(fold_into(unstable_vertices(t), region), region, c.real("disks", "step"));
}

Json disks_json(const DiskReport& r) {
    std::size_t interior = 0;
    for (const auto& d : r.disks) interior += d.touches_boundary ? 0 : 1;
    return Json{{"region", Json::array({r.region.xmin, r.region.xmax, r.region.ymin, r.region.ymax})},
                {"step", r.step},
                {"disks", r.disks.size()},
                {"interior_disks", interior},
                {"max_diameter", r.max_diameter}};
}

std::string disks_csv(const DiskReport& r) {
    Csv csv({"id", "cells", "diameter", "touches_boundary"});
    for (const auto& d : r.disks)
        csv.row({std::to_string(d.id), std::to_string(d.cells.size()), num(d.diameter), d.touches_boundary ? "1" : "0"});
    return csv.str();
}

Json orbit_json(const BoundedDeviationOrbit& o, const WeightedSft& g) {
    Json word = Json::array();
    for (std::size_t e : o.word) word.push_back(e);
    Json support = Json::array();
    for (std::size_t k = 0; k < o.support.size(); ++k)
        support.push_back(Json{{"cycle", o.support[k]}, {"repetitions", o.repetitions[k]}});
    (void)g;
    return Json{{"target", rvec_json(o.target)},
                {"word", word},
                {"word_length", o.word.size()},
                {"support", support},
                {"connector_passes", o.connector_passes},
                {"deviation_bound_squared", to_string(o.deviation_bound2)},
                {"deviation_bound", o.deviation_bound},
                {"verified_horizon", o.verified_horizon},
                {"max_deviation_squared", to_string(o.max_deviation2)},
                {"max_deviation", std::sqrt(to_double(o.max_deviation2))}};
}

Json hull_json(const CycleHull& h) {
    Json verts = Json::array();
    for (const auto& v : h.vertices) verts.push_back(rvec_json(v));
    Json approx = Json::array();
    for (const auto& v : h.vertices) approx.push_back(Json::array({to_double(v.x), to_double(v.y)}));
    return Json{{"vertices", verts},
                {"vertices_float", approx},
                {"dimension", h.dimension},
                {"cycles", h.cycles.size()},
                {"partial", h.partial}};
}

// ---------------------------------------------------------------------------
// commands

void cmd_rotset(const LiftedTorusMap& map, const RunConfig& c, OutputSet& out, std::string& summary) {
    const RotationPolygon poly = estimate_rotation_set(map, rotation_grid(c), rotation_horizons(c));
    Json j{{"hull", points_json(poly.hull)},
           {"short_hull", points_json(poly.short_hull)},
           {"horizons", Json::array({poly.horizons.short_n, poly.horizons.long_n})},
           {"hausdorff_gap", poly.hausdorff_gap},
           {"origin_margin", poly.margin({0.0, 0.0})},
           {"seeds", poly.sample_means.size()}};
    out.add("rotset.json", dump(j));
    Csv csv({"seed_x", "seed_y", "mean_x", "mean_y", "horizon"});
    std::vector<Vec2> means;
    for (const auto& s : poly.sample_means) {
        csv.row({num(s.seed.x), num(s.seed.y), num(s.mean.x), num(s.mean.y), std::to_string(s.horizon)});
        means.push_back(s.mean);
    }
    out.add("rotset.csv", csv.str());
    Svg svg(bounds(means, 0.1));
    svg.axes();
    for (const auto& m : means) svg.circle(m, 1.5, "#555555");
    svg.polygon(poly.short_hull, "#7fa7d9", "none");
    svg.polygon(poly.hull, "#c8102e", "#c8102e", 0.15);
    out.add("rotset.svg", svg.str());
    summary = "rotation set hull with " + std::to_string(poly.hull.size()) + " vertices, gap " + num(poly.hausdorff_gap);
}

void cmd_vrotset(const LiftedTorusMap& map, const RunConfig& c, OutputSet& out, std::string& summary) {
    const RotationInterval iv = estimate_vertical_rotation_set(map, rotation_grid(c), rotation_horizons(c));
    Json j{{"lo", iv.lo},
           {"hi", iv.hi},
           {"short_lo", iv.short_lo},
           {"short_hi", iv.short_hi},
           {"horizons", Json::array({iv.horizons.short_n, iv.horizons.long_n})},
           {"hausdorff_gap", iv.hausdorff_gap},
           {"zero_margin", iv.margin(0.0)},
           {"seeds", iv.sample_means.size()}};
    out.add("vrotset.json", dump(j));
    Csv csv({"seed_x", "seed_y", "mean_y", "horizon"});
    std::vector<Vec2> pts;
    for (const auto& s : iv.sample_means) {
        csv.row({num(s.seed.x), num(s.seed.y), num(s.mean.y), std::to_string(s.horizon)});
        pts.push_back({s.mean.y, s.seed.y});
    }
    out.add("vrotset.csv", csv.str());
    Svg svg(bounds(pts, 0.1));
    for (const auto& p : pts) svg.circle(p, 1.2, "#555555");
    svg.polyline({{iv.lo, 0.0}, {iv.lo, 1.0}}, "#c8102e", 1.5);
    svg.polyline({{iv.hi, 0.0}, {iv.hi, 1.0}}, "#c8102e", 1.5);
    svg.polyline({{0.0, 0.0}, {0.0, 1.0}}, "#999999", 0.5);
    out.add("vrotset.svg", svg.str());
    summary = "vertical rotation interval [" + num(iv.lo) + ", " + num(iv.hi) + "]";
}

void cmd_find_periodic(const LiftedTorusMap& map, const RunConfig& c, OutputSet& out, std::string& summary) {
    const auto q = c.integer("periodic", "period");
    const IVec2 pr{c.integer("periodic", "p"), c.integer("periodic", "r")};
    const int n = int(c.integer("periodic", "grid"));
    const double jitter = c.real("periodic", "jitter");
    SeedGrid grid;
    grid.nx = grid.ny = n;
    const auto seeds = grid.points();
    std::optional<SplitRng> rng;
    if (jitter > 0.0) rng = SplitRng(c.seed()).split("find-periodic");
    const SweepResult sweep = sweep_periodic(map, q, pr, seeds, NewtonOptions{}, rng, jitter);
    Json orbits = Json::array();
    for (const auto& pp : sweep.orbits) {
        Json o = periodic_json(pp);
        if (pp.classification == Hyperbolicity::hyperbolic_negative) o["doubled"] = periodic_json(doubled(map, pp));
        orbits.push_back(o);
    }
    Json j{{"period", q},
           {"translation", ivec_json(pr)},
           {"seeds", sweep.seeds},
           {"converged", sweep.converged},
           {"singular", sweep.singular},
           {"diverged", sweep.diverged},
           {"non_isolated", sweep.non_isolated()},
           {"orbits", orbits}};
    out.add("periodic.json", dump(j));
    summary = std::to_string(sweep.orbits.size()) + " periodic orbit(s)" +
              (sweep.non_isolated() ? ", singular Newton matrices met (non-isolated?)" : "");
}

PeriodicPoint require_saddle(const LiftedTorusMap& map, const RunConfig& c) {
    const Saddle s = find_saddle(map, c);
    if (!s.point) throw CheckFailure("no hyperbolic periodic point at the [manifold] seed: " + s.note);
    return *s.point;
}

void cmd_grow(const LiftedTorusMap& map, const RunConfig& c, OutputSet& out, std::string& summary) {
    const PeriodicPoint pp = require_saddle(map, c);
    const Tangle t = grow_tangle(map, pp, growth_options(c));
    Json curves = Json::array();
    for (const auto* set : {&t.unstable, &t.stable})
        for (const auto& cv : *set) {
            curves.push_back(curve_json(map, cv));
            out.add(curve_file(cv), curve_csv(cv));
        }
    const EigenFrame f = eigen_frame(pp);
    Json j{{"owner", periodic_json(pp)},
           {"lambda_unstable", f.lambda_unstable},
           {"lambda_stable", f.lambda_stable},
           {"unstable_direction", vec_json(f.unstable)},
           {"stable_direction", vec_json(f.stable)},
           {"curves", curves}};
    out.add("manifolds.json", dump(j));
    out.add("tangle.svg", tangle_svg(t, pp, {}, {}));
    summary = "grew 4 branches at (" + num(pp.point.x) + ", " + num(pp.point.y) + ")";
}

struct ScanOutcome {
    TranslateScan scan;
    std::vector<CrossingWitness> marks;
};

ScanOutcome run_scan(const Tangle& t, const RunConfig& c) {
    const auto lo = c.integer("manifold", "scan_min"), hi = c.integer("manifold", "scan_max");
    ScanOutcome s;
    s.scan = translate_scan(t.unstable, t.stable, IVec2{lo, lo}, IVec2{hi, hi},
                            CrossingParams::from_h_max(c.real("manifold", "h_max")));
    for (const auto& cell : s.scan.cells)
        if (cell.first) s.marks.push_back(*cell.first);
    return s;
}

Json witness_json(const CrossingWitness& w) {
    Json rect = Json::array();
    for (const auto& p : w.rectangle) rect.push_back(vec_json(p));
    return Json{{"location", vec_json(w.location)},
                {"translate", ivec_json(w.translate)},
                {"piece_segment", w.piece_segment},
                {"target_segment", w.target_segment},
                {"rectangle", rect},
                {"exit_left", vec_json(w.exit_left)},
                {"exit_right", vec_json(w.exit_right)}};
}

double closure_score(const Tangle& t, const RunConfig& c) {
    return closure_invariance_score(unstable_vertices(t), IVec2{c.integer("manifold", "closure_a"), c.integer("manifold", "closure_b")},
                                    box_of(c, "manifold", "region_"), c.real("manifold", "closure_eps"));
}

void cmd_scan(const LiftedTorusMap& map, const RunConfig& c, OutputSet& out, std::string& summary) {
    const PeriodicPoint pp = require_saddle(map, c);
    const Tangle t = grow_tangle(map, pp, growth_options(c));
    const ScanOutcome s = run_scan(t, c);
    Json cells = Json::array();
    Csv csv({"a", "b", "status", "witnesses"});
    std::vector<IVec2> translates;
    std::size_t found = 0;
    for (const auto& cell : s.scan.cells) {
        translates.push_back(cell.translate);
        found += cell.found ? 1 : 0;
        Json jc{{"translate", ivec_json(cell.translate)},
                {"status", cell.found ? "witness" : "not found at current budget"},
                {"witnesses", cell.witnesses}};
        if (cell.first) jc["first_witness"] = witness_json(*cell.first);
        cells.push_back(jc);
        csv.row({std::to_string(cell.translate.a), std::to_string(cell.translate.b),
                 cell.found ? "witness" : "not_found", std::to_string(cell.witnesses)});
    }
    Json j{{"owner", periodic_json(pp)},
           {"arclength", c.real("manifold", "arclength")},
           {"cells", cells},
           {"closure_score", closure_score(t, c)},
           {"closure_translate", Json::array({c.integer("manifold", "closure_a"), c.integer("manifold", "closure_b")})}};
    out.add("scan.json", dump(j));
    out.add("scan.csv", csv.str());
    out.add("tangle.svg", tangle_svg(t, pp, s.marks, translates));
    summary = std::to_string(found) + "/" + std::to_string(s.scan.cells.size()) + " translates with a witness";
}

void cmd_confinement(const LiftedTorusMap& map, const RunConfig& c, OutputSet& out, std::string& summary,
                     bool probe) {
    const ConfinementCloud cloud =
        compute_confinement(map, half_plane(c), confinement_grid(c), c.integer("confinement", "horizon"));
    Json j = cloud_json(cloud);
    Csv csv({"component", "points", "unbounded"});
    for (std::size_t k = 0; k < cloud.components.size(); ++k)
        csv.row({std::to_string(k), std::to_string(cloud.components[k].size()), cloud.unbounded_flags[k] ? "1" : "0"});
    if (!probe) {
        out.add("confinement.json", dump(j));
        out.add("confinement_components.csv", csv.str());
        out.add("confinement.svg", cloud_svg(cloud));
        summary = std::to_string(cloud.points.size()) + " confined points, " +
                  std::to_string(cloud.unbounded_points()) + " in boundary-touching components";
        return;
    }
    if (cloud.points.empty()) throw CheckFailure("confinement cloud is empty; nothing to probe");
    const OmegaProbe p = omega_probe(cloud, map, c.integer("confinement", "extra"),
                                     std::size_t(c.integer("confinement", "sample_cap")),
                                     c.real("confinement", "threshold"));
    Json pj{{"cloud", j}, {"extra_iterations", c.integer("confinement", "extra")}, {"probe", probe_json(p)}};
    out.add("omega.json", dump(pj));
    out.add("omega_drifts.csv", probe_csv(p));
    summary = std::string(to_string(p.verdict)) + " (" + std::to_string(p.drifting) + "/" +
              std::to_string(p.survivors) + " survivors drifting)";
}

void cmd_disks(const LiftedTorusMap& map, const RunConfig& c, OutputSet& out, std::string& summary) {
    const PeriodicPoint pp = require_saddle(map, c);
    Tangle t;
    for (Branch br : {Branch::plus, Branch::minus})
        t.unstable.push_back(grow_manifold(map, pp, ManifoldKind::unstable, br, growth_options(c)));
    const DiskReport r = run_disks(t, c);
    out.add("disks.json", dump(disks_json(r)));
    out.add("disks.csv", disks_csv(r));
    summary = std::to_string(r.disks.size()) + " complementary components, max interior diameter " + num(r.max_diameter);
}

void cmd_mixing(const LiftedTorusMap& map, const RunConfig& c, OutputSet& out, std::string& summary) {
    const MixingReport r = run_mixing(map, c);
    out.add("mixing.json", dump(mixing_json(r)));
    out.add("mixing.csv", mixing_csv(r));
    summary = r.tail ? "hits on every n from " + std::to_string(*r.tail) : "no full tail of hits up to n_max";
}

void cmd_sft_hull(const RunConfig& c, OutputSet& out, std::string& summary) {
    const WeightedSft g = load_graph(c);
    const CycleHull h = cycle_rotation_hull(g, std::size_t(c.integer("sft", "cycle_cap")));
    Json j = hull_json(h);
    j["graph"] = g.to_text();
    out.add("sft_hull.json", dump(j));
    summary = "cycle hull of dimension " + std::to_string(h.dimension) + " with " + std::to_string(h.vertices.size()) +
              " vertices" + (h.partial ? " (partial)" : "");
}

BoundedDeviationOrbit build_orbit(const WeightedSft& g, const RunConfig& c) {
    const RVec2 rho{c.rational("sft", "rho_x"), c.rational("sft", "rho_y")};
    try {
        return bounded_deviation_orbit(g, rho, c.integer("sft", "horizon"), std::size_t(c.integer("sft", "cycle_cap")));
    } catch (const std::invalid_argument& e) {
        config_fail(c, "sft", "rho_x", e.what());
    }
}

void cmd_sft_orbit(const RunConfig& c, OutputSet& out, std::string& summary) {
    const WeightedSft g = load_graph(c);
    const BoundedDeviationOrbit o = build_orbit(g, c);
    out.add("sft_orbit.json", dump(orbit_json(o, g)));
    const DeviationScan scan = verify_deviation(g, o, o.verified_horizon);
    Csv csv({"n", "running_max_deviation"});
    for (std::size_t n = 0; n < scan.running_max.size(); ++n) csv.row({std::to_string(n + 1), num(scan.running_max[n])});
    out.add("sft_deviation.csv", csv.str());
    summary = "word of length " + std::to_string(o.word.size()) + ", max deviation " +
              num(std::sqrt(to_double(o.max_deviation2))) + " <= " + num(o.deviation_bound);
}

const std::string kSkipped = "hypothesis not met, skipped";

}  // namespace

// ---------------------------------------------------------------------------

std::vector<CheckRow> check_all(const RunConfig& c, OutputSet& out) {
    const LiftedTorusMap map = build_map(c);
    std::vector<CheckRow> rows;
    Json details = Json::object();

    const LiftValidation lv = validate_lift(map, 10000, SplitRng(c.seed()).split("lift").next_u64());
    const bool lift_ok = lv.max_deck_residual < 1e-12 && lv.max_det_error < 1e-12;
    rows.push_back({"lift contract", lift_ok ? "pass" : "fail",
                    "deck " + num(lv.max_deck_residual) + ", det " + num(lv.max_det_error),
                    "10000 random points, v in [-2,2]^2"});
    details["lift"] = Json{{"max_deck_residual", lv.max_deck_residual},
                           {"max_det_error", lv.max_det_error},
                           {"max_inverse_error", lv.max_inverse_error}};

    // hypothesis: zero strictly inside the (vertical) rotation set by more than the horizon gap
    bool hypothesis = false;
    const bool dehn = map.homotopy().is_dehn_twist();
    if (dehn) {
        const RotationInterval iv = estimate_vertical_rotation_set(map, rotation_grid(c), rotation_horizons(c));
        const bool point = iv.hi - iv.lo <= 1e-9;
        hypothesis = iv.margin(0.0) > iv.hausdorff_gap;
        rows.push_back({"vertical rotation interval", "pass",
                        point ? "{" + num(0.5 * (iv.lo + iv.hi)) + "}" : "[" + num(iv.lo) + ", " + num(iv.hi) + "]",
                        "gap " + num(iv.hausdorff_gap) + (hypothesis ? "; 0 interior" : "; 0 not interior")});
        details["vertical_rotation"] = Json{{"lo", iv.lo}, {"hi", iv.hi}, {"gap", iv.hausdorff_gap}};
    } else {
        const RotationPolygon poly = estimate_rotation_set(map, rotation_grid(c), rotation_horizons(c));
        hypothesis = poly.margin({0.0, 0.0}) > poly.hausdorff_gap;
        rows.push_back({"rotation set", "pass", std::to_string(poly.hull.size()) + " hull vertices",
                        "origin margin " + num(poly.margin({0.0, 0.0})) + ", gap " + num(poly.hausdorff_gap) +
                            (hypothesis ? "; 0 interior" : "; 0 not interior")});
        details["rotation_set"] = Json{{"hull", points_json(poly.hull)}, {"gap", poly.hausdorff_gap}};
    }

    const Saddle saddle = find_saddle(map, c);
    if (saddle.point) {
        rows.push_back({"hyperbolic periodic point", "pass",
                        "(" + num(saddle.point->point.x) + ", " + num(saddle.point->point.y) + ") period " +
                            std::to_string(saddle.point->period),
                        saddle.note.empty() ? std::string(to_string(saddle.point->classification)) : saddle.note});
        details["saddle"] = periodic_json(*saddle.point);
    } else {
        rows.push_back({"hyperbolic periodic point", "inconclusive", "none", saddle.note});
    }

    const std::int64_t lo = c.integer("manifold", "scan_min"), hi = c.integer("manifold", "scan_max");
    if (!hypothesis) {
        rows.push_back({"translate crossings", kSkipped, "", ""});
        rows.push_back({"closure translation score", kSkipped, "", ""});
        rows.push_back({"complement disk diameters", kSkipped, "", ""});
    } else if (!saddle.point) {
        rows.push_back({"translate crossings", "inconclusive", "", "no saddle to grow manifolds from"});
        rows.push_back({"closure translation score", "inconclusive", "", "no saddle"});
        rows.push_back({"complement disk diameters", "inconclusive", "", "no saddle"});
    } else {
        const Tangle t = grow_tangle(map, *saddle.point, growth_options(c));
        const ScanOutcome s = run_scan(t, c);
        Json cells = Json::array();
        for (const auto& cell : s.scan.cells) {
            const std::string name = "translate crossing (" + std::to_string(cell.translate.a) + "," +
                                     std::to_string(cell.translate.b) + ")";
            rows.push_back({name, cell.found ? "pass" : "inconclusive", std::to_string(cell.witnesses) + " witnesses",
                            cell.found ? "" : "not found at current budget"});
            cells.push_back(Json{{"translate", ivec_json(cell.translate)}, {"witnesses", cell.witnesses}});
        }
        (void)lo;
        (void)hi;
        details["translate_scan"] = cells;
        const double score = closure_score(t, c);
        const double eps = c.real("manifold", "closure_eps");
        rows.push_back({"closure translation score", score <= eps ? "pass" : "inconclusive", num(score),
                        "one-sided discrete Hausdorff distance, threshold " + num(eps)});
        const DiskReport disks = run_disks(t, c);
        const double span = std::min(disks.region.width(), disks.region.height());
        rows.push_back({"complement disk diameters", disks.max_diameter < 0.5 * span ? "pass" : "inconclusive",
                        num(disks.max_diameter),
                        std::to_string(disks.disks.size()) + " components in the region"});
        details["disks"] = disks_json(disks);
    }

    std::vector<HalfPlane> planes;
    if (dehn) {
        planes = {HalfPlane{ConfinementMode::south, 0.0}, HalfPlane{ConfinementMode::north, 0.0}};
    } else {
        const auto n = std::max<std::int64_t>(1, c.integer("confinement", "theta_samples"));
        for (std::int64_t k = 0; k < n; ++k)
            planes.push_back(HalfPlane{ConfinementMode::theta, 2.0 * std::numbers::pi * double(k) / double(n)});
    }
    Json probes = Json::array();
    for (const auto& hp : planes) {
        std::string name = "omega-limit " + std::string(to_string(hp.mode));
        if (hp.mode == ConfinementMode::theta) name += " " + num(hp.theta);
        if (!hypothesis) {
            rows.push_back({name, kSkipped, "", ""});
            continue;
        }
        const ConfinementCloud cloud =
            compute_confinement(map, hp, confinement_grid(c), c.integer("confinement", "horizon"));
        if (cloud.unbounded_points() == 0) {
            rows.push_back({name, "inconclusive", "empty", "no boundary-touching component in the window"});
            continue;
        }
        const OmegaProbe p = omega_probe(cloud, map, c.integer("confinement", "extra"),
                                         std::size_t(c.integer("confinement", "sample_cap")),
                                         c.real("confinement", "threshold"));
        rows.push_back({name, p.verdict == OmegaVerdict::escaping ? "pass" : "inconclusive",
                        std::string(to_string(p.verdict)),
                        std::to_string(p.drifting) + "/" + std::to_string(p.survivors) + " survivors drifting"});
        Json pj = probe_json(p);
        pj["cloud"] = cloud_json(cloud);
        probes.push_back(pj);
    }
    details["omega_probes"] = probes;

    if (!hypothesis) {
        rows.push_back({"topological mixing", kSkipped, "", ""});
    } else {
        const MixingReport m = run_mixing(map, c);
        rows.push_back({"topological mixing", m.tail ? "pass" : "inconclusive",
                        m.tail ? "tail from n=" + std::to_string(*m.tail) : "no full tail",
                        "n_max " + std::to_string(c.integer("mixing", "n_max"))});
        details["mixing"] = mixing_json(m);
    }

    // bounded deviation on the configured subshift does not depend on the map
    const WeightedSft g = load_graph(c);
    const CycleHull h = cycle_rotation_hull(g, std::size_t(c.integer("sft", "cycle_cap")));
    try {
        const BoundedDeviationOrbit o = build_orbit(g, c);
        rows.push_back({"bounded deviation orbit", "pass",
                        "max " + num(std::sqrt(to_double(o.max_deviation2))) + " <= " + num(o.deviation_bound),
                        "exact partial sums up to n=" + std::to_string(o.verified_horizon)});
        details["sft"] = Json{{"hull", hull_json(h)}, {"orbit", orbit_json(o, g)}};
    } catch (const InvariantViolation& e) {
        rows.push_back({"bounded deviation orbit", "fail", "", e.what()});
    }

    Json table = Json::array();
    Csv csv({"check", "status", "value", "detail"});
    for (const auto& r : rows) {
        table.push_back(Json{{"check", r.check}, {"status", r.status}, {"value", r.value}, {"detail", r.detail}});
        auto quote = [](const std::string& s) {
            std::string q = "\"";
            for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
            return q + "\"";
        };
        csv.row({quote(r.check), quote(r.status), quote(r.value), quote(r.detail)});
    }
    out.add("check_all.json", dump(Json{{"map", map.name()}, {"checks", table}, {"details", details}}));
    out.add("check_all.csv", csv.str());
    return rows;
}

std::string format_checks(const std::vector<CheckRow>& rows) {
    std::size_t w0 = 5, w1 = 6;
    for (const auto& r : rows) {
        w0 = std::max(w0, r.check.size());
        w1 = std::max(w1, r.status.size());
    }
    auto pad = [](std::string s, std::size_t w) {
        s.resize(std::max(w, s.size()), ' ');
        return s;
    };
    std::string text = pad("check", w0) + "  " + pad("status", w1) + "  value\n";
    for (const auto& r : rows) text += pad(r.check, w0) + "  " + pad(r.status, w1) + "  " + r.value + "\n";
    return text;
}

void validate(const RunConfig& c) {
    const LiftedTorusMap map = build_map(c);
    const std::string cmd = c.command();
    const bool dehn = map.homotopy().is_dehn_twist();
    if (cmd == "rotset" && dehn)
        config_fail(c, "run", "command", "rotset needs a map homotopic to the identity; use vrotset for a Dehn twist");
    if (cmd == "vrotset" && !dehn)
        config_fail(c, "run", "command", "vrotset needs a map homotopic to a Dehn twist; use rotset");
    if ((cmd == "confinement" || cmd == "omega-probe") && c.text("confinement", "mode") == "theta" && dehn)
        config_fail(c, "confinement", "mode", "theta confinement needs a map homotopic to the identity");
    if (c.integer("rotation", "short_horizon") < 1 ||
        c.integer("rotation", "short_horizon") >= c.integer("rotation", "long_horizon"))
        config_fail(c, "rotation", "short_horizon", "[rotation] needs 1 <= short_horizon < long_horizon");
    for (const char* key : {"grid_nx", "grid_ny"})
        if (c.integer("rotation", key) < 1) config_fail(c, "rotation", key, std::string("[rotation] ") + key + " must be >= 1");
    if (c.integer("periodic", "period") < 1) config_fail(c, "periodic", "period", "[periodic] period must be >= 1");
    if (c.integer("periodic", "grid") < 1) config_fail(c, "periodic", "grid", "[periodic] grid must be >= 1");
    if (c.integer("manifold", "period") < 1) config_fail(c, "manifold", "period", "[manifold] period must be >= 1");
    for (const char* key : {"arclength", "h_max", "delta_seed", "closure_eps"}) require_positive(c, "manifold", key);
    if (c.integer("manifold", "scan_min") > c.integer("manifold", "scan_max"))
        config_fail(c, "manifold", "scan_min", "[manifold] scan_min exceeds scan_max");
    for (const char* key : {"step", "threshold"}) require_positive(c, "confinement", key);
    if (c.integer("confinement", "horizon") < 1)
        config_fail(c, "confinement", "horizon", "[confinement] horizon must be >= 1");
    if (c.integer("confinement", "extra") < 0)
        config_fail(c, "confinement", "extra", "[confinement] extra must be >= 0");
    require_positive(c, "disks", "step");
    for (const char* key : {"u_r", "v_r"}) require_positive(c, "mixing", key);
    if (c.integer("mixing", "n_max") < 1) config_fail(c, "mixing", "n_max", "[mixing] n_max must be >= 1");
    if (c.integer("sft", "horizon") < 1) config_fail(c, "sft", "horizon", "[sft] horizon must be >= 1");
    if (c.text("sft", "graph") == "file" && !c.given("sft", "file"))
        config_fail(c, "sft", "graph", "[sft] graph = file needs a 'file' key");
    if (cmd == "sft-hull" || cmd == "sft-orbit" || cmd == "check-all") {
        const WeightedSft g = load_graph(c);
        if (std::size_t(c.integer("sft", "cycle_cap")) < g.vertex_count())
            config_fail(c, "sft", "cycle_cap", "[sft] cycle_cap must be at least the vertex count");
    }
}

RunResult execute(const RunConfig& c) {
    validate(c);
    RunResult res;
    const std::string cmd = c.command();
    if (cmd == "sft-hull") {
        cmd_sft_hull(c, res.outputs, res.summary);
    } else if (cmd == "sft-orbit") {
        cmd_sft_orbit(c, res.outputs, res.summary);
    } else if (cmd == "check-all") {
        res.checks = check_all(c, res.outputs);
        std::size_t fails = 0;
        for (const auto& r : res.checks) fails += r.status == "fail" ? 1 : 0;
        if (fails) res.exit_code = kExitCheckFailure;
        res.summary = std::to_string(res.checks.size()) + " checks, " + std::to_string(fails) + " failed";
    } else {
        const LiftedTorusMap map = build_map(c);
        if (cmd == "rotset") cmd_rotset(map, c, res.outputs, res.summary);
        else if (cmd == "vrotset") cmd_vrotset(map, c, res.outputs, res.summary);
        else if (cmd == "find-periodic") cmd_find_periodic(map, c, res.outputs, res.summary);
        else if (cmd == "grow") cmd_grow(map, c, res.outputs, res.summary);
        else if (cmd == "scan-translates") cmd_scan(map, c, res.outputs, res.summary);
        else if (cmd == "confinement") cmd_confinement(map, c, res.outputs, res.summary, false);
        else if (cmd == "omega-probe") cmd_confinement(map, c, res.outputs, res.summary, true);
        else if (cmd == "disks") cmd_disks(map, c, res.outputs, res.summary);
        else if (cmd == "mixing") cmd_mixing(map, c, res.outputs, res.summary);
    }

    Json config = Json::object();
    for (const auto& [section, keys] : c.values()) {
        Json s = Json::object();
        for (const auto& [k, v] : keys) s[k] = v;
        config[section] = s;
    }
    Json files = Json::array();
    for (const auto& [name, content] : res.outputs.files())
        files.push_back(Json{{"file", name}, {"bytes", content.size()}, {"fnv1a64", fnv1a64_hex(content)}});
    Json manifest{{"tool", "torusdyn"},
                  {"version", kVersion},
                  {"command", cmd},
                  {"seed", c.seed()},
                  {"exit_code", res.exit_code},
                  {"summary", res.summary},
                  {"config", config},
                  {"warnings", c.warnings()},
                  {"outputs", files}};
    res.manifest = dump(manifest);
    return res;
}

int run_config_file(const std::string& path, const RunOptions& options, std::ostream& log) {
    try {
        RunConfig cfg = load_config(path);
        if (options.seed) cfg.set("run", "seed", std::to_string(*options.seed));
        set_worker_threads(std::max(1u, options.threads));
        RunResult res = execute(cfg);
        const std::string dir = options.out_dir.value_or("torusdyn-out");
        write_outputs(dir, res.outputs, res.manifest);
        for (const auto& w : cfg.warnings()) log << "warning: " << w << "\n";
        if (!res.checks.empty()) log << format_checks(res.checks);
        log << cfg.command() << ": " << res.summary << "\n";
        return res.exit_code;
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const CheckFailure& e) {
        log << "check failed: " << e.what() << "\n";
        return kExitCheckFailure;
    } catch (const InvariantViolation& e) {
        log << "invariant violated: " << e.what() << "\n";
        return kExitCheckFailure;
    } catch (const std::invalid_argument& e) {
        log << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        log << "numerical abort: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace torusdyn::harness
