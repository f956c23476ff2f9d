#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <sstream>

#include "torusdyn/crossing.hpp"
#include "torusdyn/harness/commands.hpp"
#include "torusdyn/harness/config.hpp"
#include "torusdyn/map.hpp"
#include "torusdyn/periodic.hpp"
#include "torusdyn/rotation.hpp"
#include "torusdyn/sft.hpp"

namespace py = pybind11;
using namespace torusdyn;

namespace {

using Pair = std::pair<double, double>;

Vec2 v2(const Pair& p) { return {p.first, p.second}; }
Pair tup(const Vec2& v) { return {v.x, v.y}; }

std::vector<Vec2> poly(const std::vector<Pair>& ps) {
    std::vector<Vec2> out;
    out.reserve(ps.size());
    for (const auto& p : ps) out.push_back(v2(p));
    return out;
}

SeedGrid grid(int n) {
    SeedGrid g;
    g.nx = g.ny = n;
    return g;
}

py::dict periodic_dict(const PeriodicPoint& pp) {
    py::dict d;
    d["point"] = tup(pp.point);
    d["period"] = pp.period;
    d["translation"] = std::make_pair(pp.translation.a, pp.translation.b);
    d["classification"] = std::string(to_string(pp.classification));
    d["residual"] = pp.residual;
    d["trace"] = pp.jacobian.trace();
    return d;
}

RVec2 rvec(const std::string& x, const std::string& y) { return {parse_rational(x), parse_rational(y)}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Lifted torus maps: rotation sets, periodic orbits, crossings, subshift orbits";

    py::class_<LiftedTorusMap>(m, "Map")
        .def_property_readonly("name", &LiftedTorusMap::name)
        .def("__call__", [](const LiftedTorusMap& f, Pair z) { return tup(eval_lift(f, v2(z))); })
        .def("inverse", [](const LiftedTorusMap& f, Pair z) { return tup(f.inverse(v2(z))); })
        .def("jacobian",
             [](const LiftedTorusMap& f, Pair z) {
                 const Mat2 j = f.jacobian(v2(z));
                 return std::vector<std::vector<double>>{{j.a, j.b}, {j.c, j.d}};
             })
        .def("iterate",
             [](const LiftedTorusMap& f, Pair z, std::int64_t n) {
                 std::vector<Pair> out;
                 for (const auto& p : iterate(f, v2(z), n)) out.push_back(tup(p));
                 return out;
             },
             py::arg("z"), py::arg("n"))
        .def("deck_residual", [](const LiftedTorusMap& f, Pair z, std::pair<std::int64_t, std::int64_t> v) {
            return deck_residual(f, v2(z), {v.first, v.second});
        });

    m.def("standard_map", &make_standard_map, py::arg("k"), py::arg("epsilon") = 0.0);
    m.def("identity_map", &make_identity_map);
    m.def("translation_map", &make_translation_map, py::arg("a"), py::arg("b"));
    m.def("drift_saddle", &make_drift_saddle, py::arg("a"), py::arg("b"));

    m.def("birkhoff_mean", [](const LiftedTorusMap& f, Pair z, std::int64_t n) { return tup(birkhoff_mean(f, v2(z), n)); },
          py::arg("map"), py::arg("z"), py::arg("n"));

    m.def("vertical_rotation_interval",
          [](const LiftedTorusMap& f, int n, std::int64_t short_n, std::int64_t long_n) {
              const auto r = estimate_vertical_rotation_set(f, grid(n), Horizons{short_n, long_n});
              return std::make_pair(r.lo, r.hi);
          },
          py::arg("map"), py::arg("grid") = 32, py::arg("short_n") = 1000, py::arg("long_n") = 10000);

    m.def("rotation_hull",
          [](const LiftedTorusMap& f, int n, std::int64_t short_n, std::int64_t long_n) {
              std::vector<Pair> out;
              for (const auto& v : estimate_rotation_set(f, grid(n), Horizons{short_n, long_n}).hull) out.push_back(tup(v));
              return out;
          },
          py::arg("map"), py::arg("grid") = 32, py::arg("short_n") = 1000, py::arg("long_n") = 10000);

    m.def("find_periodic",
          [](const LiftedTorusMap& f, std::int64_t q, std::pair<std::int64_t, std::int64_t> pr, int n) {
              py::list out;
              for (const auto& pp : sweep_periodic(f, q, {pr.first, pr.second}, grid(n)).orbits)
                  out.append(periodic_dict(pp));
              return out;
          },
          py::arg("map"), py::arg("q"), py::arg("translation"), py::arg("grid") = 16);

    m.def("count_crossings",
          [](const std::vector<Pair>& piece, const std::vector<Pair>& target, std::pair<std::int64_t, std::int64_t> v) {
              const auto a = poly(piece), b = poly(target);
              return detect_crossings(a, b, {v.first, v.second}).size();
          },
          py::arg("piece"), py::arg("target"), py::arg("translate") = std::make_pair(std::int64_t(0), std::int64_t(0)));

    m.def("bounded_deviation_orbit",
          [](const std::string& graph, const std::string& x, const std::string& y, std::int64_t horizon) {
              const WeightedSft g = WeightedSft::parse(graph);
              const auto o = bounded_deviation_orbit(g, rvec(x, y), horizon);
              py::dict d;
              d["word"] = o.word;
              d["max_deviation"] = std::sqrt(to_double(o.max_deviation2));
              d["deviation_bound"] = std::sqrt(to_double(o.deviation_bound2));
              return d;
          },
          py::arg("graph"), py::arg("x"), py::arg("y"), py::arg("horizon") = 10000);

    m.def("run",
          [](const std::string& path, std::optional<std::string> out, std::optional<std::uint64_t> seed, unsigned threads) {
              harness::RunOptions opt;
              opt.out_dir = std::move(out);
              opt.seed = seed;
              opt.threads = threads;
              std::ostringstream log;
              int code;
              {
                  py::gil_scoped_release release;
                  code = harness::run_config_file(path, opt, log);
              }
              return std::make_pair(code, log.str());
          },
          py::arg("config"), py::arg("out") = py::none(), py::arg("seed") = py::none(), py::arg("threads") = 1,
          "Runs a config file like the command-line tool; returns (exit code, log).");
}
