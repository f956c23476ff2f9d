#include "torusdyn/sft.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "torusdyn/errors.hpp"

namespace torusdyn {

using boost::multiprecision::cpp_int;

Rational cross(const RVec2& a, const RVec2& b) { return a.x * b.y - a.y * b.x; }

Rational parse_rational(std::string_view text) {
    auto bad = [&] { return std::invalid_argument("not a rational number: '" + std::string(text) + "'"); };
    if (text.empty()) throw bad();
    auto is_digits = [](std::string_view s) {
        return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    std::string_view body = text;
    bool negative = false;
    if (body.front() == '-' || body.front() == '+') {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }
    Rational value;
    if (const auto slash = body.find('/'); slash != std::string_view::npos) {
        const auto num = body.substr(0, slash);
        const auto den = body.substr(slash + 1);
        if (!is_digits(num) || !is_digits(den)) throw bad();
        const cpp_int d{std::string(den)};
        if (d == 0) throw bad();
        value = Rational(cpp_int(std::string(num)), d);
    } else {
        const auto dot = body.find('.');
        const auto whole = body.substr(0, dot);
        const auto frac = dot == std::string_view::npos ? std::string_view{} : body.substr(dot + 1);
        if (whole.empty() && frac.empty()) throw bad();
        if (!whole.empty() && !is_digits(whole)) throw bad();
        if (!frac.empty() && !is_digits(frac)) throw bad();
        if (dot != std::string_view::npos && frac.empty()) throw bad();
        value = whole.empty() ? Rational(0) : Rational(cpp_int(std::string(whole)));
        if (!frac.empty()) {
            cpp_int scale = 1;
            for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
            value += Rational(cpp_int(std::string(frac)), scale);
        }
    }
    return negative ? Rational(-value) : value;
}

std::string to_string(const Rational& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

WeightedSft::WeightedSft(std::size_t vertices, std::vector<SftEdge> edges)
    : vertices_(vertices), edges_(std::move(edges)) {
    if (vertices_ == 0) throw std::invalid_argument("subshift needs at least one vertex");
    for (const auto& e : edges_)
        if (e.from >= vertices_ || e.to >= vertices_) throw std::invalid_argument("edge endpoint out of range");
}

WeightedSft WeightedSft::parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::optional<std::size_t> vertices;
    std::vector<SftEdge> edges;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::vector<std::string> tok;
        for (std::string t; fields >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        auto fail = [&](const std::string& why) {
            return std::invalid_argument("line " + std::to_string(lineno) + ": " + why);
        };
        if (!vertices) {
            if (tok.size() != 2 || tok[0] != "vertices") throw fail("expected header 'vertices N'");
            try {
                vertices = std::stoul(tok[1]);
            } catch (const std::exception&) {
                throw fail("bad vertex count '" + tok[1] + "'");
            }
            continue;
        }
        if (tok.size() != 4) throw fail("expected 'i j wx wy'");
        SftEdge e;
        try {
            e.from = std::stoul(tok[0]);
            e.to = std::stoul(tok[1]);
            e.weight = RVec2{parse_rational(tok[2]), parse_rational(tok[3])};
        } catch (const std::exception& ex) {
            throw fail(ex.what());
        }
        if (e.from >= *vertices || e.to >= *vertices) throw fail("vertex index out of range");
        edges.push_back(std::move(e));
    }
    if (!vertices) throw std::invalid_argument("missing 'vertices N' header");
    return WeightedSft(*vertices, std::move(edges));
}

std::string WeightedSft::to_text() const {
    std::string out = "vertices " + std::to_string(vertices_) + "\n";
    for (const auto& e : edges_)
        out += std::to_string(e.from) + " " + std::to_string(e.to) + " " + to_string(e.weight.x) + " " +
               to_string(e.weight.y) + "\n";
    return out;
}

std::vector<std::vector<int>> WeightedSft::adjacency() const {
    std::vector<std::vector<int>> a(vertices_, std::vector<int>(vertices_, 0));
    for (const auto& e : edges_) a[e.from][e.to] = 1;
    return a;
}

Rational WeightedSft::max_weight_norm2() const {
    Rational best = 0;
    for (const auto& e : edges_) best = std::max(best, e.weight.norm2());
    return best;
}

namespace {

/// Out-edges of each vertex sorted by (target, edge index).
std::vector<std::vector<std::size_t>> out_edges(const WeightedSft& sft) {
    std::vector<std::vector<std::size_t>> out(sft.vertex_count());
    for (std::size_t i = 0; i < sft.edges().size(); ++i) out[sft.edges()[i].from].push_back(i);
    for (auto& list : out)
        std::stable_sort(list.begin(), list.end(),
                         [&](std::size_t a, std::size_t b) { return sft.edges()[a].to < sft.edges()[b].to; });
    return out;
}

SftCycle make_cycle(const WeightedSft& sft, std::vector<std::size_t> edges) {
    SftCycle c;
    c.sum = RVec2{0, 0};
    for (std::size_t e : edges) c.sum = c.sum + sft.edges()[e].weight;
    c.mean = Rational(1, std::int64_t(edges.size())) * c.sum;
    c.edges = std::move(edges);
    return c;
}

}  // namespace

CycleEnumeration enumerate_simple_cycles(const WeightedSft& sft, std::size_t cap) {
    const auto out = out_edges(sft);
    const std::size_t n = sft.vertex_count();
    CycleEnumeration result;
    std::vector<std::size_t> path;
    std::vector<bool> on_path(n, false);
    constexpr std::size_t kWorkCap = 50'000'000;
    std::size_t work = 0;

    // depth-first over paths whose vertices are all >= start
    auto dfs = [&](auto&& self, std::size_t start, std::size_t v) -> bool {
        for (std::size_t e : out[v]) {
            if (++work > kWorkCap) return false;
            const std::size_t w = sft.edges()[e].to;
            if (w < start) continue;
            if (w == start) {
                path.push_back(e);
                if (result.cycles.size() >= cap) return false;
                result.cycles.push_back(make_cycle(sft, path));
                path.pop_back();
                continue;
            }
            if (on_path[w]) continue;
            on_path[w] = true;
            path.push_back(e);
            const bool go_on = self(self, start, w);
            path.pop_back();
            on_path[w] = false;
            if (!go_on) return false;
        }
        return true;
    };
    for (std::size_t s = 0; s < n; ++s) {
        on_path[s] = true;
        const bool go_on = dfs(dfs, s, s);
        on_path[s] = false;
        if (!go_on) {
            result.truncated = true;
            break;
        }
    }
    return result;
}

std::vector<RVec2> rational_hull(std::vector<RVec2> pts) {
    auto less = [](const RVec2& a, const RVec2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); };
    std::sort(pts.begin(), pts.end(), less);
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() <= 2) return pts;
    auto turn = [](const RVec2& o, const RVec2& a, const RVec2& b) { return cross(a - o, b - o); };
    std::vector<RVec2> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && turn(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && turn(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

bool in_relative_interior(const std::vector<RVec2>& hull, const RVec2& p) {
    if (hull.empty()) return false;
    if (hull.size() == 1) return hull[0] == p;
    if (hull.size() == 2) {
        const RVec2 d = hull[1] - hull[0];
        const RVec2 v = p - hull[0];
        if (cross(d, v) != 0) return false;
        const Rational t = (v.x * d.x + v.y * d.y) / d.norm2();
        return t > 0 && t < 1;
    }
    for (std::size_t i = 0; i < hull.size(); ++i)
        if (cross(hull[(i + 1) % hull.size()] - hull[i], p - hull[i]) <= 0) return false;
    return true;
}

CycleHull cycle_rotation_hull(const WeightedSft& sft, std::size_t cycle_cap) {
    if (cycle_cap < sft.vertex_count()) throw std::invalid_argument("cycle cap must be at least the vertex count");
    CycleEnumeration en = enumerate_simple_cycles(sft, cycle_cap);
    if (en.cycles.empty()) throw std::invalid_argument("subshift graph has no cycle");
    std::vector<RVec2> means;
    for (const auto& c : en.cycles) means.push_back(c.mean);
    CycleHull out;
    out.vertices = rational_hull(std::move(means));
    out.cycles = std::move(en.cycles);
    out.partial = en.truncated;
    out.dimension = int(std::min<std::size_t>(out.vertices.size(), 3)) - 1;
    return out;
}

namespace {

/// Shortest path of edge indices from u to v (empty when u == v); BFS visits
/// out-edges by ascending target then edge index.
std::vector<std::size_t> shortest_path(const WeightedSft& sft, const std::vector<std::vector<std::size_t>>& out,
                                       std::size_t u, std::size_t v) {
    if (u == v) return {};
    std::vector<std::optional<std::size_t>> via(sft.vertex_count());
    std::vector<bool> seen(sft.vertex_count(), false);
    std::deque<std::size_t> queue{u};
    seen[u] = true;
    while (!queue.empty()) {
        const std::size_t x = queue.front();
        queue.pop_front();
        for (std::size_t e : out[x]) {
            const std::size_t w = sft.edges()[e].to;
            if (seen[w]) continue;
            seen[w] = true;
            via[w] = e;
            if (w == v) {
                std::vector<std::size_t> path;
                for (std::size_t cur = v; cur != u; cur = sft.edges()[*via[cur]].from) path.push_back(*via[cur]);
                std::reverse(path.begin(), path.end());
                return path;
            }
            queue.push_back(w);
        }
    }
    throw std::runtime_error("graph not strongly connected between the chosen cycles (no path " +
                             std::to_string(u) + " -> " + std::to_string(v) + ")");
}

cpp_int lcm_int(const cpp_int& a, const cpp_int& b) { return a / boost::multiprecision::gcd(a, b) * b; }

/// Positive weights a_k (summing to 1) on the chosen means with sum a_k mean_k = rho.
struct Support {
    std::vector<std::size_t> picks;  ///< indices into the distinct-mean list
    std::vector<Rational> weights;
};

std::optional<Support> strictly_between(const std::vector<RVec2>& means, const RVec2& rho, std::size_t i,
                                        std::size_t j) {
    const RVec2 d = means[j] - means[i];
    const RVec2 v = rho - means[i];
    if (d.norm2() == 0 || cross(d, v) != 0) return std::nullopt;
    const Rational t = (v.x * d.x + v.y * d.y) / d.norm2();
    if (t <= 0 || t >= 1) return std::nullopt;
    return Support{{i, j}, {Rational(1) - t, t}};
}

std::optional<Support> find_support(const std::vector<RVec2>& means, const RVec2& rho, int dimension) {
    const std::size_t m = means.size();
    if (dimension == 1) {
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j)
                if (auto s = strictly_between(means, rho, i, j)) return s;
        return std::nullopt;
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            for (std::size_t k = j + 1; k < m; ++k) {
                const RVec2 a = means[i] - means[k];
                const RVec2 b = means[j] - means[k];
                const Rational det = cross(a, b);
                if (det == 0) continue;
                const RVec2 r = rho - means[k];
                const Rational alpha = cross(r, b) / det;
                const Rational beta = cross(a, r) / det;
                const Rational gamma = Rational(1) - alpha - beta;
                if (alpha > 0 && beta > 0 && gamma > 0) return Support{{i, j, k}, {alpha, beta, gamma}};
            }
        }
    }
    // rho on a diagonal of every triangle: two segments through rho in different directions
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const auto first = strictly_between(means, rho, i, j);
            if (!first) continue;
            for (std::size_t k = i + 1; k < m; ++k) {
                for (std::size_t l = k + 1; l < m; ++l) {
                    if (k == j || l == j) continue;
                    const auto second = strictly_between(means, rho, k, l);
                    if (!second || cross(means[j] - means[i], means[l] - means[k]) == 0) continue;
                    Support s;
                    s.picks = {i, j, k, l};
                    const Rational half(1, 2);
                    s.weights = {half * first->weights[0], half * first->weights[1], half * second->weights[0],
                                 half * second->weights[1]};
                    return s;
                }
            }
        }
    }
    return std::nullopt;
}

}  // namespace

BoundedDeviationOrbit bounded_deviation_orbit(const WeightedSft& sft, const RVec2& rho, std::int64_t horizon,
                                              std::size_t cycle_cap) {
    const CycleHull hull = cycle_rotation_hull(sft, cycle_cap);
    const auto& cycles = hull.cycles;

    BoundedDeviationOrbit orbit;
    orbit.target = rho;

    // distinct means, first cycle (enumeration order) representing each
    std::vector<RVec2> means;
    std::vector<std::size_t> representative;
    for (std::size_t c = 0; c < cycles.size(); ++c) {
        if (std::find(means.begin(), means.end(), cycles[c].mean) != means.end()) continue;
        means.push_back(cycles[c].mean);
        representative.push_back(c);
    }

    const auto exact = std::find(means.begin(), means.end(), rho);
    if (exact != means.end()) {
        const std::size_t c = representative[std::size_t(exact - means.begin())];
        orbit.word = cycles[c].edges;
        orbit.support = {c};
        orbit.repetitions = {1};
    } else {
        if (!in_relative_interior(hull.vertices, rho))
            throw std::invalid_argument("rho is on or outside the boundary of the cycle hull");
        const auto support = find_support(means, rho, hull.dimension);
        if (!support) throw std::invalid_argument("no cycle combination found for rho");

        const auto out = out_edges(sft);
        std::vector<std::size_t> chosen;
        for (std::size_t p : support->picks) chosen.push_back(representative[p]);
        std::vector<std::size_t> base;
        for (std::size_t c : chosen) base.push_back(sft.edges()[cycles[c].edges.front()].from);

        // closed connecting walk base_0 -> base_1 -> ... -> base_0
        std::vector<std::vector<std::size_t>> legs;
        for (std::size_t k = 0; k < base.size(); ++k)
            legs.push_back(shortest_path(sft, out, base[k], base[(k + 1) % base.size()]));
        RVec2 connector_sum{0, 0};
        std::int64_t connector_len = 0;
        for (const auto& leg : legs)
            for (std::size_t e : leg) {
                connector_sum = connector_sum + sft.edges()[e].weight;
                ++connector_len;
            }
        const RVec2 r = connector_sum - Rational(connector_len) * rho;

        // solve sum x_k d_k = -r with x >= 0, d_k = L_k (mean_k - rho)
        const std::size_t m = chosen.size();
        std::vector<RVec2> d(m);
        std::vector<Rational> null(m);
        for (std::size_t k = 0; k < m; ++k) {
            const Rational len(std::int64_t(cycles[chosen[k]].edges.size()));
            d[k] = len * (cycles[chosen[k]].mean - rho);
            null[k] = support->weights[k] / len;
        }
        std::vector<Rational> x(m, Rational(0));
        if (r == RVec2{0, 0}) {
            x = null;
        } else {
            const RVec2 rhs = Rational(-1) * r;
            bool solved = false;
            for (std::size_t a = 0; a < m && !solved; ++a) {
                for (std::size_t b = a + 1; b < m && !solved; ++b) {
                    const Rational det = cross(d[a], d[b]);
                    if (det == 0) continue;
                    x[a] = cross(rhs, d[b]) / det;
                    x[b] = cross(d[a], rhs) / det;
                    solved = true;
                }
            }
            if (!solved) {
                // collinear directions: r lies on the same line
                for (std::size_t a = 0; a < m && !solved; ++a) {
                    if (d[a].x != 0) {
                        x[a] = rhs.x / d[a].x;
                        solved = true;
                    } else if (d[a].y != 0) {
                        x[a] = rhs.y / d[a].y;
                        solved = true;
                    }
                }
            }
            if (!solved) throw std::runtime_error("degenerate cycle combination");
            Rational shift = 0;
            for (std::size_t k = 0; k < m; ++k) shift = std::max(shift, Rational(-x[k] / null[k]));
            for (std::size_t k = 0; k < m; ++k) x[k] += shift * null[k];
        }
        cpp_int scale = 1;
        for (const auto& v : x) scale = lcm_int(scale, denominator(v));
        std::vector<std::int64_t> reps(m);
        for (std::size_t k = 0; k < m; ++k) reps[k] = (numerator(x[k]) * (scale / denominator(x[k]))).convert_to<std::int64_t>();
        const auto passes = scale.convert_to<std::int64_t>();

        for (std::size_t k = 0; k < m; ++k) {
            for (std::int64_t rep = 0; rep < reps[k]; ++rep)
                orbit.word.insert(orbit.word.end(), cycles[chosen[k]].edges.begin(), cycles[chosen[k]].edges.end());
            orbit.word.insert(orbit.word.end(), legs[k].begin(), legs[k].end());
        }
        if (connector_len > 0) {
            for (std::int64_t p = 1; p < passes; ++p)
                for (const auto& leg : legs) orbit.word.insert(orbit.word.end(), leg.begin(), leg.end());
            orbit.connector_passes = passes;
        }
        orbit.support = chosen;
        orbit.repetitions = reps;
    }

    // closed walk and exact mean
    RVec2 total{0, 0};
    for (std::size_t i = 0; i < orbit.word.size(); ++i) {
        const auto& e = sft.edges()[orbit.word[i]];
        if (e.to != sft.edges()[orbit.word[(i + 1) % orbit.word.size()]].from)
            throw InvariantViolation("constructed word is not a closed walk");
        total = total + e.weight;
    }
    if (total != Rational(std::int64_t(orbit.word.size())) * rho)
        throw InvariantViolation("constructed word does not have mean rho");

    const Rational len(std::int64_t(orbit.word.size()));
    orbit.deviation_bound2 = len * len * sft.max_weight_norm2();
    orbit.deviation_bound = std::sqrt(to_double(orbit.deviation_bound2));
    const DeviationScan scan = verify_deviation(sft, orbit, horizon);
    orbit.verified_horizon = horizon;
    orbit.max_deviation2 = scan.max2;
    return orbit;
}

DeviationScan verify_deviation(const WeightedSft& sft, const BoundedDeviationOrbit& orbit, std::int64_t n_max) {
    if (orbit.word.empty()) throw std::invalid_argument("empty orbit word");
    DeviationScan scan;
    scan.max2 = 0;
    scan.running_max.reserve(std::size_t(std::max<std::int64_t>(n_max, 0)));
    RVec2 partial{0, 0};
    RVec2 drift{0, 0};
    const std::size_t period = orbit.word.size();
    for (std::int64_t n = 1; n <= n_max; ++n) {
        partial = partial + sft.edges()[orbit.word[std::size_t(n - 1) % period]].weight;
        drift = drift + orbit.target;
        const Rational dev2 = (partial - drift).norm2();
        if (dev2 > scan.max2) {
            scan.max2 = dev2;
            scan.argmax = n;
        }
        scan.running_max.push_back(std::sqrt(to_double(scan.max2)));
    }
    scan.max = std::sqrt(to_double(scan.max2));
    if (scan.max2 > orbit.deviation_bound2)
        throw InvariantViolation("partial-sum deviation exceeds the bound of the orbit");
    return scan;
}

}  // namespace torusdyn
