#include "torusdyn/confinement.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "torusdyn/errors.hpp"
#include "torusdyn/parallel.hpp"

namespace torusdyn {

std::string_view to_string(ConfinementMode m) {
    switch (m) {
        case ConfinementMode::theta: return "theta";
        case ConfinementMode::south: return "south";
        case ConfinementMode::north: return "north";
    }
    return "?";
}

std::string_view to_string(OmegaVerdict v) { return v == OmegaVerdict::escaping ? "escaping" : "persistent"; }

bool HalfPlane::holds(const Vec2& z) const {
    switch (mode) {
        case ConfinementMode::south: return z.y <= 0.0;
        case ConfinementMode::north: return z.y >= 0.0;
        case ConfinementMode::theta: return z.x * std::cos(theta) + z.y * std::sin(theta) >= 0.0;
    }
    return false;
}

double HalfPlane::project(const Vec2& d) const {
    switch (mode) {
        case ConfinementMode::south:
        case ConfinementMode::north: return d.y;
        case ConfinementMode::theta: return d.x * std::cos(theta) + d.y * std::sin(theta);
    }
    return 0.0;
}

int HalfPlane::predicted_sign() const { return mode == ConfinementMode::south ? -1 : 1; }

int ConfinementGrid::nx() const { return int(std::floor(window.width() / step + 1e-9)); }
int ConfinementGrid::ny() const { return int(std::floor(window.height() / step + 1e-9)); }

Vec2 ConfinementCloud::point(std::size_t k) const {
    const std::size_t row = std::size_t(grid.nx());
    const std::size_t idx = points.at(k);
    return grid.at(int(idx % row), int(idx / row));
}

std::size_t ConfinementCloud::unbounded_points() const {
    std::size_t n = 0;
    for (std::size_t c = 0; c < components.size(); ++c)
        if (unbounded_flags[c]) n += components[c].size();
    return n;
}

namespace {

/// Orbit state: vertical modes keep x mod 1 and y as is, theta mode uses cells.
class Walker {
public:
    Walker(const LiftedTorusMap& map, const HalfPlane& hp, const Vec2& z)
        : map_(map), vertical_(hp.mode != ConfinementMode::theta), start_(z) {
        if (vertical_)
            z_ = Vec2{z.x - std::floor(z.x), z.y};
        else
            cell_ = CellPoint::from(z);
    }

    void step() {
        if (vertical_) {
            const Vec2 w = map_.forward(z_);
            if (!is_finite(w)) throw NumericalAbort("non-finite image under map '" + map_.name() + "'");
            z_ = Vec2{w.x - std::floor(w.x), w.y};
        } else {
            cell_ = advance(map_, cell_);
        }
    }

    /// Current point; in vertical modes x is only known mod 1, which the
    /// half-plane test ignores.
    Vec2 current() const { return vertical_ ? z_ : cell_.point(); }

    Vec2 displacement() const {
        if (vertical_) return Vec2{0.0, z_.y - start_.y};
        const CellPoint s = CellPoint::from(start_);
        const IVec2 dc = cell_.cell - s.cell;
        return Vec2{(cell_.frac.x - s.frac.x) + double(dc.a), (cell_.frac.y - s.frac.y) + double(dc.b)};
    }

private:
    const LiftedTorusMap& map_;
    bool vertical_;
    Vec2 start_;
    Vec2 z_;
    CellPoint cell_;
};

/// True when the orbit of z satisfies the half-plane test for n = 0..steps.
bool stays(const LiftedTorusMap& map, const HalfPlane& hp, const Vec2& z, std::int64_t steps) {
    if (!hp.holds(z)) return false;
    Walker w(map, hp, z);
    for (std::int64_t n = 0; n < steps; ++n) {
        w.step();
        if (!hp.holds(w.current())) return false;
    }
    return true;
}

/// 4-neighbour components of the set cells on an (nx x ny) lattice, in order of first cell.
std::vector<std::vector<std::size_t>> label(const std::vector<std::uint8_t>& on, int nx, int ny) {
    std::vector<std::vector<std::size_t>> comps;
    std::vector<std::uint8_t> seen(on.size(), 0);
    std::deque<std::size_t> queue;
    for (std::size_t s = 0; s < on.size(); ++s) {
        if (!on[s] || seen[s]) continue;
        comps.emplace_back();
        seen[s] = 1;
        queue.push_back(s);
        while (!queue.empty()) {
            const std::size_t c = queue.front();
            queue.pop_front();
            comps.back().push_back(c);
            const int i = int(c % std::size_t(nx));
            const int j = int(c / std::size_t(nx));
            const int di[4] = {-1, 1, 0, 0};
            const int dj[4] = {0, 0, -1, 1};
            for (int k = 0; k < 4; ++k) {
                const int a = i + di[k];
                const int b = j + dj[k];
                if (a < 0 || b < 0 || a >= nx || b >= ny) continue;
                const std::size_t n = std::size_t(b) * std::size_t(nx) + std::size_t(a);
                if (on[n] && !seen[n]) {
                    seen[n] = 1;
                    queue.push_back(n);
                }
            }
        }
        std::sort(comps.back().begin(), comps.back().end());
    }
    return comps;
}

}  // namespace

ConfinementCloud compute_confinement(const LiftedTorusMap& map, const HalfPlane& half_plane,
                                     const ConfinementGrid& grid, std::int64_t horizon) {
    if (horizon < 1) throw std::invalid_argument("confinement horizon must be at least 1");
    if (!(grid.step > 0.0) || grid.nx() < 1 || grid.ny() < 1)
        throw std::invalid_argument("confinement grid is empty");
    if (half_plane.mode == ConfinementMode::theta && !map.homotopy().is_identity())
        throw std::invalid_argument("theta confinement needs a map homotopic to the identity");

    const int cols = grid.nx();
    const int rows = grid.ny();
    std::vector<std::uint8_t> on(grid.size(), 0);
    parallel_for(on.size(), [&](std::size_t idx) {
        const Vec2 z = grid.at(int(idx % std::size_t(cols)), int(idx / std::size_t(cols)));
        on[idx] = stays(map, half_plane, z, horizon) ? 1 : 0;
    });

    ConfinementCloud cloud;
    cloud.half_plane = half_plane;
    cloud.horizon = horizon;
    cloud.grid = grid;
    std::vector<std::size_t> slot(on.size(), 0);
    for (std::size_t idx = 0; idx < on.size(); ++idx) {
        if (!on[idx]) continue;
        slot[idx] = cloud.points.size();
        cloud.points.push_back(idx);
    }
    for (const auto& comp : label(on, cols, rows)) {
        bool edge = false;
        std::vector<std::size_t> members;
        members.reserve(comp.size());
        for (std::size_t idx : comp) {
            const int i = int(idx % std::size_t(cols));
            const int j = int(idx / std::size_t(cols));
            edge = edge || i == 0 || j == 0 || i == cols - 1 || j == rows - 1;
            members.push_back(slot[idx]);
        }
        cloud.components.push_back(std::move(members));
        cloud.unbounded_flags.push_back(edge);
    }
    return cloud;
}

OmegaProbe omega_probe(const ConfinementCloud& cloud, const LiftedTorusMap& map, std::int64_t extra_iterations,
                       std::size_t sample_cap, double threshold) {
    if (cloud.points.empty()) throw std::invalid_argument("omega probe needs a non-empty cloud");
    if (extra_iterations < 0) throw std::invalid_argument("extra iterations must be non-negative");

    std::vector<std::size_t> candidates;
    for (std::size_t c = 0; c < cloud.components.size(); ++c)
        if (cloud.unbounded_flags[c])
            candidates.insert(candidates.end(), cloud.components[c].begin(), cloud.components[c].end());
    std::sort(candidates.begin(), candidates.end());
    std::vector<std::size_t> sample;
    if (candidates.size() <= sample_cap) {
        sample = candidates;
    } else {
        for (std::size_t k = 0; k < sample_cap; ++k) sample.push_back(candidates[k * candidates.size() / sample_cap]);
    }

    const HalfPlane& hp = cloud.half_plane;
    const std::int64_t total = cloud.horizon + extra_iterations;
    const Box& win = cloud.grid.window;
    struct Outcome {
        bool survived = false;
        bool in_window = true;
        double drift = 0.0;
    };
    std::vector<Outcome> outcome(sample.size());
    parallel_for(sample.size(), [&](std::size_t s) {
        const Vec2 z = cloud.point(sample[s]);
        Outcome& out = outcome[s];
        Walker w(map, hp, z);
        for (std::int64_t n = 0; n < total; ++n) {
            w.step();
            const Vec2 p = w.current();
            if (!hp.holds(p)) return;
            if (n >= cloud.horizon) {
                const bool inside = hp.mode == ConfinementMode::theta ? win.contains(p)
                                                                      : (p.y >= win.ymin && p.y <= win.ymax);
                out.in_window = out.in_window && inside;
            }
        }
        out.survived = true;
        out.drift = hp.project(w.displacement()) / double(total);
    });

    OmegaProbe probe;
    probe.predicted_sign = hp.predicted_sign();
    probe.sampled = sample.size();
    probe.threshold = threshold;
    for (std::size_t s = 0; s < sample.size(); ++s) {
        if (!outcome[s].survived) continue;
        ++probe.survivors;
        probe.seeds.push_back(cloud.point(sample[s]));
        probe.drifts.push_back(outcome[s].drift);
        if (double(probe.predicted_sign) * outcome[s].drift > threshold) ++probe.drifting;
        if (outcome[s].in_window) ++probe.window_persistent;
    }
    probe.drifting_fraction = probe.survivors == 0 ? 1.0 : double(probe.drifting) / double(probe.survivors);
    // integer test avoids rounding at the 99% boundary
    probe.verdict = 100 * probe.drifting >= 99 * probe.survivors ? OmegaVerdict::escaping : OmegaVerdict::persistent;
    return probe;
}

Vec2 DiskReport::cell_center(std::size_t cell) const {
    const int i = int(cell % std::size_t(nx));
    const int j = int(cell / std::size_t(nx));
    return Vec2{region.xmin + (i + 0.5) * step, region.ymin + (j + 0.5) * step};
}

DiskReport complement_disk_stats(std::span<const Vec2> obstacle, const Box& region, double grid_step) {
    if (obstacle.empty()) throw std::invalid_argument("obstacle cloud is empty");
    if (!(grid_step > 0.0)) throw std::invalid_argument("grid step must be positive");
    DiskReport report;
    report.region = region;
    report.step = grid_step;
    report.nx = int(std::floor(region.width() / grid_step + 1e-9));
    report.ny = int(std::floor(region.height() / grid_step + 1e-9));
    if (report.nx < 1 || report.ny < 1) throw std::invalid_argument("region is smaller than one cell");

    const int nx = report.nx;
    const int ny = report.ny;
    std::vector<std::uint8_t> free(std::size_t(nx) * std::size_t(ny), 1);
    for (const Vec2& p : obstacle) {
        const double fi = (p.x - region.xmin) / grid_step - 0.5;
        const double fj = (p.y - region.ymin) / grid_step - 0.5;
        const int i0 = std::max(0, int(std::floor(fi)) - 1);
        const int i1 = std::min(nx - 1, int(std::ceil(fi)) + 1);
        const int j0 = std::max(0, int(std::floor(fj)) - 1);
        const int j1 = std::min(ny - 1, int(std::ceil(fj)) + 1);
        for (int j = j0; j <= j1; ++j)
            for (int i = i0; i <= i1; ++i) {
                const std::size_t cell = std::size_t(j) * std::size_t(nx) + std::size_t(i);
                if (distance(report.cell_center(cell), p) <= grid_step) free[cell] = 0;
            }
    }

    for (auto& comp : label(free, nx, ny)) {
        Disk disk;
        disk.id = report.disks.size();
        std::vector<Vec2> centers;
        centers.reserve(comp.size());
        for (std::size_t cell : comp) {
            const int i = int(cell % std::size_t(nx));
            const int j = int(cell / std::size_t(nx));
            disk.touches_boundary = disk.touches_boundary || i == 0 || j == 0 || i == nx - 1 || j == ny - 1;
            centers.push_back(report.cell_center(cell));
        }
        const auto hull = convex_hull(centers);
        double widest = 0.0;
        for (std::size_t a = 0; a < hull.size(); ++a)
            for (std::size_t b = a + 1; b < hull.size(); ++b) widest = std::max(widest, distance(hull[a], hull[b]));
        disk.diameter = widest + std::numbers::sqrt2 * grid_step;
        disk.cells = std::move(comp);
        if (!disk.touches_boundary) report.max_diameter = std::max(report.max_diameter, disk.diameter);
        report.disks.push_back(std::move(disk));
    }
    return report;
}

}  // namespace torusdyn
