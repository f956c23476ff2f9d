#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "torusdyn/geometry.hpp"
#include "torusdyn/map.hpp"

namespace torusdyn {

enum class ConfinementMode { theta, south, north };
std::string_view to_string(ConfinementMode m);

/// Half-plane condition: <z, (cos theta, sin theta)> >= 0 for theta mode,
/// y <= 0 for south, y >= 0 for north.
struct HalfPlane {
    ConfinementMode mode = ConfinementMode::south;
    double theta = 0.0;

    bool holds(const Vec2& z) const;
    /// Projection whose Birkhoff mean should have a strict sign on escaping points.
    double project(const Vec2& d) const;
    /// +1 or -1: the sign the projected drift takes when the omega-limit is empty.
    int predicted_sign() const;
};

/// Cell-centred samples of the window: nx x ny points, half a step in from
/// the edges. Centres avoid the integer lattice, where hyperbolic periodic
/// points sit exactly in floating point.
struct ConfinementGrid {
    Box window{-4.0, 4.0, -4.0, 4.0};
    double step = 1.0 / 128.0;

    int nx() const;
    int ny() const;
    std::size_t size() const { return std::size_t(nx()) * std::size_t(ny()); }
    Vec2 at(int i, int j) const { return Vec2{window.xmin + step * (i + 0.5), window.ymin + step * (j + 0.5)}; }
};

/// Grid points whose forward orbit up to horizon stays in the half plane.
struct ConfinementCloud {
    HalfPlane half_plane;
    std::int64_t horizon = 0;
    ConfinementGrid grid;
    std::vector<std::size_t> points;               ///< sample indices j*nx+i, ascending
    std::vector<std::vector<std::size_t>> components;  ///< indices into points, 4-neighbour connected
    std::vector<bool> unbounded_flags;             ///< component touches the window boundary

    Vec2 point(std::size_t k) const;
    std::size_t unbounded_points() const;
};

/// Requires horizon >= 1 and a non-empty window; theta mode needs an
/// identity-class map. Vertical modes iterate with x reduced mod 1 and y
/// unreduced, so a reflected map gives the mirrored cloud bit for bit.
ConfinementCloud compute_confinement(const LiftedTorusMap& map, const HalfPlane& half_plane,
                                     const ConfinementGrid& grid, std::int64_t horizon);

enum class OmegaVerdict { escaping, persistent };
std::string_view to_string(OmegaVerdict v);

struct OmegaProbe {
    OmegaVerdict verdict = OmegaVerdict::persistent;
    int predicted_sign = 0;
    std::size_t sampled = 0;        ///< candidate-unbounded points probed
    std::size_t survivors = 0;      ///< of those, still in the half plane after the extra iterations
    std::size_t drifting = 0;       ///< survivors with drift beyond the threshold with the predicted sign
    std::size_t window_persistent = 0;  ///< survivors that also never left the window (vertical extent for y modes)
    double drifting_fraction = 0.0;
    double threshold = 1e-3;
    std::vector<Vec2> seeds;        ///< survivor seeds
    std::vector<double> drifts;     ///< projected Birkhoff means over horizon + extra
};

/// Pushes a deterministic strided sample (at most sample_cap points) of the
/// candidate-unbounded part of the cloud extra_iterations further. Survivors
/// whose projected drift over the whole run exceeds the threshold with the
/// predicted sign count as drifting; the verdict is escaping when at least
/// 99% of survivors drift (or nothing survives).
OmegaProbe omega_probe(const ConfinementCloud& cloud, const LiftedTorusMap& map, std::int64_t extra_iterations,
                       std::size_t sample_cap = 4096, double threshold = 1e-3);

struct Disk {
    std::size_t id = 0;
    double diameter = 0.0;
    bool touches_boundary = false;
    std::vector<std::size_t> cells;  ///< raster indices j*nx+i
};

struct DiskReport {
    Box region;
    double step = 0.0;
    int nx = 0;
    int ny = 0;
    std::vector<Disk> disks;
    double max_diameter = 0.0;  ///< over disks not touching the region boundary

    Vec2 cell_center(std::size_t cell) const;
};

/// Rasterises region into cells of side grid_step, removes cells whose centre
/// is within grid_step of an obstacle point and splits the rest into
/// 4-connected components. A diameter is the largest centre distance in the
/// component plus one cell diagonal.
DiskReport complement_disk_stats(std::span<const Vec2> obstacle, const Box& region, double grid_step);

}  // namespace torusdyn
