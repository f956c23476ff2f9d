#include "torusdyn/crossing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "torusdyn/parallel.hpp"

namespace torusdyn {

namespace {

/// Uniform bucket grid over segments or points.
class BucketGrid {
public:
    explicit BucketGrid(double cell) : cell_(cell) {}

    double cell() const { return cell_; }
    std::int64_t index(double v) const { return std::int64_t(std::floor(v / cell_)); }
    static std::uint64_t key(std::int64_t ix, std::int64_t iy) {
        return (std::uint64_t(ix) << 32) ^ (std::uint64_t(iy) & 0xffffffffULL);
    }

    void insert_box(const Vec2& lo, const Vec2& hi, std::uint32_t id) {
        for (std::int64_t ix = index(lo.x); ix <= index(hi.x); ++ix)
            for (std::int64_t iy = index(lo.y); iy <= index(hi.y); ++iy) cells_[key(ix, iy)].push_back(id);
    }
    const std::vector<std::uint32_t>* at(std::int64_t ix, std::int64_t iy) const {
        const auto it = cells_.find(key(ix, iy));
        return it == cells_.end() ? nullptr : &it->second;
    }
    bool empty() const { return cells_.empty(); }

private:
    double cell_;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells_;
};

Vec2 lo_corner(const Vec2& a, const Vec2& b) { return Vec2{std::min(a.x, b.x), std::min(a.y, b.y)}; }
Vec2 hi_corner(const Vec2& a, const Vec2& b) { return Vec2{std::max(a.x, b.x), std::max(a.y, b.y)}; }

double bucket_size(std::span<const Vec2> poly) {
    double total = 0.0;
    double longest = 0.0;
    for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
        const double l = distance(poly[i], poly[i + 1]);
        total += l;
        longest = std::max(longest, l);
    }
    const double mean = poly.size() > 1 ? total / double(poly.size() - 1) : 1.0;
    return std::max({mean, longest / 16.0, 1e-9});
}

/// Rectangle in the frame of the lambda segment through the crossing.
struct LocalFrame {
    Vec2 origin;
    Vec2 along;
    Vec2 across;
    double half_length;
    double half_width;

    double a(const Vec2& p) const { return dot(p - origin, along); }
    double b(const Vec2& p) const { return dot(p - origin, across); }
    bool inside(const Vec2& p) const {
        return std::abs(a(p)) <= half_length && std::abs(b(p)) <= half_width;
    }
    /// Parameter in (0, 1] at which the segment from an inside point p to q first leaves R.
    double exit_param(const Vec2& p, const Vec2& q) const {
        const double a0 = a(p), a1 = a(q), b0 = b(p), b1 = b(q);
        double c = 1.0;
        if (a1 > half_length) c = std::min(c, (half_length - a0) / (a1 - a0));
        if (a1 < -half_length) c = std::min(c, (-half_length - a0) / (a1 - a0));
        if (b1 > half_width) c = std::min(c, (half_width - b0) / (b1 - b0));
        if (b1 < -half_width) c = std::min(c, (-half_width - b0) / (b1 - b0));
        return std::clamp(c, 0.0, 1.0);
    }
};

struct LocalPiece {
    std::size_t first = 0;  ///< first segment index
    std::size_t last = 0;   ///< last segment index (inclusive)
};

/// Walks lambda from the crossing in one direction until it leaves R. Fails if
/// lambda ends inside R or leaves through anything but the short side ahead.
bool walk_lambda(std::span<const Vec2> piece, std::size_t seg, const Vec2& x, const LocalFrame& frame, int dir,
                 std::size_t& end_segment) {
    Vec2 cur = x;
    std::size_t s = seg;
    for (;;) {
        const std::size_t vtx = dir > 0 ? s + 1 : s;
        const Vec2 nxt = piece[vtx];
        if (!frame.inside(nxt)) {
            const Vec2 exit = cur + (nxt - cur) * frame.exit_param(cur, nxt);
            end_segment = s;
            const double ea = frame.a(exit);
            const double eb = frame.b(exit);
            const double tol = 1e-9 * frame.half_length;
            return std::abs(eb) < frame.half_width - tol && ea * double(dir) >= frame.half_length - tol;
        }
        if (dir > 0) {
            if (s + 2 >= piece.size()) return false;
            ++s;
        } else {
            if (s == 0) return false;
            --s;
        }
        cur = nxt;
    }
}

int side_of(std::span<const Vec2> piece, const LocalPiece& local, const Vec2& p) {
    double best = std::numeric_limits<double>::infinity();
    double sign = 0.0;
    for (std::size_t s = local.first; s <= local.last; ++s) {
        const double d = point_segment_distance(p, piece[s], piece[s + 1]);
        if (d < best) {
            best = d;
            sign = cross(piece[s + 1] - piece[s], p - piece[s]);
        }
    }
    if (best == 0.0 || sign == 0.0) return 0;
    return sign > 0.0 ? 1 : -1;
}

bool meets_local(std::span<const Vec2> piece, const LocalPiece& local, const Vec2& p, const Vec2& q,
                 bool skip_start) {
    SegmentHit hit;
    for (std::size_t s = local.first; s <= local.last; ++s) {
        if (!segment_intersection(p, q, piece[s], piece[s + 1], hit)) continue;
        if (skip_start && hit.s <= 1e-9) continue;
        return true;
    }
    return false;
}

/// Follows K from the crossing; returns the side of lambda on which K leaves R
/// (0 when K ends in R or returns to lambda first) and the exit point.
int walk_target(std::span<const Vec2> piece, const LocalPiece& local, std::span<const Vec2> target,
                std::size_t seg, double t, const Vec2& x, const LocalFrame& frame, int dir, Vec2& exit) {
    std::int64_t idx;
    if (dir > 0) {
        idx = std::int64_t(seg) + 1;
        if (t >= 1.0) idx += 1;
    } else {
        idx = t <= 0.0 ? std::int64_t(seg) - 1 : std::int64_t(seg);
    }
    Vec2 cur = x;
    bool first = true;
    while (idx >= 0 && idx < std::int64_t(target.size())) {
        const Vec2 nxt = target[std::size_t(idx)];
        const bool leaving = !frame.inside(nxt);
        const Vec2 end = leaving ? cur + (nxt - cur) * frame.exit_param(cur, nxt) : nxt;
        if (meets_local(piece, local, cur, end, first)) return 0;
        if (leaving) {
            exit = end;
            return side_of(piece, local, end);
        }
        cur = nxt;
        idx += dir;
        first = false;
    }
    return 0;
}

bool validate(std::span<const Vec2> piece, std::span<const Vec2> target, std::size_t i, std::size_t j, double t,
              const Vec2& x, const CrossingParams& params, CrossingWitness& w) {
    const Vec2 seg = piece[i + 1] - piece[i];
    const double len = norm(seg);
    if (len == 0.0) return false;
    LocalFrame frame;
    frame.origin = x;
    frame.along = seg / len;
    frame.across = Vec2{-frame.along.y, frame.along.x};
    frame.half_length = 0.5 * params.length;
    frame.half_width = 0.5 * params.width;

    LocalPiece local;
    if (!walk_lambda(piece, i, x, frame, +1, local.last)) return false;
    if (!walk_lambda(piece, i, x, frame, -1, local.first)) return false;

    Vec2 exit_fwd, exit_bwd;
    const int fwd = walk_target(piece, local, target, j, t, x, frame, +1, exit_fwd);
    if (fwd == 0) return false;
    const int bwd = walk_target(piece, local, target, j, t, x, frame, -1, exit_bwd);
    if (bwd == 0 || bwd == fwd) return false;

    w.location = x;
    w.piece_segment = i;
    w.target_segment = j;
    const Vec2 l = frame.along * frame.half_length;
    const Vec2 c = frame.across * frame.half_width;
    w.rectangle = {x - l - c, x + l - c, x + l + c, x - l + c};
    w.exit_left = fwd > 0 ? exit_fwd : exit_bwd;
    w.exit_right = fwd > 0 ? exit_bwd : exit_fwd;
    return true;
}

}  // namespace

std::vector<CrossingWitness> detect_crossings(std::span<const Vec2> piece, std::span<const Vec2> target,
                                              const IVec2& translate, const CrossingParams& params) {
    std::vector<CrossingWitness> out;
    if (piece.size() < 2 || target.size() < 2) return out;
    if (!(params.length > 0.0) || !(params.width > 0.0))
        throw std::invalid_argument("crossing rectangle dimensions must be positive");

    std::vector<Vec2> moved(target.begin(), target.end());
    const Vec2 shift = to_vec(translate);
    for (auto& p : moved) p += shift;

    BucketGrid grid(bucket_size(moved));
    for (std::size_t j = 0; j + 1 < moved.size(); ++j)
        grid.insert_box(lo_corner(moved[j], moved[j + 1]), hi_corner(moved[j], moved[j + 1]), std::uint32_t(j));

    const std::size_t last_piece = piece.size() - 2;
    const std::size_t last_target = moved.size() - 2;
    std::vector<std::size_t> stamp(moved.size(), std::numeric_limits<std::size_t>::max());
    std::vector<std::pair<std::size_t, SegmentHit>> hits;
    for (std::size_t i = 0; i + 1 < piece.size(); ++i) {
        const Vec2 lo = lo_corner(piece[i], piece[i + 1]);
        const Vec2 hi = hi_corner(piece[i], piece[i + 1]);
        hits.clear();
        for (std::int64_t ix = grid.index(lo.x); ix <= grid.index(hi.x); ++ix) {
            for (std::int64_t iy = grid.index(lo.y); iy <= grid.index(hi.y); ++iy) {
                const auto* bucket = grid.at(ix, iy);
                if (!bucket) continue;
                for (std::uint32_t j : *bucket) {
                    if (stamp[j] == i) continue;
                    stamp[j] = i;
                    SegmentHit hit;
                    if (!segment_intersection(piece[i], piece[i + 1], moved[j], moved[j + 1], hit)) continue;
                    if (hit.s >= 1.0 && i != last_piece) continue;
                    if (hit.t >= 1.0 && j != last_target) continue;
                    hits.emplace_back(j, hit);
                }
            }
        }
        // deterministic order along lambda, then along K
        std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
            return a.second.s != b.second.s ? a.second.s < b.second.s : a.first < b.first;
        });
        for (const auto& [j, hit] : hits) {
            CrossingWitness w;
            if (validate(piece, moved, i, j, hit.t, hit.point, params, w)) {
                w.translate = translate;
                out.push_back(w);
            }
        }
    }
    return out;
}

const ScanCell* TranslateScan::find(const IVec2& v) const {
    for (const auto& c : cells)
        if (c.translate == v) return &c;
    return nullptr;
}

TranslateScan translate_scan(std::span<const ManifoldCurve> unstable, std::span<const ManifoldCurve> stable,
                             const IVec2& lo, const IVec2& hi, const CrossingParams& params) {
    TranslateScan scan;
    for (std::int64_t b = lo.b; b <= hi.b; ++b)
        for (std::int64_t a = lo.a; a <= hi.a; ++a) scan.cells.push_back(ScanCell{IVec2{a, b}, false, 0, std::nullopt});
    parallel_for(scan.cells.size(), [&](std::size_t c) {
        ScanCell& cell = scan.cells[c];
        for (const auto& u : unstable) {
            for (const auto& s : stable) {
                const auto found = detect_crossings(u.vertices, s.vertices, cell.translate, params);
                if (!found.empty() && !cell.first) cell.first = found.front();
                cell.witnesses += found.size();
            }
        }
        cell.found = cell.witnesses > 0;
    });
    return scan;
}

TranslateScan translate_scan(const LiftedTorusMap& map, const PeriodicPoint& pp, const IVec2& lo,
                             const IVec2& hi, const GrowthOptions& growth) {
    std::vector<ManifoldCurve> unstable, stable;
    for (Branch br : {Branch::plus, Branch::minus}) {
        unstable.push_back(grow_manifold(map, pp, ManifoldKind::unstable, br, growth));
        stable.push_back(grow_manifold(map, pp, ManifoldKind::stable, br, growth));
    }
    return translate_scan(unstable, stable, lo, hi, CrossingParams::from_h_max(growth.h_max));
}

double closure_invariance_score(std::span<const Vec2> curve, const IVec2& v, const Box& region, double eps) {
    if (curve.empty()) throw std::invalid_argument("closure_invariance_score needs a nonempty curve");
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    BucketGrid grid(eps);
    for (std::size_t i = 0; i < curve.size(); ++i) grid.insert_box(curve[i], curve[i], std::uint32_t(i));

    const Vec2 shift = to_vec(v);
    double score = 0.0;
    constexpr std::int64_t kMaxRing = 64;
    for (const auto& c : curve) {
        const Vec2 p = c + shift;
        if (!region.contains(p)) continue;
        const std::int64_t cx = grid.index(p.x), cy = grid.index(p.y);
        double best = std::numeric_limits<double>::infinity();
        for (std::int64_t r = 0; r <= kMaxRing; ++r) {
            for (std::int64_t ix = cx - r; ix <= cx + r; ++ix) {
                for (std::int64_t iy = cy - r; iy <= cy + r; ++iy) {
                    if (std::max(std::abs(ix - cx), std::abs(iy - cy)) != r) continue;
                    if (const auto* bucket = grid.at(ix, iy))
                        for (std::uint32_t k : *bucket) best = std::min(best, distance(p, curve[k]));
                }
            }
            if (best <= double(r) * eps) break;
        }
        if (!std::isfinite(best) || best > double(kMaxRing) * eps) {
            for (const auto& q : curve) best = std::min(best, distance(p, q));
        }
        score = std::max(score, best);
    }
    return score;
}

MixingReport mixing_probe(const LiftedTorusMap& map, const Ball& u, const Ball& v, std::int64_t n_max,
                          int samples_per_axis) {
    if (!(u.radius > 0.0) || !(v.radius > 0.0)) throw std::invalid_argument("ball radii must be positive");
    if (n_max < 1 || samples_per_axis < 1) throw std::invalid_argument("mixing_probe needs n_max >= 1");
    std::vector<Vec2> pts;
    for (int j = 0; j < samples_per_axis; ++j) {
        for (int i = 0; i < samples_per_axis; ++i) {
            const Vec2 off{(2.0 * i + 1.0) / samples_per_axis - 1.0, (2.0 * j + 1.0) / samples_per_axis - 1.0};
            if (norm(off) < 1.0) pts.push_back(u.center + off * u.radius);
        }
    }
    MixingReport rep;
    rep.samples = pts.size();
    rep.hits.assign(std::size_t(n_max), false);
    std::vector<bool> alive(pts.size(), true);
    for (std::int64_t n = 1; n <= n_max; ++n) {
        bool hit = false;
        for (std::size_t s = 0; s < pts.size(); ++s) {
            if (!alive[s]) continue;
            pts[s] = map.forward(pts[s]);
            if (!is_finite(pts[s]) || std::abs(pts[s].x) > 1e9 || std::abs(pts[s].y) > 1e9) {
                alive[s] = false;
                continue;
            }
            if (distance(pts[s], v.center) < v.radius) hit = true;
        }
        rep.hits[std::size_t(n - 1)] = hit;
    }
    if (rep.hits.back()) {
        std::int64_t first = n_max;
        while (first > 1 && rep.hits[std::size_t(first - 2)]) --first;
        rep.tail = first;
    }
    return rep;
}

}  // namespace torusdyn
