#include "cei/track.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cei {

namespace {

constexpr double kSweepStep = 0.01;   // other_s sampling step, m
constexpr double kRefineTol = 1e-5;   // bisection tolerance on interval edges, m

struct Range {
  double lo, hi;
};

}  // namespace

std::array<std::array<double, 2>, 4> OrientedRect::corners() const {
  const double nx = -uy, ny = ux;
  const double lx = ux * half_len, ly = uy * half_len;
  const double wx = nx * half_wid, wy = ny * half_wid;
  return {{{cx + lx + wx, cy + ly + wy},
           {cx + lx - wx, cy + ly - wy},
           {cx - lx - wx, cy - ly - wy},
           {cx - lx + wx, cy - ly + wy}}};
}

namespace {

// Projection separation of b against a's two body axes.
bool separated_on_axes_of(const OrientedRect& a, const OrientedRect& b) {
  const double dx = b.cx - a.cx, dy = b.cy - a.cy;
  const double anx = -a.uy, any = a.ux;
  const double bnx = -b.uy, bny = b.ux;
  // a's heading axis
  {
    const double dist = std::abs(dx * a.ux + dy * a.uy);
    const double ext = a.half_len + b.half_len * std::abs(b.ux * a.ux + b.uy * a.uy) +
                       b.half_wid * std::abs(bnx * a.ux + bny * a.uy);
    if (dist >= ext) return true;
  }
  // a's lateral axis
  {
    const double dist = std::abs(dx * anx + dy * any);
    const double ext = a.half_wid + b.half_len * std::abs(b.ux * anx + b.uy * any) +
                       b.half_wid * std::abs(bnx * anx + bny * any);
    if (dist >= ext) return true;
  }
  return false;
}

}  // namespace

bool rects_overlap(const OrientedRect& a, const OrientedRect& b) {
  return !separated_on_axes_of(a, b) && !separated_on_axes_of(b, a);
}

Track::Track(const TrackGeometry& geometry) : Track(geometry, Options{}) {}

Track::Track(const TrackGeometry& geometry, const Options& options) : geometry_(geometry) {
  if (geometry_.vehicle_length <= 0.0 || geometry_.vehicle_width <= 0.0) {
    throw TrackError("vehicle dimensions must be positive");
  }
  const double hl = geometry_.vehicle_length / 2.0;
  const double hw = geometry_.vehicle_width / 2.0;
  reach_radius_ = 2.0 * std::hypot(hl, hw);

  if (geometry_.kind == TrackKind::kStraight) {
    if (geometry_.straight_length <= 0.0) {
      throw TrackError("straight_length must be positive");
    }
    // One shared lane: aligned-rectangle bounds hold everywhere.
    aligned_from_ = 0.0;
    onset_s_ = 0.0;
    table_.analytic_from = 0.0;
    return;
  }

  if (geometry_.start_separation <= 0.0) {
    throw TrackError("start_separation must be positive");
  }
  if (geometry_.leg_length <= geometry_.start_separation / 2.0) {
    throw TrackError("leg_length must exceed half the start separation");
  }

  half_offset_ = geometry_.start_separation / 2.0;
  leg_dx_ = std::sqrt(geometry_.leg_length * geometry_.leg_length -
                      half_offset_ * half_offset_);
  const double inv_leg = 1.0 / geometry_.leg_length;
  dir_left_ = {leg_dx_ * inv_leg, -half_offset_ * inv_leg};
  dir_right_ = {leg_dx_ * inv_leg, half_offset_ * inv_leg};
  heading_left_ = std::atan2(dir_left_[1], dir_left_[0]);
  heading_right_ = std::atan2(dir_right_[1], dir_right_[0]);

  // Furthest an approach-leg body corner can reach along +x past its center.
  corner_reach_ = hl * std::abs(dir_left_[0]) + hw * std::abs(dir_left_[1]);
  // Past this own_s no approach-leg position can touch us: our tail edge lies
  // beyond every corner of a body that has not crossed the merge point.
  aligned_from_ = geometry_.merge_point() + corner_reach_ + hl;

  // Locate where the bounds first become non-empty, so queries on the early
  // approach skip the sweep entirely.
  double lo = 0.0, hi = -1.0;
  for (double s = 0.0; s <= aligned_from_; s += 0.25) {
    if (swept_bounds(s, Side::kLeft).empty) {
      lo = s;
    } else {
      hi = s;
      break;
    }
  }
  if (hi < 0.0) {
    // No collision anywhere before the aligned region (cannot happen for
    // sane merge geometries, but keep the invariants consistent).
    onset_s_ = aligned_from_;
  } else {
    while (hi - lo > 1e-5) {
      const double mid = 0.5 * (lo + hi);
      if (swept_bounds(mid, Side::kLeft).empty) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    onset_s_ = 0.5 * (lo + hi);
  }

  build_table(options.parallel_table_build, options.base_spacing,
              options.refine_error, options.min_spacing);
}

Pose2D Track::arc_to_pose(Side side, double s) const {
  if (s < 0.0) throw TrackError("arc position must be non-negative");
  if (geometry_.kind == TrackKind::kStraight) {
    return {s, 0.0, 0.0};
  }
  const double merge_s = geometry_.merge_point();
  if (s >= merge_s) {
    return {s - merge_s, 0.0, 0.0};
  }
  if (side == Side::kLeft) {
    return {-leg_dx_ + s * dir_left_[0], half_offset_ + s * dir_left_[1], heading_left_};
  }
  return {-leg_dx_ + s * dir_right_[0], -half_offset_ + s * dir_right_[1], heading_right_};
}

OrientedRect Track::body_at(Side side, double s) const {
  OrientedRect r;
  r.half_len = geometry_.vehicle_length / 2.0;
  r.half_wid = geometry_.vehicle_width / 2.0;
  if (geometry_.kind == TrackKind::kStraight || s >= geometry_.merge_point()) {
    const double x = geometry_.kind == TrackKind::kStraight ? s : s - geometry_.merge_point();
    r.cx = x;
    r.cy = 0.0;
    r.ux = 1.0;
    r.uy = 0.0;
    return r;
  }
  const auto& dir = side == Side::kLeft ? dir_left_ : dir_right_;
  const double y0 = side == Side::kLeft ? half_offset_ : -half_offset_;
  r.cx = -leg_dx_ + s * dir[0];
  r.cy = y0 + s * dir[1];
  r.ux = dir[0];
  r.uy = dir[1];
  return r;
}

bool Track::bodies_overlap(double left_s, double right_s) const {
  return rects_overlap(body_at(Side::kLeft, left_s), body_at(Side::kRight, right_s));
}

CollisionBounds Track::swept_bounds(double own_s, Side own_side) const {
  const OrientedRect own = body_at(own_side, own_s);
  const Side other = other_side(own_side);
  const double w = reach_radius_ + 1.0;

  // Contact requires the centers within reach_radius_; both legs are straight
  // lines through the merge point, so candidate arc positions of the other
  // vehicle live in (at most) two windows.
  std::vector<Range> ranges;
  ranges.push_back({own_s - w, own_s + w});
  if (geometry_.kind == TrackKind::kMerge) {
    const double mirrored = 2.0 * geometry_.merge_point() - own_s;
    Range r2{mirrored - w, mirrored + w};
    if (r2.lo <= ranges[0].hi && ranges[0].lo <= r2.hi) {
      ranges[0].lo = std::min(ranges[0].lo, r2.lo);
      ranges[0].hi = std::max(ranges[0].hi, r2.hi);
    } else if (r2.hi > 0.0) {
      if (r2.lo < ranges[0].lo) {
        ranges.insert(ranges.begin(), r2);
      } else {
        ranges.push_back(r2);
      }
    }
  }

  const auto collides = [&](double s) {
    return rects_overlap(own, body_at(other, s));
  };

  // Bisect between a free position and a hit position until the edge is
  // located to kRefineTol; returns the refined edge on the hit side.
  const auto refine_edge = [&](double free_s, double hit_s) {
    double lo = free_s, hi = hit_s;
    while (std::abs(hi - lo) > kRefineTol) {
      const double mid = 0.5 * (lo + hi);
      if (collides(mid)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    return hi;
  };

  // The contact set can briefly split in two near the heading fold (a corner
  // of the turning body grazes while the aligned gap is still open), and the
  // bounds contract asks for the maximal interval of overlapping positions.
  // Collect contiguous hit runs with refined edges. Free gaps no wider than
  // the sweep step are below the scan resolution and are bridged; measuring
  // each candidate gap by bisection keeps the decision independent of how the
  // sample grid happens to fall against a near-grazing contact.
  struct HitRun {
    double lower = 0.0, upper = 0.0;
  };
  std::vector<HitRun> runs;

  for (const auto& range : ranges) {
    const double lo = std::max(0.0, range.lo);
    if (range.hi < lo) continue;
    const int n = static_cast<int>(std::ceil((range.hi - lo) / kSweepStep));
    bool in_run = false;
    bool have_prev_free = false;
    double prev_free = 0.0;
    std::size_t range_first = runs.size();
    for (int i = 0; i <= n; ++i) {
      const double s = std::min(lo + i * kSweepStep, range.hi);
      if (collides(s)) {
        if (!in_run) {
          in_run = true;
          runs.push_back({s, s});
          if (have_prev_free) runs.back().lower = refine_edge(prev_free, s);
        }
        runs.back().upper = s;
      } else {
        if (in_run) {
          in_run = false;
          runs.back().upper = refine_edge(s, runs.back().upper);
        }
        have_prev_free = true;
        prev_free = s;
      }
    }
    // Fuse neighbouring runs whose true separation is within one step.
    std::size_t w = range_first;
    for (std::size_t r = range_first + 1; r < runs.size(); ++r) {
      if (runs[r].lower - runs[w].upper <= kSweepStep) {
        runs[w].upper = runs[r].upper;
      } else {
        runs[++w] = runs[r];
      }
    }
    if (runs.size() > range_first) runs.resize(w + 1);
  }

  CollisionBounds out;
  if (runs.empty()) return out;

  const HitRun* best = &runs.front();
  for (const HitRun& run : runs) {
    if (run.upper - run.lower > best->upper - best->lower) best = &run;
  }
  out.empty = false;
  out.lower = best->lower;
  out.upper = best->upper;
  return out;
}

CollisionBounds Track::exact_unchecked(double own_s, Side own_side) const {
  const double hl = geometry_.vehicle_length / 2.0;
  if (geometry_.kind == TrackKind::kStraight || own_s >= aligned_from_) {
    return {own_s - 2.0 * hl, own_s + 2.0 * hl, false};
  }
  return swept_bounds(own_s, own_side);
}

CollisionBounds Track::collision_bounds(double own_s, Side own_side) const {
  if (own_s < 0.0) throw TrackError("arc position must be non-negative");
  if (geometry_.kind == TrackKind::kMerge && own_s < onset_s_ - 1e-3) {
    return {};
  }
  return exact_unchecked(own_s, own_side);
}

void Track::build_table(bool parallel, double base_spacing, double refine_error,
                        double min_spacing) {
  table_.analytic_from = std::ceil(aligned_from_ + 1.0);
  const int n_base = static_cast<int>(std::round(table_.analytic_from / base_spacing)) + 1;

  std::vector<BoundsTable::Node> base(n_base);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (int i = 0; i < n_base; ++i) {
    const double s = i * base_spacing;
    const CollisionBounds b = exact_unchecked(s, Side::kLeft);
    base[i] = {s, b.empty, b.lower, b.upper};
  }
  (void)parallel;

  // Subdivide cells where linear interpolation strays from the exact bounds,
  // and pin the fold where the bounds first appear with a node of zero width.
  std::vector<BoundsTable::Node> nodes;
  nodes.reserve(base.size() * 2);

  const auto node_at = [&](double s) {
    const CollisionBounds b = exact_unchecked(s, Side::kLeft);
    return BoundsTable::Node{s, b.empty, b.lower, b.upper};
  };

  const std::function<void(const BoundsTable::Node&, const BoundsTable::Node&)> refine =
      [&](const BoundsTable::Node& a, const BoundsTable::Node& b) {
        const double span = b.s - a.s;
        if (a.empty != b.empty) {
          if (span <= min_spacing) {
            // The bounds appear discontinuously: one step past the transition
            // the full contact interval already exists (a body ahead on the
            // other leg overlaps as soon as any position does). A single
            // interpolated node would fake a gradual ramp, so bisect the
            // transition and pin it with a node on each side. The non-empty
            // side is pulled half a millimetre into the empty side: a plan
            // optimized against this table then only reports zero risk where
            // the exact bounds are provably empty too, instead of flapping
            // against the exact evaluation across the representation seam.
            double lo = a.s, hi = b.s;
            const bool lo_empty = a.empty;
            while (hi - lo > 1e-6) {
              const double mid = 0.5 * (lo + hi);
              const bool mid_empty = exact_unchecked(mid, Side::kLeft).empty;
              if (mid_empty == lo_empty) {
                lo = mid;
              } else {
                hi = mid;
              }
            }
            constexpr double kSeamMargin = 5e-4;
            const double s_fold = 0.5 * (lo + hi);
            const double s_full_src = lo_empty ? hi : lo;  // just on the full side
            const double sign = lo_empty ? 1.0 : -1.0;
            const double s_full = s_fold - sign * kSeamMargin;
            const double s_empty = s_full - sign * 1e-6;
            const CollisionBounds fb = exact_unchecked(s_full_src, Side::kLeft);
            if (s_empty > a.s + 1e-6 && s_empty < b.s - 1e-6) {
              nodes.push_back({s_empty, true, 0.0, 0.0});
            }
            if (s_full > a.s + 1e-6 && s_full < b.s - 1e-6) {
              nodes.push_back({s_full, fb.empty, fb.lower, fb.upper});
            }
            return;
          }
          const BoundsTable::Node m = node_at(a.s + span / 2.0);
          refine(a, m);
          nodes.push_back(m);
          refine(m, b);
          return;
        }
        if (span <= min_spacing) return;
        const BoundsTable::Node m = node_at(a.s + span / 2.0);
        if (a.empty && b.empty) {
          if (m.empty) return;  // no structure inside
        } else if (!m.empty) {
          const double t = (m.s - a.s) / span;
          const double lerp_lo = a.lower + t * (b.lower - a.lower);
          const double lerp_up = a.upper + t * (b.upper - a.upper);
          if (std::abs(lerp_lo - m.lower) <= refine_error &&
              std::abs(lerp_up - m.upper) <= refine_error) {
            return;
          }
        }
        refine(a, m);
        nodes.push_back(m);
        refine(m, b);
      };

  for (size_t i = 0; i + 1 < base.size(); ++i) {
    nodes.push_back(base[i]);
    refine(base[i], base[i + 1]);
  }
  nodes.push_back(base.back());

  // The bounds kink or jump where the track itself changes shape: at the
  // merge point (the body heading folds there, so the reachable corner
  // retracts discontinuously), one vehicle length either side of it, and at
  // the edges of the aligned-rectangle regime. Pin each such location with a
  // node just below and a node at the location so that no cell interpolates
  // across a jump.
  const double mp = geometry_.merge_point();
  const double vl = geometry_.vehicle_length;
  const auto push_node = [&](double sn) {
    if (sn > onset_s_ + 1e-3 && sn < table_.analytic_from) {
      const CollisionBounds b = exact_unchecked(sn, Side::kLeft);
      nodes.push_back({sn, b.empty, b.lower, b.upper});
    }
  };
  for (const double s : {mp, mp - vl, mp + vl, mp - corner_reach_ - vl / 2.0,
                         mp + corner_reach_ + vl / 2.0, aligned_from_,
                         2.0 * mp - aligned_from_}) {
    push_node(s - 1e-6);
    push_node(s);
  }
  // Where the free gap behind the merge point first exceeds the bridged sweep
  // step, the graze contact detaches and the interval edge jumps; the edge
  // bisection blurs that switch by its own tolerance, so straddle it wider.
  for (const double s : {mp + vl + kSweepStep, mp - vl - kSweepStep}) {
    push_node(s - 3e-5);
    push_node(s + 3e-5);
  }

  // Between one vehicle length past the merge point and the aligned regime
  // (and the mirror stretch on the approach side) a grazing corner contact
  // detaches from the main contact run, so the interval edge moves with high
  // curvature. Sample those two short stretches densely.
  const double fold_half = aligned_from_ - (mp + vl);
  for (const double base_s : {mp + vl, mp - vl - fold_half}) {
    for (double off = 0.0; off <= fold_half + 1e-9; off += 0.01) {
      const double sn = base_s + off;
      if (sn > onset_s_ + 1e-3 && sn < table_.analytic_from) {
        const CollisionBounds b = exact_unchecked(sn, Side::kLeft);
        nodes.push_back({sn, b.empty, b.lower, b.upper});
      }
    }
  }

  std::sort(nodes.begin(), nodes.end(),
            [](const auto& a, const auto& b) { return a.s < b.s; });
  nodes.erase(std::unique(nodes.begin(), nodes.end(),
                          [](const auto& a, const auto& b) {
                            return std::abs(a.s - b.s) < 1e-9;
                          }),
              nodes.end());
  table_.nodes = std::move(nodes);
}

LinearizedBounds Track::linearized_with_slopes(double own_s, Side) const {
  LinearizedBounds out;
  const double hl = geometry_.vehicle_length / 2.0;
  if (geometry_.kind == TrackKind::kStraight) {
    return {false, own_s - 2.0 * hl, own_s + 2.0 * hl, 1.0, 1.0};
  }
  const auto& nodes = table_.nodes;
  if (nodes.empty() || own_s >= nodes.back().s) {
    return {false, own_s - 2.0 * hl, own_s + 2.0 * hl, 1.0, 1.0};
  }
  if (own_s <= nodes.front().s) {
    const auto& n = nodes.front();
    if (n.empty) return out;
    return {false, n.lower, n.upper, 0.0, 0.0};
  }
  const auto it = std::upper_bound(
      nodes.begin(), nodes.end(), own_s,
      [](double v, const BoundsTable::Node& n) { return v < n.s; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  if (a.empty || b.empty) return out;
  const double span = b.s - a.s;
  const double t = (own_s - a.s) / span;
  out.empty = false;
  out.dlower = (b.lower - a.lower) / span;
  out.dupper = (b.upper - a.upper) / span;
  out.lower = a.lower + t * (b.lower - a.lower);
  out.upper = a.upper + t * (b.upper - a.upper);
  return out;
}

CollisionBounds Track::collision_bounds_linearized(double own_s, Side side) const {
  const LinearizedBounds lb = linearized_with_slopes(own_s, side);
  if (lb.empty) return {};
  return {lb.lower, lb.upper, false};
}

}  // namespace cei
