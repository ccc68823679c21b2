#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace cei {

enum class Side { kLeft, kRight };

inline Side other_side(Side s) { return s == Side::kLeft ? Side::kRight : Side::kLeft; }
inline const char* side_name(Side s) { return s == Side::kLeft ? "left" : "right"; }

struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // rad, world frame
};

// Axis-aligned-in-body-frame rectangle, used for vehicle footprints.
struct OrientedRect {
  double cx = 0.0, cy = 0.0;   // center
  double ux = 1.0, uy = 0.0;   // unit heading axis
  double half_len = 0.0;       // along heading
  double half_wid = 0.0;       // across heading

  std::array<std::array<double, 2>, 4> corners() const;
};

// Strict-overlap separating-axis test for two oriented rectangles.
// Touching configurations (zero-width overlap on some axis) count as free.
bool rects_overlap(const OrientedRect& a, const OrientedRect& b);

// Interval of the other vehicle's arc positions that would put its body in
// contact with ours. Empty when no position along the other path collides.
struct CollisionBounds {
  double lower = 0.0;
  double upper = 0.0;
  bool empty = true;

  double width() const { return empty ? 0.0 : upper - lower; }
  bool contains(double s) const { return !empty && s >= lower && s <= upper; }
};

enum class TrackKind { kMerge, kStraight };

struct TrackGeometry {
  TrackKind kind = TrackKind::kMerge;

  // Merge track: two straight approach legs of length leg_length whose start
  // points sit start_separation apart, joining at a single merge point into a
  // shared straight exit leg of the same length. The heading changes
  // instantaneously at the merge point.
  double start_separation = 25.0;  // distance between the two start points, m
  double leg_length = 50.0;        // arc length of each leg, m

  // Straight track: both sides share one lane of this length.
  double straight_length = 400.0;

  double vehicle_length = 4.5;
  double vehicle_width = 1.8;

  double total_length() const {
    return kind == TrackKind::kMerge ? 2.0 * leg_length : straight_length;
  }
  // Arc position of the merge point (merge tracks only).
  double merge_point() const { return leg_length; }
};

class TrackError : public std::runtime_error {
 public:
  explicit TrackError(const std::string& what) : std::runtime_error(what) {}
};

// Piecewise-linear approximation of the exact collision bounds, precomputed
// over own_s once per geometry. Nodes sit on a 1 m base grid, with extra
// nodes inserted where linear interpolation would stray from the exact
// bounds and at the fold where the bounds first become non-empty.
struct BoundsTable {
  struct Node {
    double s = 0.0;
    bool empty = true;
    double lower = 0.0;
    double upper = 0.0;
  };
  std::vector<Node> nodes;
  double analytic_from = 0.0;  // own_s beyond which aligned-rectangle bounds are exact
};

// Query result of the linearized bounds carrying interpolation slopes, used
// by gradient-based consumers.
struct LinearizedBounds {
  bool empty = true;
  double lower = 0.0;
  double upper = 0.0;
  double dlower = 0.0;  // d lower / d own_s within the current cell
  double dupper = 0.0;
};

class Track {
 public:
  struct Options {
    bool parallel_table_build = true;
    double base_spacing = 1.0;       // table node spacing, m
    double refine_error = 0.04;      // subdivision threshold vs exact bounds, m
    double min_spacing = 1.0 / 32.0; // subdivision floor, m
  };

  explicit Track(const TrackGeometry& geometry);
  Track(const TrackGeometry& geometry, const Options& options);

  const TrackGeometry& geometry() const { return geometry_; }

  // Pose of the body center at arc position s. s may run past the end of the
  // track: the exit lane continues straight so that vehicles which have
  // finished remain physical obstacles for the one still driving.
  Pose2D arc_to_pose(Side side, double s) const;

  OrientedRect body_at(Side side, double s) const;

  // Executed-state contact test between the two vehicles.
  bool bodies_overlap(double left_s, double right_s) const;

  // Exact bounds: swept separating-axis test over the other vehicle's arc
  // coordinate, restricted to the analytically reachable windows, boundaries
  // refined by bisection.
  CollisionBounds collision_bounds(double own_s, Side own_side) const;

  // Piecewise-linear bounds from the precomputed table. Continuous across
  // the merge point (where the exact bounds jump with the heading change)
  // and identical to the exact bounds on the shared lane past the table end.
  CollisionBounds collision_bounds_linearized(double own_s, Side own_side) const;
  LinearizedBounds linearized_with_slopes(double own_s, Side own_side) const;

  const BoundsTable& table() const { return table_; }

  // own_s at which the exact bounds first become non-empty (merge tracks).
  double collision_onset() const { return onset_s_; }
  // own_s beyond which bounds are exactly [s - L, s + L].
  double aligned_exact_from() const { return aligned_from_; }

 private:
  CollisionBounds swept_bounds(double own_s, Side own_side) const;
  CollisionBounds exact_unchecked(double own_s, Side own_side) const;
  void build_table(bool parallel, double base_spacing, double refine_error,
                   double min_spacing);

  TrackGeometry geometry_;
  // Merge-track frame: merge point at the origin, exit lane along +x.
  double half_offset_ = 0.0;   // start_separation / 2
  double leg_dx_ = 0.0;        // x extent of an approach leg
  std::array<double, 2> dir_left_{1.0, 0.0};
  std::array<double, 2> dir_right_{1.0, 0.0};
  double heading_left_ = 0.0;
  double heading_right_ = 0.0;
  double reach_radius_ = 0.0;  // max center distance admitting contact
  double corner_reach_ = 0.0;  // max x-reach of an approach-leg corner past its center
  double aligned_from_ = 0.0;
  double onset_s_ = 0.0;
  BoundsTable table_;
};

}  // namespace cei
