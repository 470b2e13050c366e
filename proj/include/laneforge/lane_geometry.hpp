#pragma once

#include <span>
#include <vector>

#include "laneforge/types.hpp"

namespace laneforge {

/// Chooses the axis lane points are linked along: +x when the lane's
/// x-extent is at least its y-extent, otherwise the first principal
/// component of the xy coordinates oriented to a positive x-projection
/// (positive y when the component is exactly lateral).
/// Throws EmptyLane on empty input.
OrderingAxis ordering_axis(std::span<const Vec3> points);

/// Sorts lane points along ordering_axis(); equal keys break ties by y, then z.
std::vector<Vec3> order_lane_points(std::span<const Vec3> points);

double polyline_length(std::span<const Vec3> points);

/// Equidistant arc-length resampling. Output starts at the first point, steps
/// by `spacing` along the polyline and always ends at the last point (the
/// final step may be shorter). Zero-length links are skipped.
/// Throws DegenerateLane for fewer than two points or zero total length.
LanePolyline polyline_resample(const LanePolyline& lane, double spacing);

/// Point on the polyline at arc length `s`, clamped to [0, length].
Vec3 polyline_point_at(std::span<const Vec3> points, double s);

/// Closest point on a segment to `p`, with the segment parameter in [0, 1].
struct SegmentProjection {
  Vec3 point;
  double t = 0.0;
  double distance = 0.0;
};
SegmentProjection project_onto_segment(const Vec3& p, const Vec3& a, const Vec3& b);

/// Euclidean distance from `p` to the polyline (a single point counts as a
/// degenerate polyline).
double distance_to_polyline(const Vec3& p, std::span<const Vec3> polyline);

/// Arc-length coordinate of the closest polyline point to `p`.
double arc_length_of_closest(const Vec3& p, std::span<const Vec3> polyline);

}  // namespace laneforge
