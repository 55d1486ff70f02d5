#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gl3d/errors.hpp"
#include "gl3d/geometry.hpp"

namespace gl3d {

// Convex body used by the boundary-relative connection mode: only the
// distance from an interior point to the boundary is needed.
struct ConvexBody {
  std::function<double(const Vec3&)> distance_to_boundary;

  static ConvexBody ball(const Vec3& center, double radius);
  static ConvexBody axis_box(const Vec3& lo, const Vec3& hi);
  // Convex polytope given by inward-facing half spaces n.x <= c (distance
  // from an interior point: min plane distance).
  static ConvexBody half_spaces(std::vector<std::pair<Vec3, double>> planes);
};

struct SignedPoints {
  std::vector<Vec3> positives;
  std::vector<Vec3> negatives;
  std::optional<ConvexBody> body;  // required for boundary-relative mode
};

enum class ConnectionMode { balanced, boundary_relative };

struct MatchingResult {
  // pairs[i] = (positive index, negative index); boundary assignments are
  // recorded with the other index = -1.
  std::vector<std::pair<int, int>> pairs;
  double total_length = 0.0;
  enum class Certificate { exact, heuristic } certificate = Certificate::exact;

  double recompute_length(const SignedPoints& pts) const;
};

// Exact minimal connection via the Hungarian method on the (padded, in
// boundary-relative mode) distance matrix.
MatchingResult minimal_connection(const SignedPoints& pts,
                                  ConnectionMode mode = ConnectionMode::balanced);

// Exhaustive oracle over all pairings, n <= 8 per sign (balanced mode only).
MatchingResult brute_force_connection(const SignedPoints& pts);

// Square assignment problem: returns row -> column assignment minimizing
// total cost. O(n^3) shortest augmenting path formulation.
double solve_assignment(const std::vector<std::vector<double>>& cost,
                        std::vector<int>& row_to_col);

// Both sides of the segment separation inequality
//   dist(L1,L2) >= min_{m != n} dist(s_m^{+-}, L_n) / sqrt(2),
// valid when the endpoints satisfy the minimal-pairing inequality
//   |s1+ - s1-| + |s2+ - s2-| <= |s1+ - s2-| + |s2+ - s1-|.
struct SegmentBoundReport {
  double lhs = 0.0;      // dist(L1,L2)
  double rhs = 0.0;      // min cross endpoint-to-segment distance / sqrt(2)
  bool ok = false;
  bool precondition_holds = false;
};

SegmentBoundReport segment_distance_bound(const Segment& L1, const Segment& L2);

}  // namespace gl3d
