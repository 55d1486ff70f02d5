#pragma once

#include <string>
#include <vector>

#include "gl3d/flat_norm.hpp"
#include "gl3d/geometry.hpp"

namespace gl3d {

// Weighted oriented segment system Gamma_h: the discretized vorticity
// carries flux weight h on every segment. Loops partition the segments
// into oriented polylines, each closed in the domain or ending on the
// domain boundary.
struct VortexSystem {
  double weight_h = 1.0;
  std::vector<Segment> segments;
  std::vector<int> region;  // region tag per segment (simplex/frustum id)
  std::vector<std::vector<int>> loops;  // segment ids in walk order
  std::vector<uint8_t> loop_closed;

  double total_length() const {
    double s = 0.0;
    for (const Segment& seg : segments) s += seg.length();
    return s;
  }
  double mass() const { return weight_h * total_length(); }
  int n_segments() const { return int(segments.size()); }
  int n_loops() const { return int(loops.size()); }

  // 2-form measure of the weighted current, chunked for flat-norm use
  PointMeasure as_measure(double max_chunk) const;

  std::string to_json() const;
  static VortexSystem from_json(const std::string& text);
  void save_json(const std::string& path) const;
  static VortexSystem load_json(const std::string& path);
  // VTK legacy ASCII POLYDATA lines
  void save_vtk(const std::string& path) const;
};

}  // namespace gl3d
