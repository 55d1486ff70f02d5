#pragma once

#include <vector>

#include "gl3d/geometry.hpp"
#include "gl3d/grid.hpp"

namespace gl3d {

// Discrete signed measure: weighted points, each tagged with the 2-form
// component it pairs against (0..2). Scalar measures use component 0.
struct PointMeasure {
  struct Atom {
    Vec3 x;
    double w = 0.0;
    int component = 0;
  };
  std::vector<Atom> atoms;

  void add(const Vec3& x, double w, int component = 0) {
    if (w != 0.0) atoms.push_back({x, w, component});
  }
  double total(int component) const;
};

// Bounded-Lipschitz (W^{-1,1}-type) norm of a discrete signed measure:
//   sup { sum_i w_i phi(x_i) : |phi(x)-phi(y)| <= |x-y|, |phi| <= R },
// evaluated per component and summed. Computed exactly through the dual
// transportation problem with mass creation/destruction at cost R.
double flat_norm_w11(const PointMeasure& mu, double R);

// Difference of two grid 2-forms reduced to face-center atoms (weight =
// value * face area, skipping |w| <= drop_tol).
PointMeasure form2_measure(const Form2& w, double drop_tol = 0.0);
PointMeasure form2_difference_measure(const Form2& a, const Form2& b, double drop_tol = 0.0);

// 1-current along segments as a 2-form measure: each chunk of arclength ds
// contributes weight * t_a * ds to component a; chunks no longer than
// max_chunk.
void add_segment_current(PointMeasure& mu, const Segment& s, double weight,
                         double max_chunk);

// Exact min-cost transportation: supplies a_i, demands b_j (sum equal),
// dense costs. Returns optimal cost.
double solve_transport(const std::vector<double>& supply,
                       const std::vector<double>& demand,
                       const std::vector<std::vector<double>>& cost);

}  // namespace gl3d
