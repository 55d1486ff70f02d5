#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "gl3d/simplicial.hpp"

namespace gl3d {

using OneFormFn = std::function<Vec3(const Vec3&)>;

// Continuous piecewise linear 1-form on a rational simplicial mesh: vertex
// component values are the primary data (exact rationals), per-simplex
// linear coefficients p_i(x) = sum_j a[i][j] x_j + b[i] and the constant
// vorticity vector (dp = sum_j curl_j * dx^j) are derived exactly.
struct PLOneForm {
  std::shared_ptr<const RationalSimplicialMesh> mesh;
  std::vector<RVec3> vertex_values;  // one RVec3 (components) per mesh vertex
  bool rational = false;             // true after rationalize()
  unsigned long denominator_bound = 0;

  struct SimplexCoeffs {
    std::array<RVec3, 3> a;  // a[i][j]: d p_i / d x_j
    RVec3 b;
    RVec3 curl;  // (a[2][1]-a[1][2], a[0][2]-a[2][0], a[1][0]-a[0][1])
  };
  std::vector<SimplexCoeffs> coeffs;

  void derive_coefficients();
  // pointwise value (components) inside the mesh
  std::optional<Vec3> evaluate(const Vec3& x) const;
  Vec3 curl_of(int s) const { return to_vec3(coeffs[size_t(s)].curl); }
  // tangential continuity across interior faces, checked at face vertices
  bool continuous() const;
  // exact total variation of dp: sum |curl_i| vol(S_i) (double)
  double dp_total_variation() const;
};

// Vertex interpolation of an analytic or gridded 1-form.
PLOneForm interpolate(const OneFormFn& v, std::shared_ptr<const RationalSimplicialMesh> mesh);

// Round every vertex value to the nearest multiple of 1/D.
PLOneForm rationalize(const PLOneForm& p, unsigned long D);

// Exact flux of dp through local face j of simplex s (induced orientation).
rat face_flux(const PLOneForm& p, int s, int j);

struct ApproximationReport {
  double l2_gap = 0.0;     // || p - p_delta ||_L2 over the sample box
  double l2_growth = 0.0;  // || p_delta ||_L2^2 over the mesh
  double tv = 0.0;         // total variation of dp, exact simplex sum
};

// Fixed midpoint-quadrature comparison over the mesh bounding box
// restricted to the mesh, n^3 samples.
ApproximationReport approximation_report(const OneFormFn& original, const PLOneForm& pd,
                                         int n = 48);

// JSON serialization with rationals as {"num": ..., "den": ...} pairs.
std::string mesh_to_json(const RationalSimplicialMesh& mesh);
std::string pl_form_to_json(const PLOneForm& p);

}  // namespace gl3d
