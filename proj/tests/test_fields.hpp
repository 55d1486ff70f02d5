#pragma once

// Analytic vortex configurations used as independent fixtures across tests.

#include <cmath>
#include <complex>
#include <vector>

#include "gl3d/grid.hpp"

namespace gl3d_test {

using gl3d::ComplexField;
using gl3d::cplx;
using gl3d::GridSpec;
using gl3d::Vec3;

struct LineVortex {
  double cx = 0.0, cy = 0.0;  // core position in the (x,y) plane
  int degree = 1;
};

// Product of straight unit-modulus vortex columns along z.
inline ComplexField straight_vortex_field(const GridSpec& g,
                                          const std::vector<LineVortex>& lines) {
  ComplexField u(g);
  for (int64_t k = 0; k < g.dims[2]; ++k)
    for (int64_t j = 0; j < g.dims[1]; ++j)
      for (int64_t i = 0; i < g.dims[0]; ++i) {
        Vec3 p = g.vertex_pos(i, j, k);
        cplx v(1.0, 0.0);
        for (const LineVortex& lv : lines) {
          cplx w(p.x - lv.cx, p.y - lv.cy);
          const double m = std::abs(w);
          if (m == 0.0) {
            v = cplx(0.0, 0.0);
            break;
          }
          w /= m;
          const int d = std::abs(lv.degree);
          for (int t = 0; t < d; ++t) v *= lv.degree > 0 ? w : std::conj(w);
        }
        u.at(i, j, k) = v;
      }
  return u;
}

// Unit-modulus field with a circular vortex ring of radius R in the plane
// z = z0, centered on the z axis through (cx, cy): phase winds once around
// the ring in the (radial, z) half-plane.
inline ComplexField ring_vortex_field(const GridSpec& g, double R, double cx,
                                      double cy, double z0) {
  ComplexField u(g);
  for (int64_t k = 0; k < g.dims[2]; ++k)
    for (int64_t j = 0; j < g.dims[1]; ++j)
      for (int64_t i = 0; i < g.dims[0]; ++i) {
        Vec3 p = g.vertex_pos(i, j, k);
        const double rho = std::hypot(p.x - cx, p.y - cy);
        const double a = rho - R, b = p.z - z0;
        const double m = std::hypot(a, b);
        u.at(i, j, k) = m == 0.0 ? cplx(0.0, 0.0) : cplx(a / m, b / m);
      }
  return u;
}

}  // namespace gl3d_test
