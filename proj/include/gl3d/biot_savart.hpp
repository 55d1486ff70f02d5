#pragma once

#include <optional>

#include "gl3d/poisson.hpp"
#include "gl3d/vortex_system.hpp"

namespace gl3d {

// Closed-form field of a unit-strength oriented segment current: the 1-form
// d*(G * q) evaluated at x, azimuthal about the segment axis with magnitude
//   (1/4 pi rho^2) [ (L-z)/sqrt(rho^2+(L-z)^2) + z/sqrt(rho^2+z^2) ] |t x r|.
// Obeys |field| <= 1/(2 pi dist(x, segment)). Evaluation on the segment
// itself returns zero and sets *on_segment.
Vec3 biot_savart_segment(const Segment& s, const Vec3& x, bool* on_segment = nullptr);

struct QuadratureOptions {
  int max_depth = 12;
  double tolerance = 1e-9;
  // adaptive bisection whenever segment-to-edge distance < near_factor * edge length
  double near_factor = 2.0;
  int threads = 0;  // 0 = hardware concurrency
};

// Edge-averaged field of the weighted system: value = (1/dx) int_edge field . dl,
// Gauss-Legendre with adaptive bisection near the segments.
Form1 biot_savart_field(const VortexSystem& gamma, const GridSpec& g,
                        const QuadratureOptions& opts = {});

// Exact rasterization of the weighted segment system to face fluxes
// (surface density = weight * signed crossings / face area). Rational
// crossing tests; throws if a segment leaves a box grid.
Form2 rasterize_to_form2(const VortexSystem& gamma, const GridSpec& g);

// d*(L^{-1} q_raster): the lattice-exact vortex field whose discrete d is
// the rasterized flux (up to kernel projection in periodic mode).
Form1 spectral_vortex_field(const Form2& q_raster, const PoissonConfig& cfg);

// Psi_h = d* L^{-1} q_h - (Biot-Savart field): the correction making the
// free-space kernel respect the domain / torus.
Form1 harmonic_correction(const VortexSystem& gamma, const GridSpec& g,
                          const PoissonConfig& cfg, const QuadratureOptions& opts = {});

struct LinkingResult {
  long link = 0;
  double residual = 0.0;  // |integral/h - link|
};

// (1/h) circulation of the system's field along the closed polyline, via
// the closed form + adaptive quadrature; integer up to quadrature error.
LinkingResult linking_number(const std::vector<Vec3>& loop, const VortexSystem& gamma,
                             const QuadratureOptions& opts = {});

}  // namespace gl3d
