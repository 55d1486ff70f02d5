#pragma once

#include <functional>

#include "gl3d/biot_savart.hpp"
#include "gl3d/dec.hpp"

namespace gl3d {

// Energy scaling regimes: S1 |log e| << g << |log e|^2, S2 g = |log e|^2,
// S3 |log e|^2 << g << e^-2.
enum class Regime { S1, S2, S3 };

struct RecoveryParams {
  double eps = 0.05;
  Regime regime = Regime::S2;
  double g = 0.0;       // energy normalization g_eps
  double h = 0.0;       // flux weight, g^{-1/2}
  double hprime = 0.0;  // secondary weight |log eps| / g (S1)
  double eta = 0.0;     // shrink parameter schedule
  double delta = 0.0;   // PL approximation scale schedule

  // defaults: S1 g = |log|^{3/2}, S2 g = |log|^2, S3 g = |log eps|/eps;
  // eta = |log|^{-1/4}, delta = |log|^{-1/8}
  static RecoveryParams make(Regime r, double eps, double eta_override = 0.0,
                             double delta_override = 0.0, double g_override = 0.0);
  void validate() const;
};

// rho_eps(x) = min(dist(x, Gamma)/eps, 1) on grid vertices, exact
// point-to-segment distances with a spatial bin acceleration.
Form0 modulus_profile(const GridSpec& g, const VortexSystem& gamma, double eps);

enum class TreeKind { bfs, dfs };

struct PhaseField {
  ComplexField v;                     // unit-modulus phase field
  Form0 theta;                        // integrated phase (radians)
  double max_unpierced_defect = 0.0;  // worst plaquette defect away from Gamma
};

// along a spanning tree from the corner vertex; circulation defects beyond
// defect_tol * 2pi on plaquettes not pierced by the flux raster are a
// construction error.
PhaseField phase_assemble(const Form1& A, const Form2* pierced_flux, double flux_unit,
                          double defect_tol = 0.05, TreeKind tree = TreeKind::bfs);

// Round the three torus-generator holonomies of A to the nearest 2 pi
// multiples by adding constant (harmonic) forms; no-op on box grids.
// Returns the largest adjustment applied (radians).
double quantize_torus_holonomy(Form1& A);

struct RecoveryInput {
  const VortexSystem* gamma = nullptr;       // vortex system (weight = its h)
  const Form0* alpha = nullptr;              // momentum potential (exact part)
  std::array<long, 3> torus_winding{0, 0, 0};  // harmonic winding integers
};

struct RecoveryResult {
  ComplexField u;
  Form0 rho;
  Form1 phase_gradient;
  Form2 q_raster;
  PhaseField phase;
};

// u_eps = rho_eps * exp(i theta): vortex phase from the spectral field of
// the rasterized system scaled by 2pi/weight_h, momentum phase from
// 2pi/h (d alpha + gamma windings).
RecoveryResult recovery_field(const GridSpec& g, const RecoveryInput& in,
                              const RecoveryParams& params, const PoissonConfig& cfg,
                              TreeKind tree = TreeKind::bfs);

// E(J, v) = ||J|| + 1/2 ||v||_L2^2, with ||J|| = pi h |Gamma| for weighted
// segment systems and the measure mass for 2-forms.
double limit_energy(const VortexSystem& J, const Form1* v);
double limit_energy(const Form2& J, const Form1* v);

// F(v, A) = 1/2 ||dv|| + 1/2 ||v - A||^2 + 1/2 ||dA - dA_ex||^2; +infinity
// when the dv mass exceeds mass_cap.
double limit_F(const Form1& v, const Form1& A, const Form1& A_ex,
               double mass_cap = 1e12);

struct CurvatureReport {
  double max_residual = 0.0;
  std::vector<double> residual;  // per vertex |kappa - 2 tau x j|
  std::vector<Vec3> tau;
  std::vector<Vec3> kappa;
};

// Discrete Frenet data of a polyline filament against the supercurrent j:
// tau by arc-length central differences, kappa by second differences.
CurvatureReport curvature_residual(const std::vector<Vec3>& pts, bool closed,
                                   const std::function<Vec3(const Vec3&)>& j);

// Analytic filaments as weighted segment systems.
VortexSystem line_system(const Vec3& a, const Vec3& b, double weight, int nseg = 1);
VortexSystem circle_system(const Vec3& center, double R, int axis, int nseg,
                           double weight);

}  // namespace gl3d
