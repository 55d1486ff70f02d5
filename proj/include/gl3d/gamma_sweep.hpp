#pragma once

#include <string>

#include "gl3d/recovery.hpp"

namespace gl3d {

// Filament geometry for synthesized vorticity.
struct FilamentSpec {
  enum class Kind { none, line, circle, polyline };
  Kind kind = Kind::none;
  Vec3 a{0.5, 0.5, 0.0}, b{0.5, 0.5, 1.0};  // line endpoints
  Vec3 center{0.5, 0.5, 0.5};
  double radius = 0.25;
  int axis = 2;
  int segments = 256;
  std::vector<Vec3> polyline;
  bool closed = true;

  VortexSystem system(double weight) const;
  double length() const;
};

struct SweepConfig {
  Regime regime = Regime::S2;
  FilamentSpec filament;
  // momentum data: constant harmonic windings (S1/S3 style) and whether the
  // filament's own Biot-Savart field supplies v (S2: dv = 2J)
  bool v_from_filament = true;
  std::array<long, 3> torus_winding{0, 0, 0};

  std::vector<double> eps_list{0.04, 0.02, 0.01};
  std::vector<int64_t> grid_sizes{64, 96, 128};  // one per eps (or last repeats)

  double eta_override = 0.0, delta_override = 0.0, g_override = 0.0;
  // normal-disc spread of the m = 1/h filament copies, in units of
  // eta sqrt(h) per copy spacing
  double spread = 1.0;
  int threads = 0;
};

struct GammaRow {
  double eps = 0.0, g = 0.0, h = 0.0, h_act = 0.0, eta = 0.0;
  int64_t grid_n = 0;
  int copies = 0;
  double energy = 0.0;
  double energy_over_g = 0.0;
  double core_term = 0.0;      // (grad rho + potential well) / g
  double field_term = 0.0;     // remainder of E/g
  double momentum_term = 0.0;  // 1/2 ||v||^2 target on this grid
  double mass_term = 0.0;      // pi ||J||
  double limit = 0.0;          // E(J, v) on this grid
  double gap = 0.0, gap_rel = 0.0;
  double w_ratio = 0.0;         // potential part of E / g (eq. negligible)
  double vorticity_share = 0.0; // (E/g - momentum) / (E/g)
  bool ok = false;
  std::string error;
};

struct GammaReport {
  std::vector<GammaRow> rows;
  std::string to_csv() const;
  std::string to_json() const;
};

// Full pipeline per epsilon: quantized filament copies -> recovery field ->
// energy, with the decomposed contributions and the gap to E(J, v).
GammaReport gamma_sweep(const SweepConfig& cfg);

}  // namespace gl3d
