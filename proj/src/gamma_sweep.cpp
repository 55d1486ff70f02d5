#include "gl3d/gamma_sweep.hpp"

#include <cmath>
#include <sstream>

#include "gl3d/errors.hpp"
#include "json.hpp"

namespace gl3d {

VortexSystem FilamentSpec::system(double weight) const {
  switch (kind) {
    case Kind::none: {
      VortexSystem empty;
      empty.weight_h = weight;
      return empty;
    }
    case Kind::line:
      return line_system(a, b, weight, std::max(1, segments / 8));
    case Kind::circle:
      return circle_system(center, radius, axis, segments, weight);
    case Kind::polyline: {
      VortexSystem sys;
      sys.weight_h = weight;
      if (polyline.size() < 2) throw invalid_input("FilamentSpec: short polyline");
      std::vector<int> chain;
      const size_t n = polyline.size();
      const size_t m = closed ? n : n - 1;
      for (size_t t = 0; t < m; ++t) {
        sys.segments.push_back({polyline[t], polyline[(t + 1) % n]});
        sys.region.push_back(0);
        chain.push_back(int(t));
      }
      sys.loops.push_back(chain);
      sys.loop_closed.push_back(closed ? 1 : 0);
      return sys;
    }
  }
  throw invalid_input("FilamentSpec: unknown kind");
}

double FilamentSpec::length() const {
  return system(1.0).total_length();
}

namespace {

// m parallel copies of the filament in its normal disc: deterministic
// sunflower offsets with neighbor spacing ~ spacing_target, capped so the
// bundle stays well inside the filament geometry.
VortexSystem filament_copies(const FilamentSpec& spec, int m, double h,
                             double spacing_target, double* bundle_radius) {
  VortexSystem base = spec.system(h);
  if (bundle_radius) *bundle_radius = 0.0;
  if (m <= 1 || base.segments.empty()) return base;
  VortexSystem out;
  out.weight_h = h;
  const double golden = 2.399963229728653;
  double cap = 0.12;
  if (spec.kind == FilamentSpec::Kind::circle) cap = std::min(cap, spec.radius / 3.0);
  const double b = std::min(spacing_target * std::sqrt(double(m)) / 1.77, cap);
  if (bundle_radius) *bundle_radius = b;
  for (int c = 0; c < m; ++c) {
    const double r = b * std::sqrt((c + 0.5) / double(m));
    const double angles = golden * double(c);
    // offsets in the filament's local normal plane; for planar filaments
    // (axis-aligned circles/lines) the normal plane is (radial, axis)
    for (size_t s = 0; s < base.segments.size(); ++s) {
      Segment seg = base.segments[s];
      auto shift = [&](Vec3& x) {
        if (spec.kind == FilamentSpec::Kind::circle) {
          Vec3 radial = x - spec.center;
          radial[spec.axis] = 0.0;
          const double rn = norm(radial);
          Vec3 rhat = rn > 0 ? radial / rn : Vec3{1, 0, 0};
          x += rhat * (r * std::cos(angles));
          Vec3 ax{0, 0, 0};
          ax[spec.axis] = 1.0;
          x += ax * (r * std::sin(angles));
        } else {
          // line-like: offset transverse to the chord a->b
          Vec3 t = normalized(spec.b - spec.a);
          Vec3 u = std::fabs(t.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
          Vec3 n1 = normalized(cross(t, u));
          Vec3 n2 = cross(t, n1);
          x += n1 * (r * std::cos(angles)) + n2 * (r * std::sin(angles));
        }
      };
      shift(seg.a);
      shift(seg.b);
      out.segments.push_back(seg);
      out.region.push_back(c);
    }
    std::vector<int> chain;
    for (size_t s = 0; s < base.segments.size(); ++s)
      chain.push_back(int(c * base.segments.size() + s));
    out.loops.push_back(chain);
    out.loop_closed.push_back(base.loop_closed.empty() ? 1 : base.loop_closed[0]);
  }
  return out;
}

std::string fmt17(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

GammaReport gamma_sweep(const SweepConfig& cfg) {
  if (cfg.eps_list.empty()) throw invalid_input("gamma_sweep: empty eps list");
  for (size_t t = 1; t < cfg.eps_list.size(); ++t)
    if (!(cfg.eps_list[t] < cfg.eps_list[t - 1]))
      throw invalid_input("gamma_sweep: eps list must be strictly decreasing");
  GammaReport rep;
  for (size_t row_i = 0; row_i < cfg.eps_list.size(); ++row_i) {
    GammaRow row;
    row.eps = cfg.eps_list[row_i];
    const int64_t n = row_i < cfg.grid_sizes.size() ? cfg.grid_sizes[row_i]
                                                    : cfg.grid_sizes.back();
    row.grid_n = n;
    try {
      RecoveryParams params = RecoveryParams::make(cfg.regime, row.eps,
                                                   cfg.eta_override,
                                                   cfg.delta_override, cfg.g_override);
      row.g = params.g;
      row.h = params.h;
      row.eta = params.eta;

      GridSpec g;
      g.dims = {n, n, n};
      g.spacing = 1.0 / double(n);
      g.mode = BoundaryMode::periodic;
      PoissonConfig pcfg = PoissonConfig::for_grid(g);

      // quantize the unit-flux filament: m copies of weight 1/m
      const int m =
          cfg.filament.kind == FilamentSpec::Kind::none
              ? 0
              : std::max(1, int(std::lround(1.0 / params.h)));
      row.copies = m;
      row.h_act = m > 0 ? 1.0 / double(m) : params.h;
      const double spacing_target = cfg.spread * params.eta * std::sqrt(row.h_act);
      double bundle_radius = 0.0;
      VortexSystem gamma =
          filament_copies(cfg.filament, m, row.h_act, spacing_target, &bundle_radius);

      RecoveryParams run = params;
      run.h = row.h_act;  // momentum scaling must match the realized weight

      RecoveryInput in;
      in.gamma = gamma.segments.empty() ? nullptr : &gamma;
      in.torus_winding = cfg.torus_winding;
      RecoveryResult rec = recovery_field(g, in, run, pcfg);

      Potential W = Potential::ginzburg_landau();
      EnergyResult e = energy(rec.u, row.eps, W);
      row.energy = e.total;
      row.energy_over_g = e.total / row.g;

      // core term: energy of the modulus profile alone
      ComplexField rho_field(g);
      for (size_t t = 0; t < rho_field.values.size(); ++t)
        rho_field.values[t] = cplx(rec.rho.a.v[t], 0.0);
      EnergyResult ecore = energy(rho_field, row.eps, W);
      row.core_term = ecore.total / row.g;
      row.field_term = row.energy_over_g - row.core_term;

      // potential-well share (eq. negligible tracking)
      double wint = 0.0;
      {
        Dims3 cd = g.cell_dims();
        const double vol = std::pow(g.spacing, 3);
        for (int64_t k = 0; k < cd.n[2]; ++k)
          for (int64_t j = 0; j < cd.n[1]; ++j)
            for (int64_t i = 0; i < cd.n[0]; ++i) {
              double wavg = 0.0;
              for (int t = 0; t < 8; ++t)
                wavg += W(rec.u.value(i + (t & 1), j + ((t >> 1) & 1),
                                      k + ((t >> 2) & 1)));
              wint += 0.125 * wavg * vol;
            }
        wint /= row.eps * row.eps;
      }
      row.w_ratio = wint / row.g;

      // limit E(J, v): mass term pi ||J||, momentum term from the grid
      // realization of v (unit-flux spectral field of the filament, or the
      // harmonic winding form)
      Form1 v_grid(g);
      bool have_v = false;
      if (cfg.v_from_filament && cfg.filament.kind != FilamentSpec::Kind::none &&
          cfg.regime != Regime::S1) {
        // v is the eta-regularized momentum: the unit-flux lattice field
        // smeared at the bundle scale (the raw line field is not square
        // integrable, and the construction converges to the smeared field)
        VortexSystem unit = cfg.filament.system(1.0);
        Form2 qunit = rasterize_to_form2(unit, g);
        Form1 p = spectral_vortex_field(qunit, pcfg);
        const double r_moll = std::max(2.0 * bundle_radius, 2.0 * g.spacing);
        Form1 pm = mollify(p, r_moll);
        for (int c = 0; c < 3; ++c)
          for (size_t t = 0; t < v_grid.comp[c].v.size(); ++t)
            v_grid.comp[c].v[t] = 2.0 * M_PI * pm.comp[c].v[t];
        have_v = true;
      }
      for (int axis = 0; axis < 3; ++axis) {
        if (cfg.torus_winding[size_t(axis)] == 0) continue;
        const double L = g.spacing * double(g.dims[axis]);
        const double c =
            2.0 * M_PI * double(cfg.torus_winding[size_t(axis)]) * params.h / L;
        for (double& t : v_grid.comp[axis].v) t += c;
        have_v = true;
      }
      row.momentum_term = have_v ? 0.5 * dot(v_grid, v_grid) : 0.0;
      row.mass_term = cfg.regime == Regime::S3 || cfg.filament.kind == FilamentSpec::Kind::none
                          ? 0.0
                          : M_PI * cfg.filament.length();
      row.limit = row.mass_term + row.momentum_term;
      row.gap = row.energy_over_g - row.limit;
      row.gap_rel = row.limit > 0.0 ? std::fabs(row.gap) / row.limit : 0.0;
      // vorticity contribution: the share of the energy concentrated in the
      // core tube (within 2 eps of the line system)
      if (in.gamma && !in.gamma->segments.empty() && row.energy > 0.0) {
        Form0 rho2 = modulus_profile(g, *in.gamma, 2.0 * row.eps);
        double tube = 0.0;
        const Dims3 cd = e.density.a.dims;
        const double vol = std::pow(g.spacing, 3);
        for (int64_t k = 0; k < cd.n[2]; ++k)
          for (int64_t j = 0; j < cd.n[1]; ++j)
            for (int64_t i = 0; i < cd.n[0]; ++i) {
              double r = 0.0;
              for (int t = 0; t < 8; ++t)
                r += rho2.value(i + (t & 1), j + ((t >> 1) & 1), k + ((t >> 2) & 1));
              if (r < 8.0) tube += e.density.a.at(i, j, k) * vol;
            }
        row.vorticity_share = tube / row.energy;
      } else {
        row.vorticity_share = 0.0;
      }
      row.ok = true;
    } catch (const std::exception& ex) {
      row.ok = false;
      row.error = ex.what();
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

std::string GammaReport::to_csv() const {
  std::ostringstream os;
  os << "eps,grid_n,g,h,h_act,eta,copies,energy,energy_over_g,core_term,"
        "field_term,momentum_term,mass_term,limit,gap,gap_rel,w_ratio,"
        "vorticity_share,ok,error\n";
  for (const GammaRow& r : rows) {
    os << fmt17(r.eps) << "," << r.grid_n << "," << fmt17(r.g) << "," << fmt17(r.h)
       << "," << fmt17(r.h_act) << "," << fmt17(r.eta) << "," << r.copies << ","
       << fmt17(r.energy) << "," << fmt17(r.energy_over_g) << ","
       << fmt17(r.core_term) << "," << fmt17(r.field_term) << ","
       << fmt17(r.momentum_term) << "," << fmt17(r.mass_term) << ","
       << fmt17(r.limit) << "," << fmt17(r.gap) << "," << fmt17(r.gap_rel) << ","
       << fmt17(r.w_ratio) << "," << fmt17(r.vorticity_share) << ","
       << (r.ok ? 1 : 0) << "," << r.error << "\n";
  }
  return os.str();
}

std::string GammaReport::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const GammaRow& r : rows) {
    j.push_back({{"eps", r.eps},
                 {"grid_n", r.grid_n},
                 {"g", r.g},
                 {"h", r.h},
                 {"h_act", r.h_act},
                 {"eta", r.eta},
                 {"copies", r.copies},
                 {"energy", r.energy},
                 {"energy_over_g", r.energy_over_g},
                 {"core_term", r.core_term},
                 {"field_term", r.field_term},
                 {"momentum_term", r.momentum_term},
                 {"mass_term", r.mass_term},
                 {"limit", r.limit},
                 {"gap", r.gap},
                 {"gap_rel", r.gap_rel},
                 {"w_ratio", r.w_ratio},
                 {"vorticity_share", r.vorticity_share},
                 {"ok", r.ok},
                 {"error", r.error}});
  }
  return j.dump(2);
}

}  // namespace gl3d
