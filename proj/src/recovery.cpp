#include "gl3d/recovery.hpp"

#include <cmath>
#include <deque>

#include "gl3d/errors.hpp"

namespace gl3d {

RecoveryParams RecoveryParams::make(Regime r, double eps, double eta_override,
                                    double delta_override, double g_override) {
  if (!(eps > 0.0 && eps < 1.0)) throw invalid_input("RecoveryParams: eps must be in (0,1)");
  RecoveryParams p;
  p.eps = eps;
  p.regime = r;
  const double lg = -std::log(eps);
  switch (r) {
    case Regime::S1: p.g = lg * lg / 8.0; break;  // below critical, h << h'
    case Regime::S2: p.g = lg * lg; break;
    case Regime::S3: p.g = std::pow(lg, 2.5); break;  // in-window family that stays lattice-resolvable
  }
  if (g_override > 0.0) p.g = g_override;
  p.h = 1.0 / std::sqrt(p.g);
  p.hprime = lg / p.g;
  p.eta = eta_override > 0.0 ? eta_override : std::pow(lg, -0.25);
  p.delta = delta_override > 0.0 ? delta_override : std::pow(lg, -0.125);
  return p;
}

void RecoveryParams::validate() const {
  if (!(eps > 0.0 && eps < 1.0)) throw invalid_input("RecoveryParams: bad eps");
  if (!(h < eta * eta)) throw invalid_input("RecoveryParams: h >= eta^2");
  if (regime == Regime::S1 && !(h / hprime < 0.5))
    throw invalid_input("RecoveryParams: S1 requires h << h'");
}

Form0 modulus_profile(const GridSpec& g, const VortexSystem& gamma, double eps) {
  if (!(eps > 0.0)) throw invalid_input("modulus_profile: eps must be positive");
  Form0 rho(g);
  for (double& v : rho.a.v) v = 1.0;
  const Dims3 vd = g.vertex_dims();
  const double dx = g.spacing;
  std::vector<double> dist2(size_t(vd.size()), std::numeric_limits<double>::infinity());
  for (const Segment& s : gamma.segments) {
    Vec3 lo = s.a, hi = s.a;
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], s.b[a]) - eps;
      hi[a] = std::max(hi[a], s.b[a]) + eps;
    }
    int64_t ilo[3], ihi[3];
    for (int a = 0; a < 3; ++a) {
      ilo[a] = int64_t(std::floor((lo[a] - g.origin[a]) / dx));
      ihi[a] = int64_t(std::ceil((hi[a] - g.origin[a]) / dx));
      if (!g.periodic()) {
        ilo[a] = std::max<int64_t>(ilo[a], 0);
        ihi[a] = std::min<int64_t>(ihi[a], g.dims[a] - 1);
      }
    }
    for (int64_t k = ilo[2]; k <= ihi[2]; ++k)
      for (int64_t j = ilo[1]; j <= ihi[1]; ++j)
        for (int64_t i = ilo[0]; i <= ihi[0]; ++i) {
          const Vec3 x = g.vertex_pos(i, j, k);
          const double d = point_segment_distance(x, s);
          if (d * d >= eps * eps) continue;
          const int64_t wi = g.periodic() ? detail::wrap(i, vd.n[0]) : i;
          const int64_t wj = g.periodic() ? detail::wrap(j, vd.n[1]) : j;
          const int64_t wk = g.periodic() ? detail::wrap(k, vd.n[2]) : k;
          double& cur = dist2[size_t(vd.idx(wi, wj, wk))];
          cur = std::min(cur, d * d);
        }
  }
  for (size_t t = 0; t < dist2.size(); ++t)
    if (std::isfinite(dist2[t]))
      rho.a.v[t] = std::min(std::sqrt(dist2[t]) / eps, 1.0);
  return rho;
}

PhaseField phase_assemble(const Form1& A, const Form2* pierced_flux, double flux_unit,
                          double defect_tol, TreeKind tree) {
  const GridSpec& g = A.grid;
  PhaseField out;
  out.theta = Form0(g);
  out.v = ComplexField(g);
  const Dims3 vd = g.vertex_dims();
  std::vector<uint8_t> seen(size_t(vd.size()), 0);
  std::deque<std::array<int64_t, 3>> frontier;
  frontier.push_back({0, 0, 0});
  seen[0] = 1;
  const double dx = g.spacing;
  while (!frontier.empty()) {
    std::array<int64_t, 3> v;
    if (tree == TreeKind::bfs) {
      v = frontier.front();
      frontier.pop_front();
    } else {
      v = frontier.back();
      frontier.pop_back();
    }
    const double th = out.theta.a.at(v[0], v[1], v[2]);
    for (int axis = 0; axis < 3; ++axis) {
      for (int dir = -1; dir <= 1; dir += 2) {
        std::array<int64_t, 3> w = v;
        w[size_t(axis)] += dir;
        std::array<int64_t, 3> e = dir > 0 ? v : w;  // edge anchor vertex
        if (g.periodic()) {
          for (int a = 0; a < 3; ++a) w[size_t(a)] = detail::wrap(w[size_t(a)], vd.n[a]);
          for (int a = 0; a < 3; ++a) e[size_t(a)] = detail::wrap(e[size_t(a)], vd.n[a]);
        } else {
          if (w[size_t(axis)] < 0 || w[size_t(axis)] > g.dims[axis] - 1) continue;
        }
        const size_t widx = size_t(vd.idx(w[0], w[1], w[2]));
        if (seen[widx]) continue;
        seen[widx] = 1;
        const double inc = A.comp[axis].at(e[0], e[1], e[2]) * dx;
        out.theta.a.v[widx] = th + double(dir) * inc;
        frontier.push_back(w);
      }
    }
  }
  for (size_t t = 0; t < out.v.values.size(); ++t)
    out.v.values[t] = std::polar(1.0, out.theta.a.v[t]);

  // circulation defects away from the pierced plaquettes
  Form2 dA = exterior_derivative(A);
  const double two_pi = 2.0 * M_PI;
  double worst = 0.0;
  for (int c = 0; c < 3; ++c) {
    const Dims3& fd = dA.comp[c].dims;
    for (int64_t k = 0; k < fd.n[2]; ++k)
      for (int64_t j = 0; j < fd.n[1]; ++j)
        for (int64_t i = 0; i < fd.n[0]; ++i) {
          if (pierced_flux) {
            const double flux =
                pierced_flux->comp[c].at(i, j, k) * dx * dx;
            if (std::fabs(flux) >= 0.5 * flux_unit) continue;
          }
          const double circ = dA.comp[c].at(i, j, k) * dx * dx;
          const double defect = std::fabs(circ - two_pi * std::round(circ / two_pi));
          worst = std::max(worst, defect);
        }
  }
  out.max_unpierced_defect = worst;
  if (worst > defect_tol * two_pi)
    throw contract_error("phase_assemble: circulation defect " + std::to_string(worst) +
                         " rad on an unpierced plaquette");
  return out;
}

double quantize_torus_holonomy(Form1& A) {
  const GridSpec& g = A.grid;
  if (!g.periodic()) return 0.0;
  const double two_pi = 2.0 * M_PI;
  double worst = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    // generator line through the origin vertex
    double circ = 0.0;
    const int64_t n = g.dims[axis];
    for (int64_t t = 0; t < n; ++t) {
      std::array<int64_t, 3> v{0, 0, 0};
      v[size_t(axis)] = t;
      circ += A.comp[axis].at(v[0], v[1], v[2]) * g.spacing;
    }
    const double defect = circ - two_pi * std::round(circ / two_pi);
    if (defect == 0.0) continue;
    const double L = g.spacing * double(n);
    for (double& v : A.comp[axis].v) v -= defect / L;
    worst = std::max(worst, std::fabs(defect));
  }
  return worst;
}

RecoveryResult recovery_field(const GridSpec& g, const RecoveryInput& in,
                              const RecoveryParams& params, const PoissonConfig& cfg,
                              TreeKind tree) {
  RecoveryResult out;
  Form1 A(g);
  out.q_raster = Form2(g);
  double flux_unit = 1.0;
  const bool have_gamma = in.gamma && !in.gamma->segments.empty();
  if (have_gamma) {
    out.q_raster = rasterize_to_form2(*in.gamma, g);
    Form1 Ab = spectral_vortex_field(out.q_raster, cfg);
    const double s = 2.0 * M_PI / in.gamma->weight_h;
    for (int c = 0; c < 3; ++c)
      for (size_t t = 0; t < A.comp[c].v.size(); ++t) A.comp[c].v[t] += s * Ab.comp[c].v[t];
    flux_unit = in.gamma->weight_h;
    // the zero-mean spectral gauge smears the winding sector across the
    // torus; round the generator holonomies back to integers
    quantize_torus_holonomy(A);
  }
  if (in.alpha) {
    Form1 da = exterior_derivative(*in.alpha);
    const double s = 2.0 * M_PI / params.h;
    for (int c = 0; c < 3; ++c)
      for (size_t t = 0; t < A.comp[c].v.size(); ++t) A.comp[c].v[t] += s * da.comp[c].v[t];
  }
  for (int axis = 0; axis < 3; ++axis) {
    if (in.torus_winding[size_t(axis)] == 0) continue;
    if (!g.periodic())
      throw invalid_input("recovery_field: torus windings need a periodic grid");
    const double L = g.spacing * double(g.dims[axis]);
    const double c = 2.0 * M_PI * double(in.torus_winding[size_t(axis)]) / L;
    for (double& v : A.comp[axis].v) v += c;
  }
  out.phase_gradient = A;
  out.phase = phase_assemble(A, have_gamma ? &out.q_raster : nullptr, flux_unit,
                             0.05, tree);
  out.rho = have_gamma ? modulus_profile(g, *in.gamma, params.eps) : Form0(g);
  if (!have_gamma)
    for (double& v : out.rho.a.v) v = 1.0;
  out.u = ComplexField(g);
  for (size_t t = 0; t < out.u.values.size(); ++t)
    out.u.values[t] = out.rho.a.v[t] * out.phase.v.values[t];
  return out;
}

double limit_energy(const VortexSystem& J, const Form1* v) {
  double e = M_PI * J.mass();  // pi per unit multiplicity, mass = h |Gamma|
  if (v) e += 0.5 * dot(*v, *v);
  return e;
}

double limit_energy(const Form2& J, const Form1* v) {
  double e = mass_norm(J);
  if (v) e += 0.5 * dot(*v, *v);
  return e;
}

double limit_F(const Form1& v, const Form1& A, const Form1& A_ex, double mass_cap) {
  Form2 dv = exterior_derivative(v);
  const double dv_mass = norm_lq(dv, 1.0);
  if (dv_mass > mass_cap) return std::numeric_limits<double>::infinity();
  Form1 vmA = v;
  for (int c = 0; c < 3; ++c)
    for (size_t t = 0; t < vmA.comp[c].v.size(); ++t) vmA.comp[c].v[t] -= A.comp[c].v[t];
  Form2 dA = exterior_derivative(A);
  Form2 dAex = exterior_derivative(A_ex);
  for (int c = 0; c < 3; ++c)
    for (size_t t = 0; t < dA.comp[c].v.size(); ++t) dA.comp[c].v[t] -= dAex.comp[c].v[t];
  return 0.5 * dv_mass + 0.5 * dot(vmA, vmA) + 0.5 * dot(dA, dA);
}

CurvatureReport curvature_residual(const std::vector<Vec3>& pts, bool closed,
                                   const std::function<Vec3(const Vec3&)>& j) {
  const size_t n = pts.size();
  if (n < 3) throw invalid_input("curvature_residual: need at least 3 vertices");
  for (size_t i = 0; i + 1 < n; ++i)
    if (norm(pts[i + 1] - pts[i]) == 0.0)
      throw invalid_input("curvature_residual: duplicate consecutive vertices");
  CurvatureReport rep;
  rep.residual.assign(n, 0.0);
  rep.tau.assign(n, Vec3{});
  rep.kappa.assign(n, Vec3{});
  const size_t lo = closed ? 0 : 1;
  const size_t hi = closed ? n : n - 1;
  for (size_t i = lo; i < hi; ++i) {
    const Vec3& prev = pts[(i + n - 1) % n];
    const Vec3& cur = pts[i];
    const Vec3& next = pts[(i + 1) % n];
    const double ds = 0.5 * (norm(next - cur) + norm(cur - prev));
    const Vec3 tau = normalized(next - prev);
    const Vec3 kappa = (next - cur * 2.0 + prev) / (ds * ds);
    rep.tau[i] = tau;
    rep.kappa[i] = kappa;
    const Vec3 res = kappa - cross(tau, j(cur)) * 2.0;
    rep.residual[i] = norm(res);
    rep.max_residual = std::max(rep.max_residual, rep.residual[i]);
  }
  return rep;
}

VortexSystem line_system(const Vec3& a, const Vec3& b, double weight, int nseg) {
  VortexSystem sys;
  sys.weight_h = weight;
  std::vector<int> chain;
  for (int t = 0; t < nseg; ++t) {
    const Vec3 p = a + (b - a) * (double(t) / nseg);
    const Vec3 q = a + (b - a) * (double(t + 1) / nseg);
    sys.segments.push_back({p, q});
    sys.region.push_back(0);
    chain.push_back(t);
  }
  sys.loops.push_back(chain);
  sys.loop_closed.push_back(a == b ? 1 : 0);
  return sys;
}

VortexSystem circle_system(const Vec3& center, double R, int axis, int nseg,
                           double weight) {
  if (nseg < 3) throw invalid_input("circle_system: need at least 3 segments");
  VortexSystem sys;
  sys.weight_h = weight;
  const int b = (axis + 1) % 3, c = (axis + 2) % 3;
  std::vector<Vec3> pts;
  for (int t = 0; t < nseg; ++t) {
    const double a = 2.0 * M_PI * double(t) / nseg;
    Vec3 p = center;
    p[b] += R * std::cos(a);
    p[c] += R * std::sin(a);
    pts.push_back(p);
  }
  std::vector<int> chain;
  for (int t = 0; t < nseg; ++t) {
    sys.segments.push_back({pts[size_t(t)], pts[size_t((t + 1) % nseg)]});
    sys.region.push_back(0);
    chain.push_back(t);
  }
  sys.loops.push_back(chain);
  sys.loop_closed.push_back(1);
  return sys;
}

}  // namespace gl3d
