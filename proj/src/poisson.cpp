#include "gl3d/poisson.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <vector>

namespace gl3d {

namespace {

std::mutex fftw_mutex;  // FFTW planning is not thread safe

// axis transform kinds for the box cosine mode
enum class AxisKind { vertex, cell, staggered };

double axis_eigenvalue(AxisKind kind, int64_t size, int64_t k, double dx) {
  double c = 0.0;
  switch (kind) {
    case AxisKind::vertex:  // REDFT00, size >= 2
      c = 2.0 - 2.0 * std::cos(M_PI * double(k) / double(size - 1));
      break;
    case AxisKind::cell:  // REDFT10
      c = 2.0 - 2.0 * std::cos(M_PI * double(k) / double(size));
      break;
    case AxisKind::staggered:  // RODFT00
      c = 2.0 - 2.0 * std::cos(M_PI * double(k + 1) / double(size + 1));
      break;
  }
  return c / (dx * dx);
}

fftw_r2r_kind forward_kind(AxisKind kind) {
  switch (kind) {
    case AxisKind::vertex: return FFTW_REDFT00;
    case AxisKind::cell: return FFTW_REDFT10;
    case AxisKind::staggered: return FFTW_RODFT00;
  }
  return FFTW_REDFT00;
}

fftw_r2r_kind inverse_kind(AxisKind kind) {
  switch (kind) {
    case AxisKind::vertex: return FFTW_REDFT00;
    case AxisKind::cell: return FFTW_REDFT01;
    case AxisKind::staggered: return FFTW_RODFT00;
  }
  return FFTW_REDFT00;
}

double logical_size(AxisKind kind, int64_t size) {
  switch (kind) {
    case AxisKind::vertex: return 2.0 * double(size - 1);
    case AxisKind::cell: return 2.0 * double(size);
    case AxisKind::staggered: return 2.0 * double(size + 1);
  }
  return 1.0;
}

// in place: solve -Delta u = f for one array with the given axis kinds
void solve_box_array(GridArray& a, double dx, const std::array<AxisKind, 3>& kinds) {
  const Dims3 d = a.dims;
  const int n[3] = {int(d.n[2]), int(d.n[1]), int(d.n[0])};  // fftw row-major
  fftw_r2r_kind fk[3] = {forward_kind(kinds[2]), forward_kind(kinds[1]),
                         forward_kind(kinds[0])};
  fftw_r2r_kind ik[3] = {inverse_kind(kinds[2]), inverse_kind(kinds[1]),
                         inverse_kind(kinds[0])};
  std::vector<double> work(a.v.size());
  fftw_plan pf, pi;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex);
    pf = fftw_plan_r2r_3d(n[0], n[1], n[2], a.v.data(), work.data(), fk[0], fk[1],
                          fk[2], FFTW_ESTIMATE);
    pi = fftw_plan_r2r_3d(n[0], n[1], n[2], work.data(), a.v.data(), ik[0], ik[1],
                          ik[2], FFTW_ESTIMATE);
  }
  fftw_execute(pf);
  const double scale = 1.0 / (logical_size(kinds[0], d.n[0]) *
                              logical_size(kinds[1], d.n[1]) *
                              logical_size(kinds[2], d.n[2]));
  for (int64_t k = 0; k < d.n[2]; ++k)
    for (int64_t j = 0; j < d.n[1]; ++j)
      for (int64_t i = 0; i < d.n[0]; ++i) {
        const double lam = axis_eigenvalue(kinds[0], d.n[0], i, dx) +
                           axis_eigenvalue(kinds[1], d.n[1], j, dx) +
                           axis_eigenvalue(kinds[2], d.n[2], k, dx);
        double& v = work[size_t(d.idx(i, j, k))];
        v = lam > 1e-300 ? v * scale / lam : 0.0;
      }
  fftw_execute(pi);
  {
    std::lock_guard<std::mutex> lock(fftw_mutex);
    fftw_destroy_plan(pf);
    fftw_destroy_plan(pi);
  }
}

// periodic spectral solve of one array
void solve_periodic_array(GridArray& a, double dx) {
  const Dims3 d = a.dims;
  const int n0 = int(d.n[2]), n1 = int(d.n[1]), n2 = int(d.n[0]);
  const int64_t nc = int64_t(n0) * n1 * (n2 / 2 + 1);
  fftw_complex* spec = fftw_alloc_complex(size_t(nc));
  fftw_plan pf, pi;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex);
    pf = fftw_plan_dft_r2c_3d(n0, n1, n2, a.v.data(), spec, FFTW_ESTIMATE);
    pi = fftw_plan_dft_c2r_3d(n0, n1, n2, spec, a.v.data(), FFTW_ESTIMATE);
  }
  fftw_execute(pf);
  const double scale = 1.0 / (double(n0) * n1 * n2);
  const double idx2 = 1.0 / (dx * dx);
  int64_t t = 0;
  for (int k = 0; k < n0; ++k)
    for (int j = 0; j < n1; ++j)
      for (int i = 0; i < n2 / 2 + 1; ++i, ++t) {
        const double lam =
            idx2 * (2.0 - 2.0 * std::cos(2.0 * M_PI * double(k) / n0) + 2.0 -
                    2.0 * std::cos(2.0 * M_PI * double(j) / n1) + 2.0 -
                    2.0 * std::cos(2.0 * M_PI * double(i) / n2));
        const double f = lam > 1e-300 ? scale / lam : 0.0;
        spec[t][0] *= f;
        spec[t][1] *= f;
      }
  fftw_execute(pi);
  {
    std::lock_guard<std::mutex> lock(fftw_mutex);
    fftw_destroy_plan(pf);
    fftw_destroy_plan(pi);
    fftw_free(spec);
  }
}

void check_mode(const GridSpec& g, const PoissonConfig& cfg) {
  const bool periodic = cfg.mode == PoissonConfig::Mode::periodic_spectral;
  if (periodic != g.periodic())
    throw invalid_input("poisson_inverse: config mode does not match the grid");
}

}  // namespace

Form0 poisson_inverse(const Form0& f, const PoissonConfig& cfg) {
  check_mode(f.grid, cfg);
  Form0 out = f;
  if (f.grid.periodic())
    solve_periodic_array(out.a, f.grid.spacing);
  else
    solve_box_array(out.a, f.grid.spacing,
                    {AxisKind::vertex, AxisKind::vertex, AxisKind::vertex});
  return out;
}

Form1 poisson_inverse(const Form1& f, const PoissonConfig& cfg) {
  check_mode(f.grid, cfg);
  Form1 out = f;
  for (int c = 0; c < 3; ++c) {
    if (f.grid.periodic()) {
      solve_periodic_array(out.comp[c], f.grid.spacing);
    } else {
      std::array<AxisKind, 3> kinds{AxisKind::vertex, AxisKind::vertex,
                                    AxisKind::vertex};
      kinds[size_t(c)] = AxisKind::staggered;
      solve_box_array(out.comp[c], f.grid.spacing, kinds);
    }
  }
  return out;
}

Form2 poisson_inverse(const Form2& f, const PoissonConfig& cfg) {
  check_mode(f.grid, cfg);
  Form2 out = f;
  for (int c = 0; c < 3; ++c) {
    if (f.grid.periodic()) {
      solve_periodic_array(out.comp[c], f.grid.spacing);
    } else {
      std::array<AxisKind, 3> kinds{AxisKind::cell, AxisKind::cell, AxisKind::cell};
      kinds[size_t(c)] = AxisKind::vertex;
      solve_box_array(out.comp[c], f.grid.spacing, kinds);
    }
  }
  return out;
}

Form3 poisson_inverse(const Form3& f, const PoissonConfig& cfg) {
  check_mode(f.grid, cfg);
  Form3 out = f;
  if (f.grid.periodic())
    solve_periodic_array(out.a, f.grid.spacing);
  else
    solve_box_array(out.a, f.grid.spacing,
                    {AxisKind::cell, AxisKind::cell, AxisKind::cell});
  return out;
}

Form0 minus_laplacian(const Form0& f) {
  Form1 df = exterior_derivative(f);
  return codifferential(df);
}

Form1 minus_laplacian(const Form1& f) {
  Form2 df = exterior_derivative(f);
  Form0 cf = codifferential(f);
  Form1 a = codifferential(df);
  Form1 b = exterior_derivative(cf);
  for (int c = 0; c < 3; ++c)
    for (size_t i = 0; i < a.comp[c].v.size(); ++i) a.comp[c].v[i] += b.comp[c].v[i];
  return a;
}

HodgeParts hodge_decompose(const Form1& p, const PoissonConfig& cfg) {
  HodgeParts out;
  Form1 psi = poisson_inverse(p, cfg);
  out.alpha = codifferential(psi);
  out.d_alpha = exterior_derivative(out.alpha);
  out.beta = exterior_derivative(psi);
  out.dstar_beta = codifferential(out.beta);
  out.gamma = Form1(p.grid);
  if (p.grid.periodic()) {
    // harmonic 1-forms on the torus are the constant modes
    for (int c = 0; c < 3; ++c) {
      double mean = 0.0;
      for (double v : p.comp[c].v) mean += v;
      mean /= double(p.comp[c].v.size());
      for (double& v : out.gamma.comp[c].v) v = mean;
    }
  }
  const double pn = l2_norm(p);
  Form1 res = p;
  for (int c = 0; c < 3; ++c)
    for (size_t i = 0; i < res.comp[c].v.size(); ++i)
      res.comp[c].v[i] -= out.gamma.comp[c].v[i] + out.d_alpha.comp[c].v[i] +
                          out.dstar_beta.comp[c].v[i];
  out.residual = pn > 0.0 ? l2_norm(res) / pn : 0.0;
  if (p.grid.periodic()) {
    out.interior_residual = out.residual;
  } else {
    double num = 0.0, den = 0.0;
    for (int c = 0; c < 3; ++c) {
      const Dims3& dd = res.comp[c].dims;
      for (int64_t k = 2; k < dd.n[2] - 2; ++k)
        for (int64_t j = 2; j < dd.n[1] - 2; ++j)
          for (int64_t i = 2; i < dd.n[0] - 2; ++i) {
            num += res.comp[c].at(i, j, k) * res.comp[c].at(i, j, k);
            den += p.comp[c].at(i, j, k) * p.comp[c].at(i, j, k);
          }
    }
    out.interior_residual = den > 0.0 ? std::sqrt(num / den) : 0.0;
  }
  const double denom = pn > 0.0 ? pn * pn : 1.0;
  out.ortho = {std::fabs(dot(out.gamma, out.d_alpha)) / denom,
               std::fabs(dot(out.gamma, out.dstar_beta)) / denom,
               std::fabs(dot(out.d_alpha, out.dstar_beta)) / denom};
  return out;
}

Form1 mollify(const Form1& f, double r) {
  const GridSpec& g = f.grid;
  if (!g.periodic()) throw invalid_input("mollify: periodic grids only");
  if (r < g.spacing) throw invalid_input("mollify: radius below grid spacing");
  // radial hat of support r/3, tripled in spectral space
  const Dims3 d = g.vertex_dims();
  GridArray ker(d);
  const double r3 = r / 3.0;
  double sum = 0.0;
  for (int64_t k = 0; k < d.n[2]; ++k)
    for (int64_t j = 0; j < d.n[1]; ++j)
      for (int64_t i = 0; i < d.n[0]; ++i) {
        auto wrapd = [&](int64_t t, int64_t n) {
          double x = double(t);
          if (x > double(n) / 2.0) x -= double(n);
          return x * g.spacing;
        };
        const double dist = std::sqrt(
            std::pow(wrapd(i, d.n[0]), 2) + std::pow(wrapd(j, d.n[1]), 2) +
            std::pow(wrapd(k, d.n[2]), 2));
        const double v = std::max(0.0, 1.0 - dist / r3);
        ker.at(i, j, k) = v;
        sum += v;
      }
  if (sum <= 0.0) throw invalid_input("mollify: empty kernel");
  for (double& v : ker.v) v /= sum;

  const int n0 = int(d.n[2]), n1 = int(d.n[1]), n2 = int(d.n[0]);
  const int64_t nc = int64_t(n0) * n1 * (n2 / 2 + 1);
  fftw_complex* kspec = fftw_alloc_complex(size_t(nc));
  fftw_complex* fspec = fftw_alloc_complex(size_t(nc));
  std::vector<double> tmp(ker.v);
  fftw_plan pk, pf, pi;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex);
    pk = fftw_plan_dft_r2c_3d(n0, n1, n2, tmp.data(), kspec, FFTW_ESTIMATE);
  }
  fftw_execute(pk);
  Form1 out = f;
  const double scale = 1.0 / (double(n0) * n1 * n2);
  for (int c = 0; c < 3; ++c) {
    std::vector<double> buf(out.comp[c].v);
    {
      std::lock_guard<std::mutex> lock(fftw_mutex);
      pf = fftw_plan_dft_r2c_3d(n0, n1, n2, buf.data(), fspec, FFTW_ESTIMATE);
      pi = fftw_plan_dft_c2r_3d(n0, n1, n2, fspec, out.comp[c].v.data(), FFTW_ESTIMATE);
    }
    fftw_execute(pf);
    for (int64_t t = 0; t < nc; ++t) {
      // K^3 * F, complex arithmetic
      const double kr = kspec[t][0], ki = kspec[t][1];
      // k^2
      double ar = kr * kr - ki * ki, ai = 2.0 * kr * ki;
      // k^3
      const double br = ar * kr - ai * ki, bi = ar * ki + ai * kr;
      const double fr = fspec[t][0], fi = fspec[t][1];
      fspec[t][0] = (br * fr - bi * fi) * scale;
      fspec[t][1] = (br * fi + bi * fr) * scale;
    }
    fftw_execute(pi);
    {
      std::lock_guard<std::mutex> lock(fftw_mutex);
      fftw_destroy_plan(pf);
      fftw_destroy_plan(pi);
    }
  }
  {
    std::lock_guard<std::mutex> lock(fftw_mutex);
    fftw_destroy_plan(pk);
    fftw_free(kspec);
    fftw_free(fspec);
  }
  return out;
}

}  // namespace gl3d
