#include "gl3d/biot_savart.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "gl3d/rational.hpp"

namespace gl3d {

namespace {
constexpr double kGL8x[8] = {-0.9602898564975363, -0.7966664774136267,
                             -0.5255324099163290, -0.1834346424956498,
                             0.1834346424956498,  0.5255324099163290,
                             0.7966664774136267,  0.9602898564975363};
constexpr double kGL8w[8] = {0.1012285362903763, 0.2223810344533745,
                             0.3137066458778873, 0.3626837833783620,
                             0.3626837833783620, 0.3137066458778873,
                             0.2223810344533745, 0.1012285362903763};
}  // namespace

Vec3 biot_savart_segment(const Segment& s, const Vec3& x, bool* on_segment) {
  if (on_segment) *on_segment = false;
  const double L = s.length();
  if (L == 0.0) return {0, 0, 0};
  const Vec3 t = (s.b - s.a) / L;
  const Vec3 w = x - s.a;
  const double z = dot(w, t);
  const Vec3 rv = w - t * z;
  const double rho2 = norm2(rv);
  const double rho = std::sqrt(rho2);
  if (rho <= 1e-14 * L && z >= -1e-14 * L && z <= L * (1.0 + 1e-14)) {
    if (on_segment) *on_segment = true;
    return {0, 0, 0};
  }
  const double a = L - z;  // signed distance to the far end along the axis
  const double b = z;      // signed distance from the near end
  const double ra = std::sqrt(rho2 + a * a), rb = std::sqrt(rho2 + b * b);
  double bracket;
  if (a >= 0.0 && b >= 0.0) {
    bracket = a / ra + b / rb;  // both positive: no cancellation
  } else {
    // both evaluation heights on the same side: stable difference form
    //   f(p) - f(q) = rho^2 (p^2 - q^2) / (ra rb (p rb + q ra)) for p,q > 0
    const double p = std::max(std::fabs(a), std::fabs(b));
    const double q = std::min(std::fabs(a), std::fabs(b));
    const double rp = std::sqrt(rho2 + p * p), rq = std::sqrt(rho2 + q * q);
    bracket = rho2 * (p * p - q * q) / (rp * rq * (p * rq + q * rp));
  }
  if (rho2 == 0.0) return {0, 0, 0};  // beyond an endpoint on the axis: field vanishes
  const Vec3 azim = cross(t, rv);  // |azim| = rho
  return azim * (bracket / (4.0 * M_PI * rho2));
}

namespace {

// integral of field . dir over the straight edge x0 + u * dir, u in [u0,u1]
double edge_integral_adaptive(const Segment& seg, const Vec3& x0, const Vec3& dir,
                              double u0, double u1, double coarse, int depth,
                              const QuadratureOptions& opts) {
  const double um = 0.5 * (u0 + u1);
  auto gl8 = [&](double a, double b) {
    double s = 0.0;
    const double hw = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int t = 0; t < 8; ++t) {
      const Vec3 x = x0 + dir * (mid + hw * kGL8x[t]);
      s += kGL8w[t] * dot(biot_savart_segment(seg, x), dir);
    }
    return s * hw;
  };
  const double left = gl8(u0, um), right = gl8(um, u1);
  const double fine = left + right;
  if (depth >= opts.max_depth ||
      std::fabs(fine - coarse) <= opts.tolerance * (1.0 + std::fabs(fine)))
    return fine;
  return edge_integral_adaptive(seg, x0, dir, u0, um, left, depth + 1, opts) +
         edge_integral_adaptive(seg, x0, dir, um, u1, right, depth + 1, opts);
}

double edge_integral(const Segment& seg, const Vec3& x0, const Vec3& dir,
                     const QuadratureOptions& opts) {
  // dir has the edge length as magnitude; integrate over u in [0,1]
  auto gl8 = [&](double a, double b) {
    double s = 0.0;
    const double hw = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int t = 0; t < 8; ++t) {
      const Vec3 x = x0 + dir * (mid + hw * kGL8x[t]);
      s += kGL8w[t] * dot(biot_savart_segment(seg, x), dir);
    }
    return s * hw;
  };
  const double elen = norm(dir);
  const Segment edge{x0, x0 + dir};
  const double dist = segment_segment_distance(seg, edge);
  const double coarse = gl8(0.0, 1.0);
  if (dist >= opts.near_factor * elen) return coarse;
  return edge_integral_adaptive(seg, x0, dir, 0.0, 1.0, coarse, 0, opts);
}

template <class Fn>
void parallel_for(int64_t n, int threads, Fn&& fn) {
  int nt = threads > 0 ? threads : int(std::thread::hardware_concurrency());
  if (nt < 1) nt = 1;
  if (n < 64 || nt == 1) {
    for (int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int64_t> next(0);
  std::vector<std::thread> pool;
  for (int t = 0; t < nt; ++t)
    pool.emplace_back([&]() {
      while (true) {
        const int64_t chunk = 256;
        const int64_t lo = next.fetch_add(chunk);
        if (lo >= n) return;
        const int64_t hi = std::min(n, lo + chunk);
        for (int64_t i = lo; i < hi; ++i) fn(i);
      }
    });
  for (auto& th : pool) th.join();
}

}  // namespace

Form1 biot_savart_field(const VortexSystem& gamma, const GridSpec& g,
                        const QuadratureOptions& opts) {
  Form1 out(g);
  const double dx = g.spacing;
  for (int axis = 0; axis < 3; ++axis) {
    Vec3 dir{0, 0, 0};
    dir[axis] = dx;
    const Dims3 d = out.comp[axis].dims;
    GridArray& arr = out.comp[axis];
    parallel_for(d.size(), opts.threads, [&](int64_t idx) {
      const int64_t i = idx % d.n[0];
      const int64_t j = (idx / d.n[0]) % d.n[1];
      const int64_t k = idx / (d.n[0] * d.n[1]);
      const Vec3 x0 = g.vertex_pos(i, j, k);
      double acc = 0.0;
      for (const Segment& seg : gamma.segments)
        acc += edge_integral(seg, x0, dir, opts);
      arr.v[size_t(idx)] = gamma.weight_h * acc / dx;
    });
  }
  return out;
}

namespace {

// floor of a transverse coordinate under the lexicographic curve shift
// (-e, -e^2, -e^3), e -> 0+. At a crossing of an axis-a plane the shifted
// transverse coordinate c moves by e_a * slope - e_c, so exact-integer ties
// resolve by the slope sign when a < c and downward otherwise.
mpz_class floor_perturbed(const rat& y, int axis, int c, int slope_sign) {
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), y.get_num().get_mpz_t(), y.get_den().get_mpz_t());
  if (y.get_den() != 1) return fl;
  if (axis < c && slope_sign > 0) return fl;  // pushed just above the plane
  return fl - 1;
}

}  // namespace

Form2 rasterize_to_form2(const VortexSystem& gamma, const GridSpec& g) {
  // The whole curve is treated as shifted by the lexicographic infinitesimal
  // (-e, -e^2, -e^3): an upward sweep crosses the integer planes in [a, b),
  // a downward one those in [b, a), and exact-integer transverse ties follow
  // the shifted crossing point. All counted crossings are then the exact
  // boundary crossings of one generic perturbed curve, so d(raster)
  // telescopes to the endpoint charges even through degenerate touches and
  // diagonal edge passes.
  //
  // Closed systems must share endpoint coordinates bitwise; a segment that
  // closes through the periodic wrap needs the torus period N * spacing to
  // be exactly representable (dyadic spacing), otherwise the lattice span
  // differs from N and a spurious crossing appears.
  Form2 out(g);
  const rat dx(g.spacing);
  const RVec3 origin = to_rvec3(g.origin);
  const double inv_area = 1.0 / (g.spacing * g.spacing);
  for (const Segment& s : gamma.segments) {
    const RVec3 A = to_rvec3(s.a), B = to_rvec3(s.b);
    for (int axis = 0; axis < 3; ++axis) {
      const rat a = (A[size_t(axis)] - origin[size_t(axis)]) / dx;
      const rat b = (B[size_t(axis)] - origin[size_t(axis)]) / dx;
      if (a == b) continue;
      const int sign = b > a ? 1 : -1;
      const rat lo = sign > 0 ? a : b, hi = sign > 0 ? b : a;
      // planes in [lo, hi): from ceil(lo) to (hi integer ? hi - 1 : floor(hi))
      mpz_class mlo, mhi;
      mpz_cdiv_q(mlo.get_mpz_t(), lo.get_num().get_mpz_t(), lo.get_den().get_mpz_t());
      mpz_fdiv_q(mhi.get_mpz_t(), hi.get_num().get_mpz_t(), hi.get_den().get_mpz_t());
      if (hi.get_den() == 1) mhi -= 1;
      for (mpz_class m = mlo; m <= mhi; ++m) {
        const rat plane(m);
        const rat t = (plane - a) / (b - a);
        std::array<int64_t, 3> f{};
        bool ok = true;
        for (int c = 0; c < 3; ++c) {
          if (c == axis) {
            f[size_t(c)] = m.get_si();
            continue;
          }
          const rat yc = (A[size_t(c)] + t * (B[size_t(c)] - A[size_t(c)]) -
                          origin[size_t(c)]) / dx;
          const int slope_sign =
              sgn(B[size_t(c)] - A[size_t(c)]) * sgn(B[size_t(axis)] - A[size_t(axis)]);
          f[size_t(c)] = floor_perturbed(yc, axis, c, slope_sign).get_si();
        }
        const Dims3 fd = out.comp[axis].dims;
        if (g.periodic()) {
          for (int c = 0; c < 3; ++c) f[size_t(c)] = detail::wrap(f[size_t(c)], fd.n[c]);
        } else if (!fd.contains(f[0], f[1], f[2])) {
          ok = false;
        }
        if (!ok)
          throw contract_error("rasterize: segment crossing outside the box grid");
        out.comp[axis].at(f[0], f[1], f[2]) +=
            double(sign) * gamma.weight_h * inv_area;
      }
    }
  }
  return out;
}

Form1 spectral_vortex_field(const Form2& q_raster, const PoissonConfig& cfg) {
  Form2 psi = poisson_inverse(q_raster, cfg);
  return codifferential(psi);
}

Form1 harmonic_correction(const VortexSystem& gamma, const GridSpec& g,
                          const PoissonConfig& cfg, const QuadratureOptions& opts) {
  Form2 q = rasterize_to_form2(gamma, g);
  Form1 spectral = spectral_vortex_field(q, cfg);
  Form1 bs = biot_savart_field(gamma, g, opts);
  for (int c = 0; c < 3; ++c)
    for (size_t i = 0; i < spectral.comp[c].v.size(); ++i)
      spectral.comp[c].v[i] -= bs.comp[c].v[i];
  return spectral;
}

namespace {

double loop_integral(const std::vector<Vec3>& loop, const Segment& seg,
                     const QuadratureOptions& opts) {
  double acc = 0.0;
  const size_t n = loop.size();
  for (size_t t = 0; t < n; ++t) {
    const Vec3 a = loop[t], b = loop[(t + 1) % n];
    if (a == b) continue;
    acc += edge_integral(seg, a, b - a, opts);
  }
  return acc;
}

}  // namespace

LinkingResult linking_number(const std::vector<Vec3>& loop, const VortexSystem& gamma,
                             const QuadratureOptions& opts) {
  if (loop.size() < 3) throw invalid_input("linking_number: need a closed polyline");
  for (const Vec3& x : loop)
    for (const Segment& s : gamma.segments)
      if (point_segment_distance(x, s) <= 0.0)
        throw invalid_input("linking_number: probe loop touches the system");
  double acc = 0.0;
  for (const Segment& s : gamma.segments) acc += loop_integral(loop, s, opts);
  LinkingResult r;
  r.link = std::lround(acc);
  r.residual = std::fabs(acc - double(r.link));
  return r;
}

}  // namespace gl3d
