#include "gl3d/dec.hpp"

#include <cmath>

namespace gl3d {

namespace {
inline void cyclic(int c, int& a, int& b) {
  a = (c + 1) % 3;
  b = (c + 2) % 3;
}
}  // namespace

Form1 exterior_derivative(const Form0& f) {
  const GridSpec& g = f.grid;
  Form1 out(g);
  const double inv = 1.0 / g.spacing;
  for (int axis = 0; axis < 3; ++axis) {
    Dims3 d = out.comp[axis].dims;
    int64_t ea[3] = {axis == 0, axis == 1, axis == 2};
    for (int64_t k = 0; k < d.n[2]; ++k)
      for (int64_t j = 0; j < d.n[1]; ++j)
        for (int64_t i = 0; i < d.n[0]; ++i)
          out.comp[axis].at(i, j, k) =
              (f.value(i + ea[0], j + ea[1], k + ea[2]) - f.value(i, j, k)) * inv;
  }
  return out;
}

Form2 exterior_derivative(const Form1& w) {
  const GridSpec& g = w.grid;
  Form2 out(g);
  const double inv = 1.0 / g.spacing;
  for (int c = 0; c < 3; ++c) {
    int a, b;
    cyclic(c, a, b);
    int64_t ea[3] = {a == 0, a == 1, a == 2};
    int64_t eb[3] = {b == 0, b == 1, b == 2};
    Dims3 d = out.comp[c].dims;
    for (int64_t k = 0; k < d.n[2]; ++k)
      for (int64_t j = 0; j < d.n[1]; ++j)
        for (int64_t i = 0; i < d.n[0]; ++i) {
          // circulation of w around the (a,b) plaquette anchored at (i,j,k)
          const double v = (w.value(a, i, j, k) +
                            w.value(b, i + ea[0], j + ea[1], k + ea[2])) -
                           (w.value(a, i + eb[0], j + eb[1], k + eb[2]) +
                            w.value(b, i, j, k));
          out.comp[c].at(i, j, k) = v * inv;
        }
  }
  return out;
}

Form3 exterior_derivative(const Form2& s) {
  const GridSpec& g = s.grid;
  Form3 out(g);
  const double inv = 1.0 / g.spacing;
  Dims3 d = out.a.dims;
  for (int64_t k = 0; k < d.n[2]; ++k)
    for (int64_t j = 0; j < d.n[1]; ++j)
      for (int64_t i = 0; i < d.n[0]; ++i) {
        double v = 0.0;
        v += s.value(0, i + 1, j, k) - s.value(0, i, j, k);
        v += s.value(1, i, j + 1, k) - s.value(1, i, j, k);
        v += s.value(2, i, j, k + 1) - s.value(2, i, j, k);
        out.a.at(i, j, k) = v * inv;
      }
  return out;
}

Form0 codifferential(const Form1& w) {
  const GridSpec& g = w.grid;
  Form0 out(g);
  const double inv = 1.0 / g.spacing;
  Dims3 d = out.a.dims;
  for (int64_t k = 0; k < d.n[2]; ++k)
    for (int64_t j = 0; j < d.n[1]; ++j)
      for (int64_t i = 0; i < d.n[0]; ++i) {
        double v = 0.0;
        v += w.value(0, i - 1, j, k) - w.value(0, i, j, k);
        v += w.value(1, i, j - 1, k) - w.value(1, i, j, k);
        v += w.value(2, i, j, k - 1) - w.value(2, i, j, k);
        out.a.at(i, j, k) = v * inv;
      }
  return out;
}

Form1 codifferential(const Form2& s) {
  const GridSpec& g = s.grid;
  Form1 out(g);
  const double inv = 1.0 / g.spacing;
  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3, c = (a + 2) % 3;  // (a,b,c) cyclic
    int64_t eb[3] = {b == 0, b == 1, b == 2};
    int64_t ec[3] = {c == 0, c == 1, c == 2};
    Dims3 d = out.comp[a].dims;
    for (int64_t k = 0; k < d.n[2]; ++k)
      for (int64_t j = 0; j < d.n[1]; ++j)
        for (int64_t i = 0; i < d.n[0]; ++i) {
          const double v = (s.value(c, i, j, k) -
                            s.value(c, i - eb[0], j - eb[1], k - eb[2])) -
                           (s.value(b, i, j, k) -
                            s.value(b, i - ec[0], j - ec[1], k - ec[2]));
          out.comp[a].at(i, j, k) = v * inv;
        }
  }
  return out;
}

Form2 codifferential(const Form3& r) {
  const GridSpec& g = r.grid;
  Form2 out(g);
  const double inv = 1.0 / g.spacing;
  for (int a = 0; a < 3; ++a) {
    int64_t ea[3] = {a == 0, a == 1, a == 2};
    Dims3 d = out.comp[a].dims;
    for (int64_t k = 0; k < d.n[2]; ++k)
      for (int64_t j = 0; j < d.n[1]; ++j)
        for (int64_t i = 0; i < d.n[0]; ++i)
          out.comp[a].at(i, j, k) =
              (r.value(i - ea[0], j - ea[1], k - ea[2]) - r.value(i, j, k)) * inv;
  }
  return out;
}

Form2 hodge_star(const Form1& w) {
  if (!w.grid.periodic())
    throw invalid_input("hodge_star: componentwise star requires periodic mode");
  Form2 out(w.grid);
  out.comp = w.comp;
  return out;
}

Form1 hodge_star(const Form2& s) {
  if (!s.grid.periodic())
    throw invalid_input("hodge_star: componentwise star requires periodic mode");
  Form1 out(s.grid);
  out.comp = s.comp;
  return out;
}

namespace {
double dot_arrays(const GridArray& a, const GridArray& b, double w) {
  double s = 0.0;
  for (size_t i = 0; i < a.v.size(); ++i) s += a.v[i] * b.v[i];
  return s * w;
}
template <class F>
double dot_dir(const F& a, const F& b) {
  if (!a.grid.same_layout(b.grid)) throw invalid_input("dot: grid mismatch");
  const double w = a.grid.spacing * a.grid.spacing * a.grid.spacing;
  double s = 0.0;
  for (int c = 0; c < 3; ++c) s += dot_arrays(a.comp[c], b.comp[c], w);
  return s;
}
}  // namespace

double dot(const Form0& a, const Form0& b) {
  if (!a.grid.same_layout(b.grid)) throw invalid_input("dot: grid mismatch");
  const double w = a.grid.spacing * a.grid.spacing * a.grid.spacing;
  return dot_arrays(a.a, b.a, w);
}
double dot(const Form1& a, const Form1& b) { return dot_dir(a, b); }
double dot(const Form2& a, const Form2& b) { return dot_dir(a, b); }
double dot(const Form3& a, const Form3& b) {
  if (!a.grid.same_layout(b.grid)) throw invalid_input("dot: grid mismatch");
  const double w = a.grid.spacing * a.grid.spacing * a.grid.spacing;
  return dot_arrays(a.a, b.a, w);
}

Form1 momentum(const ComplexField& u) {
  const GridSpec& g = u.grid;
  Form1 out(g);
  const double inv = 1.0 / g.spacing;
  for (int axis = 0; axis < 3; ++axis) {
    int64_t ea[3] = {axis == 0, axis == 1, axis == 2};
    Dims3 d = out.comp[axis].dims;
    for (int64_t k = 0; k < d.n[2]; ++k)
      for (int64_t j = 0; j < d.n[1]; ++j)
        for (int64_t i = 0; i < d.n[0]; ++i) {
          const cplx ua = u.value(i, j, k);
          const cplx ub = u.value(i + ea[0], j + ea[1], k + ea[2]);
          out.comp[axis].at(i, j, k) = std::imag(std::conj(ua) * ub) * inv;
        }
  }
  return out;
}

Form2 jacobian_smooth(const ComplexField& u) {
  Form2 J = exterior_derivative(momentum(u));
  for (int c = 0; c < 3; ++c)
    for (double& v : J.comp[c].v) v *= 0.5;
  return J;
}

EnergyResult energy(const ComplexField& u, double eps, const Potential& W,
                    const CellMask* mask) {
  if (!(eps > 0.0)) throw invalid_input("energy: eps must be positive");
  const GridSpec& g = u.grid;
  EnergyResult res;
  res.density = Form3(g);
  Dims3 cd = res.density.a.dims;
  if (mask && !mask->empty() && mask->dims.size() != cd.size())
    throw invalid_input("energy: mask shape mismatch");
  const double inv2 = 1.0 / (g.spacing * g.spacing);
  const double vol = g.spacing * g.spacing * g.spacing;
  const double ie2 = 1.0 / (eps * eps);
  double total = 0.0;
  for (int64_t k = 0; k < cd.n[2]; ++k)
    for (int64_t j = 0; j < cd.n[1]; ++j)
      for (int64_t i = 0; i < cd.n[0]; ++i) {
        if (mask && !mask->empty() && !mask->get(i, j, k)) continue;
        double grad = 0.0;
        for (int axis = 0; axis < 3; ++axis) {
          int64_t ea[3] = {axis == 0, axis == 1, axis == 2};
          const int b = (axis + 1) % 3, c2 = (axis + 2) % 3;
          int64_t eb[3] = {b == 0, b == 1, b == 2};
          int64_t ec[3] = {c2 == 0, c2 == 1, c2 == 2};
          double s = 0.0;
          for (int t = 0; t < 4; ++t) {
            const int64_t oi = i + (t & 1 ? eb[0] : 0) + (t & 2 ? ec[0] : 0);
            const int64_t oj = j + (t & 1 ? eb[1] : 0) + (t & 2 ? ec[1] : 0);
            const int64_t ok = k + (t & 1 ? eb[2] : 0) + (t & 2 ? ec[2] : 0);
            const cplx du =
                u.value(oi + ea[0], oj + ea[1], ok + ea[2]) - u.value(oi, oj, ok);
            s += std::norm(du);
          }
          grad += 0.25 * s * inv2;
        }
        double wavg = 0.0;
        for (int t = 0; t < 8; ++t)
          wavg += W(u.value(i + (t & 1), j + ((t >> 1) & 1), k + ((t >> 2) & 1)));
        wavg *= 0.125;
        const double e = 0.5 * grad + wavg * ie2;
        res.density.a.at(i, j, k) = e;
        total += e * vol;
      }
  res.total = total;
  return res;
}

namespace {
template <class AvgFn>
double lq_cells(const GridSpec& g, double q, AvgFn&& cell_val) {
  if (q < 1.0) throw invalid_input("norm_lq: q must be >= 1");
  const double vol = g.spacing * g.spacing * g.spacing;
  Dims3 cd = g.cell_dims();
  double s = 0.0;
  for (int64_t k = 0; k < cd.n[2]; ++k)
    for (int64_t j = 0; j < cd.n[1]; ++j)
      for (int64_t i = 0; i < cd.n[0]; ++i) s += std::pow(cell_val(i, j, k), q) * vol;
  return std::pow(s, 1.0 / q);
}
}  // namespace

double norm_lq(const Form1& w, double q) {
  return lq_cells(w.grid, q, [&](int64_t i, int64_t j, int64_t k) {
    double m2 = 0.0;
    for (int axis = 0; axis < 3; ++axis) {
      const int b = (axis + 1) % 3, c = (axis + 2) % 3;
      int64_t eb[3] = {b == 0, b == 1, b == 2};
      int64_t ec[3] = {c == 0, c == 1, c == 2};
      const double avg = 0.25 * (w.value(axis, i, j, k) +
                                 w.value(axis, i + eb[0], j + eb[1], k + eb[2]) +
                                 w.value(axis, i + ec[0], j + ec[1], k + ec[2]) +
                                 w.value(axis, i + eb[0] + ec[0], j + eb[1] + ec[1],
                                         k + eb[2] + ec[2]));
      m2 += avg * avg;
    }
    return std::sqrt(m2);
  });
}

double norm_lq(const Form2& w, double q) {
  return lq_cells(w.grid, q, [&](int64_t i, int64_t j, int64_t k) {
    double m2 = 0.0;
    for (int axis = 0; axis < 3; ++axis) {
      int64_t ea[3] = {axis == 0, axis == 1, axis == 2};
      const double avg = 0.5 * (w.value(axis, i, j, k) +
                                w.value(axis, i + ea[0], j + ea[1], k + ea[2]));
      m2 += avg * avg;
    }
    return std::sqrt(m2);
  });
}

double norm_lq(const Form3& w, double q) {
  if (q < 1.0) throw invalid_input("norm_lq: q must be >= 1");
  const double vol = w.grid.spacing * w.grid.spacing * w.grid.spacing;
  double s = 0.0;
  for (const double& v : w.a.v) s += std::pow(std::fabs(v), q) * vol;
  return std::pow(s, 1.0 / q);
}

double mass_norm(const Form2& w) {
  const double area = w.grid.spacing * w.grid.spacing;
  double s = 0.0;
  for (int c = 0; c < 3; ++c)
    for (const double& v : w.comp[c].v) s += std::fabs(v) * area;
  return s;
}

}  // namespace gl3d
