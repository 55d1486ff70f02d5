#include "gl3d/vortex_extract.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gl3d/errors.hpp"

namespace gl3d {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

CoarseGrid CoarseGrid::fit(const GridSpec& g, int64_t step,
                           const std::array<int64_t, 3>& offset) {
  if (step < 1) throw invalid_input("CoarseGrid: step must be >= 1");
  CoarseGrid cg;
  cg.step = step;
  cg.offset = offset;
  for (int a = 0; a < 3; ++a) {
    if (offset[a] < 0 || offset[a] >= step)
      throw invalid_input("CoarseGrid: offset out of [0, step)");
    if (g.periodic()) {
      if (g.dims[a] % step != 0)
        throw invalid_input("CoarseGrid: periodic dims must be divisible by step");
      cg.ncells[a] = g.dims[a] / step;
    } else {
      cg.ncells[a] = (g.dims[a] - 1 - offset[a]) / step;
      if (cg.ncells[a] < 1) throw invalid_input("CoarseGrid: no full coarse cell fits");
    }
  }
  return cg;
}

Dims3 PlaquetteDegrees::face_dims(int axis) const {
  Dims3 d;
  for (int a = 0; a < 3; ++a) {
    if (field_grid.periodic())
      d.n[a] = coarse.ncells[a];
    else
      d.n[a] = a == axis ? coarse.ncells[a] + 1 : coarse.ncells[a];
  }
  return d;
}

int64_t PlaquetteDegrees::face_index(const CoarseFace& f) const {
  return face_dims(f.axis).idx(f.corner[0], f.corner[1], f.corner[2]);
}

std::optional<int> loop_degree(const ComplexField& u,
                               const std::vector<std::array<int64_t, 3>>& verts,
                               double min_modulus) {
  if (verts.size() < 3) throw invalid_input("loop_degree: need at least 3 vertices");
  double total = 0.0;
  const size_t n = verts.size();
  for (size_t s = 0; s < n; ++s) {
    const auto& a = verts[s];
    const auto& b = verts[(s + 1) % n];
    const cplx ua = u.value(a[0], a[1], a[2]);
    const cplx ub = u.value(b[0], b[1], b[2]);
    if (std::abs(ua) < min_modulus || std::abs(ub) < min_modulus) return std::nullopt;
    total += std::arg(std::conj(ua) * ub);
  }
  return int(std::lround(total / (2.0 * kPi)));
}

std::optional<int> plaquette_degree(const ComplexField& u, const CoarseGrid& cg,
                                    const CoarseFace& face, double min_modulus) {
  const int c = face.axis;
  const int a = (c + 1) % 3, b = (c + 2) % 3;
  auto v0 = cg.corner(face.corner[0], face.corner[1], face.corner[2]);
  if (!u.grid.periodic()) {
    for (int ax = 0; ax < 3; ++ax) {
      int64_t hi = v0[ax];
      if (ax == a || ax == b) hi += cg.step;
      if (v0[ax] < 0 || hi > u.grid.dims[ax] - 1)
        throw invalid_input("plaquette_degree: face outside grid");
    }
  }
  std::vector<std::array<int64_t, 3>> loop;
  loop.reserve(size_t(4 * cg.step));
  auto push = [&](int64_t ia, int64_t ib) {
    std::array<int64_t, 3> v = v0;
    v[a] += ia;
    v[b] += ib;
    loop.push_back(v);
  };
  for (int64_t t = 0; t < cg.step; ++t) push(t, 0);
  for (int64_t t = 0; t < cg.step; ++t) push(cg.step, t);
  for (int64_t t = 0; t < cg.step; ++t) push(cg.step - t, cg.step);
  for (int64_t t = 0; t < cg.step; ++t) push(0, cg.step - t);
  return loop_degree(u, loop, min_modulus);
}

namespace {

// Pointwise energy density surrogate used for offset selection: gradient
// part plus the GL well, both O(1) away from cores and divergent at them.
std::vector<double> vertex_energy_density(const ComplexField& u) {
  const GridSpec& g = u.grid;
  Dims3 vd = g.vertex_dims();
  std::vector<double> e(size_t(vd.size()), 0.0);
  const double inv2 = 1.0 / (g.spacing * g.spacing);
  Potential W = Potential::ginzburg_landau();
  for (int64_t k = 0; k < vd.n[2]; ++k)
    for (int64_t j = 0; j < vd.n[1]; ++j)
      for (int64_t i = 0; i < vd.n[0]; ++i) {
        double grad = 0.0;
        for (int axis = 0; axis < 3; ++axis) {
          int64_t ea[3] = {axis == 0, axis == 1, axis == 2};
          const int64_t fi = i + ea[0], fj = j + ea[1], fk = k + ea[2];
          const int64_t bi = i - ea[0], bj = j - ea[1], bk = k - ea[2];
          if (g.periodic() || fi <= g.dims[0] - 1) {
            if (g.periodic() || (fj <= g.dims[1] - 1 && fk <= g.dims[2] - 1))
              grad += 0.5 * std::norm(u.value(fi, fj, fk) - u.value(i, j, k)) * inv2;
          }
          if (g.periodic() || (bi >= 0 && bj >= 0 && bk >= 0))
            grad += 0.5 * std::norm(u.value(i, j, k) - u.value(bi, bj, bk)) * inv2;
        }
        e[size_t(vd.idx(i, j, k))] = 0.5 * grad + W(u.value(i, j, k));
      }
  return e;
}

}  // namespace

std::array<int64_t, 3> choose_offset(const ComplexField& u, int64_t step, int K,
                                     uint64_t seed) {
  if (K < 1) throw invalid_input("choose_offset: K must be >= 1");
  const GridSpec& g = u.grid;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int64_t> dist(0, step - 1);
  std::vector<std::array<int64_t, 3>> cands;
  cands.reserve(size_t(K));
  for (int t = 0; t < K; ++t) cands.push_back({dist(rng), dist(rng), dist(rng)});

  const std::vector<double> e = vertex_energy_density(u);
  Dims3 vd = g.vertex_dims();
  const double ell = double(step) * g.spacing;
  double best = std::numeric_limits<double>::infinity();
  std::array<int64_t, 3> best_off = cands[0];
  for (const auto& off : cands) {
    double e2 = 0.0, e1 = 0.0;
    for (int64_t k = 0; k < vd.n[2]; ++k)
      for (int64_t j = 0; j < vd.n[1]; ++j)
        for (int64_t i = 0; i < vd.n[0]; ++i) {
          const int64_t r[3] = {(i - off[0]) % step, (j - off[1]) % step,
                                (k - off[2]) % step};
          int m = 0;
          for (int a = 0; a < 3; ++a)
            if (r[a] == 0) ++m;
          if (m == 0) continue;
          const double ev = e[size_t(vd.idx(i, j, k))];
          e2 += double(m) * ev * g.spacing * g.spacing;
          if (m >= 2) e1 += double(m * (m - 1) / 2) * ev * g.spacing;
        }
    const double score = e2 + ell * e1;
    if (score < best) {
      best = score;
      best_off = off;
    }
  }
  return best_off;
}

PlaquetteDegrees compute_plaquette_degrees(const ComplexField& u, const CoarseGrid& cg,
                                           double min_modulus,
                                           std::vector<CoarseFace>* invalid) {
  PlaquetteDegrees pd;
  pd.field_grid = u.grid;
  pd.coarse = cg;
  pd.min_modulus = min_modulus;
  for (int axis = 0; axis < 3; ++axis) {
    Dims3 fd = pd.face_dims(axis);
    pd.degrees[axis].assign(size_t(fd.size()), 0);
    pd.valid[axis].assign(size_t(fd.size()), 1);
    for (int64_t k = 0; k < fd.n[2]; ++k)
      for (int64_t j = 0; j < fd.n[1]; ++j)
        for (int64_t i = 0; i < fd.n[0]; ++i) {
          CoarseFace f{{i, j, k}, axis};
          auto d = plaquette_degree(u, cg, f, min_modulus);
          const size_t idx = size_t(fd.idx(i, j, k));
          if (d) {
            pd.degrees[axis][idx] = *d;
          } else {
            pd.valid[axis][idx] = 0;
            if (invalid) invalid->push_back(f);
          }
        }
  }
  return pd;
}

bool PlaquetteDegrees::closed() const {
  // signed sum of face degrees over every coarse cell boundary
  for (int64_t K = 0; K < coarse.ncells[2]; ++K)
    for (int64_t J = 0; J < coarse.ncells[1]; ++J)
      for (int64_t I = 0; I < coarse.ncells[0]; ++I) {
        int64_t s = 0;
        for (int axis = 0; axis < 3; ++axis) {
          Dims3 fd = face_dims(axis);
          std::array<int64_t, 3> lo{I, J, K}, hi{I, J, K};
          hi[axis] += 1;
          if (field_grid.periodic()) hi[axis] %= coarse.ncells[axis];
          s += degrees[axis][size_t(fd.idx(hi[0], hi[1], hi[2]))];
          s -= degrees[axis][size_t(fd.idx(lo[0], lo[1], lo[2]))];
        }
        if (s != 0) return false;
      }
  return true;
}

double DiscreteVorticity::mass() const {
  double s = 0.0;
  for (const DualEdge& e : dual_edges) s += kPi * cell_size() * std::abs(e.weight);
  return s;
}

GridSpec DiscreteVorticity::coarse_grid_spec() const {
  GridSpec cgs;
  cgs.mode = field_grid.mode;
  cgs.spacing = cell_size();
  for (int a = 0; a < 3; ++a) {
    cgs.dims[a] = field_grid.periodic() ? coarse.ncells[a] : coarse.ncells[a] + 1;
    cgs.origin[a] = field_grid.origin[a] + field_grid.spacing * double(coarse.offset[a]);
  }
  return cgs;
}

Form2 DiscreteVorticity::as_form2() const {
  Form2 w(coarse_grid_spec());
  const double ell = cell_size();
  for (const DualEdge& e : dual_edges)
    w.comp[e.axis].at(e.i, e.j, e.k) += kPi * double(e.weight) / ell;
  return w;
}

PointMeasure DiscreteVorticity::as_measure() const {
  PointMeasure mu;
  const double ell = cell_size();
  GridSpec cgs = coarse_grid_spec();
  for (const DualEdge& e : dual_edges) {
    const int b = (e.axis + 1) % 3, c = (e.axis + 2) % 3;
    Vec3 x = cgs.vertex_pos(e.i, e.j, e.k);
    x[b] += 0.5 * ell;
    x[c] += 0.5 * ell;
    mu.add(x, kPi * double(e.weight) * ell, e.axis);
  }
  return mu;
}

Segment DiscreteVorticity::dual_segment(const DualEdge& e) const {
  const double ell = cell_size();
  GridSpec cgs = coarse_grid_spec();
  const int b = (e.axis + 1) % 3, c = (e.axis + 2) % 3;
  Vec3 x = cgs.vertex_pos(e.i, e.j, e.k);
  x[b] += 0.5 * ell;
  x[c] += 0.5 * ell;
  Vec3 lo = x, hi = x;
  lo[e.axis] -= 0.5 * ell;
  hi[e.axis] += 0.5 * ell;
  return {lo, hi};
}

bool DiscreteVorticity::closed() const {
  // net integer flux out of every coarse cell
  std::array<std::vector<int64_t>, 3> w;
  PlaquetteDegrees pd;
  pd.field_grid = field_grid;
  pd.coarse = coarse;
  for (int axis = 0; axis < 3; ++axis) w[axis].assign(size_t(pd.face_dims(axis).size()), 0);
  for (const DualEdge& e : dual_edges)
    w[e.axis][size_t(pd.face_dims(e.axis).idx(e.i, e.j, e.k))] += e.weight;
  for (int64_t K = 0; K < coarse.ncells[2]; ++K)
    for (int64_t J = 0; J < coarse.ncells[1]; ++J)
      for (int64_t I = 0; I < coarse.ncells[0]; ++I) {
        int64_t s = 0;
        for (int axis = 0; axis < 3; ++axis) {
          std::array<int64_t, 3> lo{I, J, K}, hi{I, J, K};
          hi[axis] += 1;
          if (field_grid.periodic()) hi[axis] %= coarse.ncells[axis];
          s += w[axis][size_t(pd.face_dims(axis).idx(hi[0], hi[1], hi[2]))];
          s -= w[axis][size_t(pd.face_dims(axis).idx(lo[0], lo[1], lo[2]))];
        }
        if (s != 0) return false;
      }
  return true;
}

DiscreteVorticity extract_vorticity(const ComplexField& u, int64_t step,
                                    const std::array<int64_t, 3>& offset,
                                    double min_modulus, ExtractionFailure* failure) {
  CoarseGrid cg = CoarseGrid::fit(u.grid, step, offset);
  std::vector<CoarseFace> invalid;
  PlaquetteDegrees pd = compute_plaquette_degrees(u, cg, min_modulus, &invalid);
  if (!invalid.empty()) {
    if (failure) failure->invalid_faces = invalid;
    throw contract_error("extract_vorticity: " + std::to_string(invalid.size()) +
                         " invalid plaquettes (|u| below min_modulus on boundary)");
  }
  DiscreteVorticity nu;
  nu.field_grid = u.grid;
  nu.coarse = cg;
  for (int axis = 0; axis < 3; ++axis) {
    Dims3 fd = pd.face_dims(axis);
    for (int64_t k = 0; k < fd.n[2]; ++k)
      for (int64_t j = 0; j < fd.n[1]; ++j)
        for (int64_t i = 0; i < fd.n[0]; ++i) {
          const int d = pd.degrees[axis][size_t(fd.idx(i, j, k))];
          if (d != 0) nu.dual_edges.push_back({i, j, k, axis, d});
        }
  }
  return nu;
}

double w11_gap(const Form2& Ju, const DiscreteVorticity& nu, double R, int max_atoms) {
  const GridSpec& g = Ju.grid;
  if (!g.same_layout(nu.field_grid)) throw invalid_input("w11_gap: grid mismatch");
  if (R <= 0.0) {
    Vec3 ext{g.spacing * double(g.dims[0] - (g.periodic() ? 0 : 1)),
             g.spacing * double(g.dims[1] - (g.periodic() ? 0 : 1)),
             g.spacing * double(g.dims[2] - (g.periodic() ? 0 : 1))};
    R = norm(ext);
  }
  // conservative aggregation of Ju onto coarse face centers
  PlaquetteDegrees pd;
  pd.field_grid = nu.field_grid;
  pd.coarse = nu.coarse;
  GridSpec cgs = nu.coarse_grid_spec();
  PointMeasure mu;
  const double vol = g.spacing * g.spacing * g.spacing;
  const int64_t step = nu.coarse.step;
  std::array<std::vector<double>, 3> agg;
  for (int axis = 0; axis < 3; ++axis) {
    Dims3 fd = pd.face_dims(axis);
    agg[axis].assign(size_t(fd.size()), 0.0);
    const int b = (axis + 1) % 3, c = (axis + 2) % 3;
    const Dims3& find = Ju.comp[axis].dims;
    for (int64_t k = 0; k < find.n[2]; ++k)
      for (int64_t j = 0; j < find.n[1]; ++j)
        for (int64_t i = 0; i < find.n[0]; ++i) {
          const double val = Ju.comp[axis].at(i, j, k);
          if (val == 0.0) continue;
          // face center in field-lattice units
          double ctr[3] = {double(i), double(j), double(k)};
          ctr[b] += 0.5;
          ctr[c] += 0.5;
          std::array<int64_t, 3> bin;
          for (int a2 = 0; a2 < 3; ++a2) {
            const double t = (ctr[a2] - double(nu.coarse.offset[a2])) / double(step);
            int64_t idx = a2 == axis ? int64_t(std::llround(t))
                                     : int64_t(std::floor(t));
            const int64_t hi = fd.n[a2] - 1;
            if (idx < 0) idx = 0;
            if (idx > hi) idx = hi;
            bin[a2] = idx;
          }
          agg[axis][size_t(fd.idx(bin[0], bin[1], bin[2]))] += val * vol;
        }
    const double ell = nu.cell_size();
    for (int64_t k = 0; k < fd.n[2]; ++k)
      for (int64_t j = 0; j < fd.n[1]; ++j)
        for (int64_t i = 0; i < fd.n[0]; ++i) {
          const double w = agg[axis][size_t(fd.idx(i, j, k))];
          if (w == 0.0) continue;
          Vec3 x = cgs.vertex_pos(i, j, k);
          x[b] += 0.5 * ell;
          x[c] += 0.5 * ell;
          mu.add(x, w, axis);
        }
  }
  PointMeasure nv = nu.as_measure();
  for (const auto& a : nv.atoms) mu.add(a.x, -a.w, a.component);
  if (int(mu.atoms.size()) > max_atoms) {
    std::sort(mu.atoms.begin(), mu.atoms.end(),
              [](const PointMeasure::Atom& a, const PointMeasure::Atom& b) {
                return std::fabs(a.w) > std::fabs(b.w);
              });
    double dropped = 0.0;
    for (size_t t = size_t(max_atoms); t < mu.atoms.size(); ++t)
      dropped += std::fabs(mu.atoms[t].w);
    mu.atoms.resize(size_t(max_atoms));
    return flat_norm_w11(mu, R) + R * dropped;
  }
  return flat_norm_w11(mu, R);
}

}  // namespace gl3d
