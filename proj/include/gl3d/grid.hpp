#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "gl3d/errors.hpp"
#include "gl3d/geometry.hpp"

namespace gl3d {

enum class BoundaryMode : uint8_t { box = 0, periodic = 1 };

using cplx = std::complex<double>;

// Dimensions of one lexicographically stored array (x fastest).
struct Dims3 {
  std::array<int64_t, 3> n{0, 0, 0};
  int64_t size() const { return n[0] * n[1] * n[2]; }
  int64_t idx(int64_t i, int64_t j, int64_t k) const { return i + n[0] * (j + n[1] * k); }
  bool contains(int64_t i, int64_t j, int64_t k) const {
    return i >= 0 && i < n[0] && j >= 0 && j < n[1] && k >= 0 && k < n[2];
  }
};

// Structured grid with staggered storage: values live on vertices, edges,
// faces and cells. In box mode, arrays hold only the entities that exist;
// in periodic mode every entity count equals the vertex count and indices
// wrap.
struct GridSpec {
  std::array<int64_t, 3> dims{2, 2, 2};  // vertices per axis
  double spacing = 1.0;
  Vec3 origin{0.0, 0.0, 0.0};
  BoundaryMode mode = BoundaryMode::box;

  void validate() const {
    const int64_t lo = mode == BoundaryMode::box ? 2 : 1;
    for (int a = 0; a < 3; ++a)
      if (dims[a] < lo) throw invalid_input("GridSpec: dims too small for boundary mode");
    if (!(spacing > 0.0)) throw invalid_input("GridSpec: spacing must be positive");
  }

  bool periodic() const { return mode == BoundaryMode::periodic; }

  Dims3 vertex_dims() const { return {dims}; }

  Dims3 edge_dims(int axis) const {
    Dims3 d{dims};
    if (!periodic()) d.n[axis] -= 1;
    return d;
  }

  // Face with normal `axis`, spanned by the two other axes.
  Dims3 face_dims(int axis) const {
    Dims3 d{dims};
    if (!periodic())
      for (int a = 0; a < 3; ++a)
        if (a != axis) d.n[a] -= 1;
    return d;
  }

  Dims3 cell_dims() const {
    Dims3 d{dims};
    if (!periodic())
      for (int a = 0; a < 3; ++a) d.n[a] -= 1;
    return d;
  }

  Vec3 vertex_pos(int64_t i, int64_t j, int64_t k) const {
    return {origin.x + spacing * double(i), origin.y + spacing * double(j),
            origin.z + spacing * double(k)};
  }

  bool same_layout(const GridSpec& o) const {
    return dims == o.dims && spacing == o.spacing && mode == o.mode;
  }
};

// One lexicographic array of doubles tied to a Dims3.
struct GridArray {
  Dims3 dims;
  std::vector<double> v;

  GridArray() = default;
  explicit GridArray(Dims3 d) : dims(d), v(size_t(d.size()), 0.0) {}

  double& at(int64_t i, int64_t j, int64_t k) { return v[size_t(dims.idx(i, j, k))]; }
  double at(int64_t i, int64_t j, int64_t k) const { return v[size_t(dims.idx(i, j, k))]; }
};

namespace detail {
inline int64_t wrap(int64_t i, int64_t n) {
  i %= n;
  return i < 0 ? i + n : i;
}
}  // namespace detail

struct Form0 {
  GridSpec grid;
  GridArray a;

  Form0() = default;
  explicit Form0(const GridSpec& g) : grid(g), a(g.vertex_dims()) {}
  double value(int64_t i, int64_t j, int64_t k) const {
    if (grid.periodic())
      return a.at(detail::wrap(i, grid.dims[0]), detail::wrap(j, grid.dims[1]),
                  detail::wrap(k, grid.dims[2]));
    return a.at(i, j, k);
  }
};

// k-form with one directional array per component (k=1: edges, k=2: faces).
template <int K>
struct FormDir {
  static_assert(K == 1 || K == 2);
  GridSpec grid;
  std::array<GridArray, 3> comp;

  FormDir() = default;
  explicit FormDir(const GridSpec& g) : grid(g) {
    for (int a = 0; a < 3; ++a)
      comp[a] = GridArray(K == 1 ? g.edge_dims(a) : g.face_dims(a));
  }

  // Sample with wrapping (periodic) or zero extension (box).
  double value(int axis, int64_t i, int64_t j, int64_t k) const {
    const Dims3& d = comp[axis].dims;
    if (grid.periodic())
      return comp[axis].at(detail::wrap(i, d.n[0]), detail::wrap(j, d.n[1]),
                           detail::wrap(k, d.n[2]));
    if (!d.contains(i, j, k)) return 0.0;
    return comp[axis].at(i, j, k);
  }
};

using Form1 = FormDir<1>;
using Form2 = FormDir<2>;

struct Form3 {
  GridSpec grid;
  GridArray a;

  Form3() = default;
  explicit Form3(const GridSpec& g) : grid(g), a(g.cell_dims()) {}
  double value(int64_t i, int64_t j, int64_t k) const {
    const Dims3& d = a.dims;
    if (grid.periodic())
      return a.at(detail::wrap(i, d.n[0]), detail::wrap(j, d.n[1]), detail::wrap(k, d.n[2]));
    if (!d.contains(i, j, k)) return 0.0;
    return a.at(i, j, k);
  }
};

// Complex order parameter on vertices.
struct ComplexField {
  GridSpec grid;
  std::vector<cplx> values;

  ComplexField() = default;
  explicit ComplexField(const GridSpec& g)
      : grid(g), values(size_t(g.vertex_dims().size()), cplx(0.0, 0.0)) {}

  cplx& at(int64_t i, int64_t j, int64_t k) {
    return values[size_t(grid.vertex_dims().idx(i, j, k))];
  }
  cplx at(int64_t i, int64_t j, int64_t k) const {
    return values[size_t(grid.vertex_dims().idx(i, j, k))];
  }
  cplx value(int64_t i, int64_t j, int64_t k) const {
    if (grid.periodic())
      return at(detail::wrap(i, grid.dims[0]), detail::wrap(j, grid.dims[1]),
                detail::wrap(k, grid.dims[2]));
    return at(i, j, k);
  }
  bool finite() const;
};

// Potential term W(u). Default is the Ginzburg-Landau well (1-|u|^2)^2/4.
struct Potential {
  std::function<double(cplx)> w;
  std::string descriptor = "(1-|u|^2)^2/4";

  static Potential ginzburg_landau() {
    Potential p;
    p.w = [](cplx u) {
      const double m = 1.0 - std::norm(u);
      return 0.25 * m * m;
    };
    return p;
  }
  double operator()(cplx u) const { return w(u); }
};

// Cell mask for energy restriction; empty mask means the whole domain.
struct CellMask {
  Dims3 dims;
  std::vector<uint8_t> on;

  CellMask() = default;
  explicit CellMask(Dims3 d, bool init = true)
      : dims(d), on(size_t(d.size()), init ? 1 : 0) {}
  bool empty() const { return on.empty(); }
  bool get(int64_t i, int64_t j, int64_t k) const { return on[size_t(dims.idx(i, j, k))] != 0; }
  void set(int64_t i, int64_t j, int64_t k, bool b) { on[size_t(dims.idx(i, j, k))] = b ? 1 : 0; }
};

}  // namespace gl3d
