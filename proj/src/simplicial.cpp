#include "gl3d/simplicial.hpp"

#include <algorithm>
#include <set>

#include "gl3d/errors.hpp"

namespace gl3d {

namespace {

// corner masks (bit a = coordinate along axis a) of the five templates
constexpr uint8_t kTemplates[5][4] = {
    {0b000, 0b001, 0b010, 0b100},  // S0  = co{0, e1, e2, e3}
    {0b011, 0b001, 0b010, 0b111},  // S12 = co{e1+e2, e1, e2, e1+e2+e3}
    {0b101, 0b001, 0b100, 0b111},  // S13 = co{e1+e3, e1, e3, e1+e2+e3}
    {0b110, 0b010, 0b100, 0b111},  // S23 = co{e2+e3, e2, e3, e1+e2+e3}
    {0b001, 0b010, 0b100, 0b111},  // co{e1, e2, e3, e1+e2+e3}
};

struct RVecLess {
  bool operator()(const RVec3& a, const RVec3& b) const {
    for (int i = 0; i < 3; ++i) {
      const int c = cmp(a[i], b[i]);
      if (c != 0) return c < 0;
    }
    return false;
  }
};

}  // namespace

rat RationalSimplicialMesh::simplex_volume(int s) const {
  const auto& sx = simplices[size_t(s)];
  const RVec3& p0 = vertices[size_t(sx.v[0])];
  rat d = rdet3(rsub(vertices[size_t(sx.v[1])], p0), rsub(vertices[size_t(sx.v[2])], p0),
                rsub(vertices[size_t(sx.v[3])], p0));
  return d / 6;
}

rat RationalSimplicialMesh::total_volume() const {
  rat v = 0;
  for (int s = 0; s < int(simplices.size()); ++s) v += simplex_volume(s);
  return v;
}

std::array<int, 3> RationalSimplicialMesh::oriented_face(int s, int j) const {
  const auto& v = simplices[size_t(s)].v;
  // boundary of [v0 v1 v2 v3]: (-1)^j [ ... omit j ... ]; flip a pair for odd j
  std::array<int, 3> tri{};
  int t = 0;
  for (int m = 0; m < 4; ++m)
    if (m != j) tri[size_t(t++)] = v[size_t(m)];
  if (j % 2 == 1) std::swap(tri[0], tri[1]);
  return tri;
}

RVec3 RationalSimplicialMesh::barycenter(int s) const {
  const auto& sx = simplices[size_t(s)];
  RVec3 b{0, 0, 0};
  for (int m = 0; m < 4; ++m) b = radd(b, vertices[size_t(sx.v[size_t(m)])]);
  return rscale(rat(1, 4), b);
}

RVec3 RationalSimplicialMesh::face_vector_area(const std::array<int, 3>& tri) const {
  const RVec3& a = vertices[size_t(tri[0])];
  const RVec3& b = vertices[size_t(tri[1])];
  const RVec3& c = vertices[size_t(tri[2])];
  return rscale(rat(1, 2), rcross(rsub(b, a), rsub(c, a)));
}

std::array<double, 4> RationalSimplicialMesh::barycentric(int s, const Vec3& x) const {
  const auto& sx = simplices[size_t(s)];
  Vec3 p[4];
  for (int m = 0; m < 4; ++m) p[m] = to_vec3(vertices[size_t(sx.v[size_t(m)])]);
  const Vec3 e1 = p[1] - p[0], e2 = p[2] - p[0], e3 = p[3] - p[0];
  const double det = dot(e1, cross(e2, e3));
  const Vec3 r = x - p[0];
  const double l1 = dot(r, cross(e2, e3)) / det;
  const double l2 = dot(e1, cross(r, e3)) / det;
  const double l3 = dot(e1, cross(e2, r)) / det;
  return {1.0 - l1 - l2 - l3, l1, l2, l3};
}

std::optional<int> RationalSimplicialMesh::locate(const Vec3& x) const {
  const double s = scale.get_d();
  const int64_t ci = int64_t(std::floor(x.x / s));
  const int64_t cj = int64_t(std::floor(x.y / s));
  const int64_t ck = int64_t(std::floor(x.z / s));
  int fallback = -1;
  // candidate cube by floor division, neighbors absorb boundary roundoff
  for (int64_t dk = 0; dk >= -1; --dk)
    for (int64_t dj = 0; dj >= -1; --dj)
      for (int64_t di = 0; di >= -1; --di) {
        auto it = cube_index.find({ci + di, cj + dj, ck + dk});
        if (it == cube_index.end()) continue;
        for (int t = int(5 * it->second); t < int(5 * it->second + 5); ++t) {
          auto l = barycentric(t, x);
          double lmin = *std::min_element(l.begin(), l.end());
          if (lmin >= 0.0) return t;
          if (lmin >= -1e-12 && fallback < 0) fallback = t;
        }
        if (di == 0 && dj == 0 && dk == 0 && fallback < 0) {
          // interior fast path: the containing cube decides
          auto lc = barycentric(int(5 * it->second), x);
          (void)lc;
        }
      }
  if (fallback >= 0) return fallback;
  return std::nullopt;
}

void RationalSimplicialMesh::validate() const {
  rat expect = rat(int(cubes.size())) * scale * scale * scale;
  if (total_volume() != expect)
    throw contract_error("simplicial mesh: volume mismatch");
  for (int s = 0; s < int(simplices.size()); ++s)
    if (sgn(simplex_volume(s)) <= 0)
      throw contract_error("simplicial mesh: non-positive simplex");
  for (const Face& f : faces) {
    if (f.twin.simplex < 0) continue;
    // interior faces must appear with opposite induced orientations
    auto t0 = oriented_face(f.owner.simplex, f.owner.local);
    auto t1 = oriented_face(f.twin.simplex, f.twin.local);
    // t1 must be an odd permutation of t0 (reversed orientation)
    auto rot = [](std::array<int, 3> t, int r) {
      std::array<int, 3> o{};
      for (int m = 0; m < 3; ++m) o[size_t(m)] = t[size_t((m + r) % 3)];
      return o;
    };
    bool reversed = false;
    std::array<int, 3> rev{t1[0], t1[2], t1[1]};
    for (int r = 0; r < 3; ++r)
      if (rot(rev, r) == t0) reversed = true;
    if (!reversed) throw contract_error("simplicial mesh: face orientation mismatch");
  }
}

RationalSimplicialMesh triangulate_cubes(const std::vector<std::array<int64_t, 3>>& cubes,
                                         const rat& scale) {
  if (sgn(scale) <= 0) throw invalid_input("triangulate_cubes: scale must be positive");
  {
    std::set<std::array<int64_t, 3>> seen(cubes.begin(), cubes.end());
    if (seen.size() != cubes.size())
      throw invalid_input("triangulate_cubes: duplicate cubes");
  }
  RationalSimplicialMesh mesh;
  mesh.cubes = cubes;
  mesh.scale = scale;
  std::map<RVec3, int, RVecLess> vid;
  auto get_vertex = [&](const RVec3& p) {
    auto it = vid.find(p);
    if (it != vid.end()) return it->second;
    const int id = int(mesh.vertices.size());
    mesh.vertices.push_back(p);
    vid.emplace(p, id);
    return id;
  };

  for (int64_t c = 0; c < int64_t(cubes.size()); ++c) {
    const auto& cb = cubes[size_t(c)];
    mesh.cube_index.emplace(cb, c);
    const bool mirror[3] = {(cb[0] % 2 + 2) % 2 == 1, (cb[1] % 2 + 2) % 2 == 1,
                            (cb[2] % 2 + 2) % 2 == 1};
    for (int t = 0; t < 5; ++t) {
      RationalSimplicialMesh::Simplex sx;
      sx.cube = c;
      sx.tpl = t;
      for (int m = 0; m < 4; ++m) {
        const uint8_t mask = kTemplates[t][m];
        RVec3 p;
        for (int a = 0; a < 3; ++a) {
          int bit = (mask >> a) & 1;
          if (mirror[a]) bit = 1 - bit;
          p[size_t(a)] = rat(cb[size_t(a)] + bit) * scale;
        }
        sx.v[size_t(m)] = get_vertex(p);
      }
      mesh.simplices.push_back(sx);
      // fix orientation to positive volume
      const int s = int(mesh.simplices.size()) - 1;
      if (sgn(mesh.simplex_volume(s)) < 0)
        std::swap(mesh.simplices[size_t(s)].v[0], mesh.simplices[size_t(s)].v[1]);
    }
  }

  // face adjacency
  std::map<std::array<int, 3>, int> face_id;
  mesh.simplex_faces.assign(mesh.simplices.size(), {-1, -1, -1, -1});
  for (int s = 0; s < int(mesh.simplices.size()); ++s)
    for (int j = 0; j < 4; ++j) {
      auto tri = mesh.oriented_face(s, j);
      std::array<int, 3> key = tri;
      std::sort(key.begin(), key.end());
      auto it = face_id.find(key);
      if (it == face_id.end()) {
        RationalSimplicialMesh::Face f;
        f.key = key;
        f.owner = {s, j};
        mesh.faces.push_back(f);
        face_id.emplace(key, int(mesh.faces.size()) - 1);
        mesh.simplex_faces[size_t(s)][size_t(j)] = int(mesh.faces.size()) - 1;
      } else {
        auto& f = mesh.faces[size_t(it->second)];
        if (f.twin.simplex >= 0)
          throw contract_error("triangulate_cubes: face shared more than twice");
        f.twin = {s, j};
        mesh.simplex_faces[size_t(s)][size_t(j)] = it->second;
      }
    }
  mesh.validate();
  return mesh;
}

RationalSimplicialMesh triangulate_block(int64_t nx, int64_t ny, int64_t nz,
                                         const rat& scale,
                                         const std::array<int64_t, 3>& base) {
  std::vector<std::array<int64_t, 3>> cubes;
  for (int64_t k = 0; k < nz; ++k)
    for (int64_t j = 0; j < ny; ++j)
      for (int64_t i = 0; i < nx; ++i)
        cubes.push_back({base[0] + i, base[1] + j, base[2] + k});
  return triangulate_cubes(cubes, scale);
}

}  // namespace gl3d
