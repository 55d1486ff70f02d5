#include "gl3d/pl_form.hpp"

#include <cmath>

#include "gl3d/errors.hpp"
#include "json.hpp"

namespace gl3d {

namespace {

// exact solve of the 4x4 interpolation system [x y z 1][a;b] = g for one
// component, shared across components via Gaussian elimination
struct LinearSolve4 {
  std::array<std::array<rat, 4>, 4> m;
  std::array<int, 4> piv{0, 1, 2, 3};
  bool factored = false;

  void factor() {
    for (int c = 0; c < 4; ++c) {
      int p = -1;
      for (int r = c; r < 4; ++r)
        if (sgn(m[size_t(piv[size_t(r)])][size_t(c)]) != 0) {
          p = r;
          break;
        }
      if (p < 0) throw contract_error("degenerate simplex in interpolation");
      std::swap(piv[size_t(c)], piv[size_t(p)]);
      const auto& prow = m[size_t(piv[size_t(c)])];
      for (int r = c + 1; r < 4; ++r) {
        auto& row = m[size_t(piv[size_t(r)])];
        if (sgn(row[size_t(c)]) == 0) continue;
        const rat f = row[size_t(c)] / prow[size_t(c)];
        row[size_t(c)] = f;  // store multiplier
        for (int cc = c + 1; cc < 4; ++cc) row[size_t(cc)] -= f * prow[size_t(cc)];
      }
    }
    factored = true;
  }

  std::array<rat, 4> solve(std::array<rat, 4> g) const {
    std::array<rat, 4> y;
    for (int r = 0; r < 4; ++r) {
      rat acc = g[size_t(piv[size_t(r)])];
      for (int c = 0; c < r; ++c) acc -= m[size_t(piv[size_t(r)])][size_t(c)] * y[size_t(c)];
      y[size_t(r)] = acc;
    }
    std::array<rat, 4> x;
    for (int r = 3; r >= 0; --r) {
      rat acc = y[size_t(r)];
      for (int c = r + 1; c < 4; ++c) acc -= m[size_t(piv[size_t(r)])][size_t(c)] * x[size_t(c)];
      x[size_t(r)] = acc / m[size_t(piv[size_t(r)])][size_t(r)];
    }
    return x;
  }
};

}  // namespace

void PLOneForm::derive_coefficients() {
  const auto& M = *mesh;
  coeffs.assign(M.simplices.size(), {});
  for (int s = 0; s < int(M.simplices.size()); ++s) {
    LinearSolve4 sys;
    for (int r = 0; r < 4; ++r) {
      const RVec3& p = M.vertices[size_t(M.simplices[size_t(s)].v[size_t(r)])];
      sys.m[size_t(r)] = {p[0], p[1], p[2], rat(1)};
    }
    sys.factor();
    auto& co = coeffs[size_t(s)];
    for (int comp = 0; comp < 3; ++comp) {
      std::array<rat, 4> g;
      for (int r = 0; r < 4; ++r)
        g[size_t(r)] = vertex_values[size_t(M.simplices[size_t(s)].v[size_t(r)])][size_t(comp)];
      auto x = sys.solve(g);
      for (int j = 0; j < 3; ++j) co.a[size_t(comp)][size_t(j)] = x[size_t(j)];
      co.b[size_t(comp)] = x[3];
    }
    co.curl = {co.a[2][1] - co.a[1][2], co.a[0][2] - co.a[2][0], co.a[1][0] - co.a[0][1]};
  }
}

std::optional<Vec3> PLOneForm::evaluate(const Vec3& x) const {
  auto s = mesh->locate(x);
  if (!s) return std::nullopt;
  const auto& co = coeffs[size_t(*s)];
  Vec3 out;
  for (int comp = 0; comp < 3; ++comp) {
    double v = co.b[size_t(comp)].get_d();
    for (int j = 0; j < 3; ++j) v += co.a[size_t(comp)][size_t(j)].get_d() * x[j];
    out[comp] = v;
  }
  return out;
}

bool PLOneForm::continuous() const {
  // vertex values are shared, so interpolants agree at face vertices by
  // construction; verify the derived coefficients reproduce them exactly
  const auto& M = *mesh;
  for (int s = 0; s < int(M.simplices.size()); ++s) {
    const auto& co = coeffs[size_t(s)];
    for (int m = 0; m < 4; ++m) {
      const int vid = M.simplices[size_t(s)].v[size_t(m)];
      const RVec3& p = M.vertices[size_t(vid)];
      for (int comp = 0; comp < 3; ++comp) {
        rat v = co.b[size_t(comp)];
        for (int j = 0; j < 3; ++j) v += co.a[size_t(comp)][size_t(j)] * p[size_t(j)];
        if (v != vertex_values[size_t(vid)][size_t(comp)]) return false;
      }
    }
  }
  return true;
}

double PLOneForm::dp_total_variation() const {
  double tv = 0.0;
  for (int s = 0; s < int(mesh->simplices.size()); ++s) {
    const Vec3 c = curl_of(s);
    tv += norm(c) * mesh->simplex_volume(s).get_d();
  }
  return tv;
}

PLOneForm interpolate(const OneFormFn& v, std::shared_ptr<const RationalSimplicialMesh> mesh) {
  PLOneForm p;
  p.mesh = std::move(mesh);
  p.vertex_values.resize(p.mesh->vertices.size());
  for (size_t i = 0; i < p.mesh->vertices.size(); ++i) {
    const Vec3 x = to_vec3(p.mesh->vertices[i]);
    const Vec3 val = v(x);
    if (!std::isfinite(val.x) || !std::isfinite(val.y) || !std::isfinite(val.z))
      throw invalid_input("interpolate: non-finite sample at a mesh vertex");
    p.vertex_values[i] = to_rvec3(val);
  }
  p.derive_coefficients();
  return p;
}

PLOneForm rationalize(const PLOneForm& p, unsigned long D) {
  if (D < 1) throw invalid_input("rationalize: denominator bound must be >= 1");
  PLOneForm q;
  q.mesh = p.mesh;
  q.rational = true;
  q.denominator_bound = D;
  q.vertex_values.resize(p.vertex_values.size());
  for (size_t i = 0; i < p.vertex_values.size(); ++i)
    for (int c = 0; c < 3; ++c)
      q.vertex_values[i][size_t(c)] = round_to_denominator(p.vertex_values[i][size_t(c)], D);
  q.derive_coefficients();
  return q;
}

rat face_flux(const PLOneForm& p, int s, int j) {
  if (!p.rational) throw contract_error("face_flux: form must be rationalized first");
  const auto tri = p.mesh->oriented_face(s, j);
  const RVec3 area = p.mesh->face_vector_area(tri);
  return rdot(p.coeffs[size_t(s)].curl, area);
}

ApproximationReport approximation_report(const OneFormFn& original, const PLOneForm& pd,
                                         int n) {
  ApproximationReport rep;
  const auto& M = *pd.mesh;
  // bounding box of the mesh
  Vec3 lo = to_vec3(M.vertices[0]), hi = lo;
  for (const RVec3& v : M.vertices) {
    const Vec3 x = to_vec3(v);
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], x[a]);
      hi[a] = std::max(hi[a], x[a]);
    }
  }
  double gap2 = 0.0, growth = 0.0;
  const double cell =
      (hi.x - lo.x) / n * (hi.y - lo.y) / n * (hi.z - lo.z) / n;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const Vec3 x{lo.x + (i + 0.5) * (hi.x - lo.x) / n,
                     lo.y + (j + 0.5) * (hi.y - lo.y) / n,
                     lo.z + (k + 0.5) * (hi.z - lo.z) / n};
        auto v = pd.evaluate(x);
        if (!v) continue;
        const Vec3 o = original(x);
        gap2 += norm2(*v - o) * cell;
        growth += norm2(*v) * cell;
      }
  rep.l2_gap = std::sqrt(gap2);
  rep.l2_growth = growth;
  rep.tv = pd.dp_total_variation();
  return rep;
}

}  // namespace gl3d

namespace gl3d {

namespace {
nlohmann::json rat_json(const rat& r) {
  return {{"num", r.get_num().get_str()}, {"den", r.get_den().get_str()}};
}
nlohmann::json rvec_json(const RVec3& v) {
  return {rat_json(v[0]), rat_json(v[1]), rat_json(v[2])};
}
}  // namespace

std::string mesh_to_json(const RationalSimplicialMesh& mesh) {
  nlohmann::json j;
  j["scale"] = rat_json(mesh.scale);
  nlohmann::json verts = nlohmann::json::array();
  for (const RVec3& v : mesh.vertices) verts.push_back(rvec_json(v));
  j["vertices"] = std::move(verts);
  nlohmann::json simps = nlohmann::json::array();
  for (const auto& s : mesh.simplices)
    simps.push_back({{"v", s.v}, {"cube", s.cube}, {"template", s.tpl}});
  j["simplices"] = std::move(simps);
  return j.dump(2);
}

std::string pl_form_to_json(const PLOneForm& p) {
  nlohmann::json j;
  j["rational"] = p.rational;
  j["denominator_bound"] = p.denominator_bound;
  nlohmann::json vals = nlohmann::json::array();
  for (const RVec3& v : p.vertex_values) vals.push_back(rvec_json(v));
  j["vertex_values"] = std::move(vals);
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& co : p.coeffs) {
    nlohmann::json a = nlohmann::json::array();
    for (int i = 0; i < 3; ++i) a.push_back(rvec_json(co.a[size_t(i)]));
    coeffs.push_back({{"a", a}, {"b", rvec_json(co.b)}, {"curl", rvec_json(co.curl)}});
  }
  j["coefficients"] = std::move(coeffs);
  return j.dump(2);
}

}  // namespace gl3d
