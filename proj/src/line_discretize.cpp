#include "gl3d/line_discretize.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "gl3d/errors.hpp"

namespace gl3d {

namespace {

using R2 = std::array<rat, 2>;

rat cross2(const R2& o, const R2& a, const R2& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// twice the signed area
rat poly_area2(const std::vector<R2>& P) {
  rat s = 0;
  for (size_t i = 0; i < P.size(); ++i) {
    const R2& a = P[i];
    const R2& b = P[(i + 1) % P.size()];
    s += a[0] * b[1] - a[1] * b[0];
  }
  return s;
}

std::vector<R2> make_ccw(std::vector<R2> P) {
  if (sgn(poly_area2(P)) < 0) std::reverse(P.begin(), P.end());
  return P;
}

// Sutherland-Hodgman clip of convex subject by convex CCW clipper (exact)
std::vector<R2> clip_convex(std::vector<R2> subject, const std::vector<R2>& clipper) {
  for (size_t e = 0; e < clipper.size() && !subject.empty(); ++e) {
    const R2& ca = clipper[e];
    const R2& cb = clipper[(e + 1) % clipper.size()];
    std::vector<R2> out;
    for (size_t i = 0; i < subject.size(); ++i) {
      const R2& p = subject[i];
      const R2& q = subject[(i + 1) % subject.size()];
      const rat sp = cross2(ca, cb, p);
      const rat sq = cross2(ca, cb, q);
      const bool pin = sgn(sp) >= 0, qin = sgn(sq) >= 0;
      if (pin) out.push_back(p);
      if (pin != qin) {
        const rat t = sp / (sp - sq);  // intersection parameter, exact
        out.push_back({p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])});
      }
    }
    subject = std::move(out);
  }
  return subject;
}

// oblique projection along v dropping the dominant axis
struct Projector {
  int r = 2, p = 0, q = 1;
  rat cp, cq;  // v_p / v_r, v_q / v_r

  static Projector along(const RVec3& v) {
    Projector pr;
    int r = 0;
    for (int a = 1; a < 3; ++a)
      if (abs(v[size_t(a)]) > abs(v[size_t(r)])) r = a;
    pr.r = r;
    pr.p = (r + 1) % 3;
    pr.q = (r + 2) % 3;
    pr.cp = v[size_t(pr.p)] / v[size_t(r)];
    pr.cq = v[size_t(pr.q)] / v[size_t(r)];
    return pr;
  }
  R2 operator()(const RVec3& x) const {
    return {x[size_t(p)] - cp * x[size_t(r)], x[size_t(q)] - cq * x[size_t(r)]};
  }
};

struct VecLess {
  bool operator()(const Vec3& a, const Vec3& b) const {
    if (a.x != b.x) return a.x < b.x;
    if (a.y != b.y) return a.y < b.y;
    return a.z < b.z;
  }
};

std::vector<Vec3> fan_place(const std::vector<Vec3>& poly, long m);

}  // namespace

std::vector<Vec3> place_face_points(const Vec3& A, const Vec3& B, const Vec3& C, long m) {
  if (m <= 0) return {};
  const long ell = std::max<long>(1, long(std::ceil(std::sqrt(double(m)))));
  struct Cand {
    Vec3 p;
    double d2;
    double ang;
    long key;
  };
  std::vector<Cand> cands;
  const Vec3 G = (A + B + C) / 3.0;
  const Vec3 u = (B - A) / double(ell), w = (C - A) / double(ell);
  auto corner = [&](long r, long c) { return A + u * double(c) + w * double(r); };
  long key = 0;
  for (long r = 0; r < ell; ++r) {
    for (long c = 0; c + r < ell; ++c) {
      const Vec3 b1 = (corner(r, c) + corner(r, c + 1) + corner(r + 1, c)) / 3.0;
      cands.push_back({b1, norm2(b1 - G), std::atan2(dot(b1 - G, w), dot(b1 - G, u)), key++});
      if (c + r < ell - 1) {
        const Vec3 b2 = (corner(r, c + 1) + corner(r + 1, c + 1) + corner(r + 1, c)) / 3.0;
        cands.push_back({b2, norm2(b2 - G), std::atan2(dot(b2 - G, w), dot(b2 - G, u)), key++});
      }
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.d2 != b.d2) return a.d2 < b.d2;
    if (a.ang != b.ang) return a.ang < b.ang;
    return a.key < b.key;
  });
  if (m > long(cands.size()))
    throw contract_error("place_face_points: m exceeds l^2 sub-triangles");
  std::vector<Vec3> out;
  out.reserve(size_t(m));
  for (long i = 0; i < m; ++i) out.push_back(cands[size_t(i)].p);
  return out;
}

namespace {

// Distribute m points over a convex polygon: fan-triangulate and allocate
// proportionally to area (largest remainder), then spiral-place per piece.
std::vector<Vec3> fan_place(const std::vector<Vec3>& poly, long m) {
  if (m <= 0) return {};
  if (poly.size() < 3) throw contract_error("fan_place: degenerate polygon");
  if (poly.size() == 3) return place_face_points(poly[0], poly[1], poly[2], m);
  const size_t nt = poly.size() - 2;
  std::vector<double> areas(nt);
  double total = 0.0;
  for (size_t t = 0; t < nt; ++t) {
    areas[t] = 0.5 * norm(cross(poly[t + 1] - poly[0], poly[t + 2] - poly[0]));
    total += areas[t];
  }
  if (total <= 0.0) throw contract_error("fan_place: zero-area polygon");
  std::vector<long> alloc(nt, 0);
  std::vector<std::pair<double, size_t>> rem;
  long used = 0;
  for (size_t t = 0; t < nt; ++t) {
    const double share = double(m) * areas[t] / total;
    alloc[t] = long(std::floor(share));
    used += alloc[t];
    rem.push_back({share - std::floor(share), t});
  }
  std::sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (long t = 0; used < m; ++t, ++used) alloc[rem[size_t(t) % rem.size()].second] += 1;
  std::vector<Vec3> out;
  for (size_t t = 0; t < nt; ++t) {
    auto pts = place_face_points(poly[0], poly[t + 1], poly[t + 2], alloc[t]);
    out.insert(out.end(), pts.begin(), pts.end());
  }
  return out;
}

}  // namespace

long choose_subdivision(const PLOneForm& p, double eta, double target_h) {
  // least common denominator of all subface fluxes = that of a trial
  // quantization at N=1 (computed without the eta gate)
  // compute phi exactly the same way quantize does
  const auto& M = *p.mesh;
  mpz_class L = 1;
  for (int s = 0; s < int(M.simplices.size()); ++s) {
    const RVec3& v = p.coeffs[size_t(s)].curl;
    if (sgn(v[0]) == 0 && sgn(v[1]) == 0 && sgn(v[2]) == 0) continue;
    Projector pr = Projector::along(v);
    std::array<std::vector<R2>, 4> proj;
    std::array<rat, 4> phi;
    for (int j = 0; j < 4; ++j) {
      auto tri = M.oriented_face(s, j);
      for (int t = 0; t < 3; ++t) proj[size_t(j)].push_back(pr(M.vertices[size_t(tri[size_t(t)])]));
      phi[size_t(j)] = rdot(v, M.face_vector_area(tri));
      if (sgn(phi[size_t(j)]) != 0)
        L = lcm(L, phi[size_t(j)].get_den());
    }
    for (int j = 0; j < 4; ++j) {
      if (sgn(poly_area2(proj[size_t(j)])) == 0) continue;
      const rat aj = abs(poly_area2(proj[size_t(j)]));
      auto Pj = make_ccw(proj[size_t(j)]);
      for (int k = 0; k < 4; ++k) {
        if (k == j || sgn(poly_area2(proj[size_t(k)])) == 0) continue;
        auto D = clip_convex(Pj, make_ccw(proj[size_t(k)]));
        if (D.size() < 3) continue;
        const rat ratio = abs(poly_area2(D)) / aj;
        const rat phijk = phi[size_t(j)] * ratio;
        if (sgn(phijk) != 0) L = lcm(L, phijk.get_den());
      }
    }
  }
  const rat phi_unit(1, L);
  const double cap = std::min(target_h, eta * eta * (1.0 - 1e-9));
  if (cap <= 0.0) throw invalid_input("choose_subdivision: no admissible h");
  // smallest N with phi/N <= cap
  rat nmin = phi_unit / rat(cap);
  mpz_class N;
  mpz_cdiv_q(N.get_mpz_t(), nmin.get_num().get_mpz_t(), nmin.get_den().get_mpz_t());
  if (N < 1) N = 1;
  if (!N.fits_slong_p()) throw invalid_input("choose_subdivision: N overflow");
  return N.get_si();
}

QuantizedFaceData quantize(const PLOneForm& p, double eta, long N,
                           bool enforce_h_gate) {
  if (!p.rational) throw invalid_input("quantize: form must be rational");
  if (!(eta > 0.0 && eta < 1.0)) throw invalid_input("quantize: eta must be in (0,1)");
  if (N < 1) throw invalid_input("quantize: N must be >= 1");
  const auto& M = *p.mesh;

  struct SimplexFlux {
    bool active = false;
    Projector pr;
    std::array<rat, 4> phi;
    std::array<std::vector<R2>, 4> proj;                 // projected face triangles
    std::array<std::array<rat, 4>, 4> phijk;             // ordered pair fluxes
    std::array<std::array<std::vector<R2>, 4>, 4> clip;  // D_{jk}
  };
  std::vector<SimplexFlux> flux(M.simplices.size());
  mpz_class L = 1;

  for (int s = 0; s < int(M.simplices.size()); ++s) {
    const RVec3& v = p.coeffs[size_t(s)].curl;
    auto& F = flux[size_t(s)];
    if (sgn(v[0]) == 0 && sgn(v[1]) == 0 && sgn(v[2]) == 0) continue;
    F.active = true;
    F.pr = Projector::along(v);
    for (int j = 0; j < 4; ++j) {
      auto tri = M.oriented_face(s, j);
      for (int t = 0; t < 3; ++t)
        F.proj[size_t(j)].push_back(F.pr(M.vertices[size_t(tri[size_t(t)])]));
      F.phi[size_t(j)] = rdot(v, M.face_vector_area(tri));
      if (sgn(F.phi[size_t(j)]) != 0) L = lcm(L, F.phi[size_t(j)].get_den());
    }
    for (int j = 0; j < 4; ++j) {
      if (sgn(poly_area2(F.proj[size_t(j)])) == 0) {
        if (sgn(F.phi[size_t(j)]) != 0)
          throw contract_error("quantize: parallel face with nonzero flux");
        continue;
      }
      const rat aj = abs(poly_area2(F.proj[size_t(j)]));
      auto Pj = make_ccw(F.proj[size_t(j)]);
      rat sum = 0;
      for (int k = 0; k < 4; ++k) {
        if (k == j) continue;
        if (sgn(poly_area2(F.proj[size_t(k)])) == 0) continue;
        auto D = clip_convex(Pj, make_ccw(F.proj[size_t(k)]));
        if (D.size() < 3) continue;
        const rat ratio = abs(poly_area2(D)) / aj;
        const rat phijk = F.phi[size_t(j)] * ratio;
        F.phijk[size_t(j)][size_t(k)] = phijk;
        F.clip[size_t(j)][size_t(k)] = D;
        sum += phijk;
        if (sgn(phijk) != 0) L = lcm(L, phijk.get_den());
      }
      if (sum != F.phi[size_t(j)])
        throw contract_error("quantize: projected subface fluxes do not sum to the face flux");
    }
  }

  bool any_flux = false;
  for (const auto& F : flux)
    if (F.active) any_flux = true;
  QuantizedFaceData out;
  out.eta = eta;
  out.h = rat(1, L) / rat(N);
  const double hd = out.h.get_d();
  if (enforce_h_gate && any_flux && !(hd < eta * eta))
    throw invalid_input("quantize: h >= eta^2; raise N or eta");

  // orientation antisymmetry check: phi_ijk == -phi_ikj
  for (int s = 0; s < int(M.simplices.size()); ++s) {
    const auto& F = flux[size_t(s)];
    if (!F.active) continue;
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) {
        if (j == k) continue;
        if (F.phijk[size_t(j)][size_t(k)] != -F.phijk[size_t(k)][size_t(j)])
          throw contract_error("quantize: phi_ijk antisymmetry violated");
      }
  }

  // canonical face data: representative side has phi > 0, or is the owner
  // for boundary faces
  for (int f = 0; f < int(M.faces.size()); ++f) {
    const auto& face = M.faces[size_t(f)];
    int rs = face.owner.simplex, rl = face.owner.local;
    rat phi = flux[size_t(rs)].active ? flux[size_t(rs)].phi[size_t(rl)] : rat(0);
    if (face.twin.simplex >= 0) {
      const int ts = face.twin.simplex, tl = face.twin.local;
      const rat tphi = flux[size_t(ts)].active ? flux[size_t(ts)].phi[size_t(tl)] : rat(0);
      if (phi + tphi != 0)
        throw contract_error("quantize: interior face fluxes are not antisymmetric");
      if (sgn(phi) < 0) {
        rs = ts;
        rl = tl;
        phi = tphi;
      }
    }
    if (sgn(phi) == 0) continue;
    QuantizedFaceData::FaceData fd;
    fd.rep_simplex = rs;
    fd.rep_local = rl;
    fd.phi = phi;
    fd.boundary = face.twin.simplex < 0;
    rat mq = phi / out.h;
    if (mq.get_den() != 1) throw contract_error("quantize: face flux not divisible by h");
    fd.m = std::labs(mq.get_num().get_si());
    auto tri = M.oriented_face(rs, rl);
    fd.points = place_face_points(to_vec3(M.vertices[size_t(tri[0])]),
                                  to_vec3(M.vertices[size_t(tri[1])]),
                                  to_vec3(M.vertices[size_t(tri[2])]), fd.m);
    out.faces.emplace(f, std::move(fd));
  }

  // subface data for positive ordered pairs: heads placed on the shrunken
  // lifted clip polygon, tails transported along the fiber to face k
  for (int s = 0; s < int(M.simplices.size()); ++s) {
    const auto& F = flux[size_t(s)];
    if (!F.active) continue;
    const Vec3 b = to_vec3(M.barycenter(s));
    const Vec3 vdir = normalized(p.curl_of(s));
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) {
        if (j == k || sgn(F.phijk[size_t(j)][size_t(k)]) <= 0) continue;
        QuantizedFaceData::SubfaceData sd;
        sd.phi = F.phijk[size_t(j)][size_t(k)];
        rat mq = sd.phi / out.h;
        if (mq.get_den() != 1)
          throw contract_error("quantize: subface flux not divisible by h");
        sd.m = mq.get_num().get_si();

        // lift the 2D clip polygon to the plane of face j (exact), then
        // shrink toward the barycenter by 1 - eta
        auto tri = M.oriented_face(s, j);
        const RVec3& q0 = M.vertices[size_t(tri[0])];
        const RVec3 nA = M.face_vector_area(tri);  // normal direction (outward)
        const RVec3& v = p.coeffs[size_t(s)].curl;
        const rat ndotv = rdot(nA, v);
        if (sgn(ndotv) == 0) throw contract_error("quantize: fiber parallel to face");
        std::vector<Vec3> poly;
        for (const R2& w : F.clip[size_t(j)][size_t(k)]) {
          // x = w lifted: x_p = w_p + cp x_r, x_q = w_q + cq x_r, n.(x - q0) = 0
          const Projector& pr = F.pr;
          // solve n_p (w_p + cp t) + n_q (w_q + cq t) + n_r t = n . q0
          const rat rhs = rdot(nA, q0) - nA[size_t(pr.p)] * w[0] - nA[size_t(pr.q)] * w[1];
          const rat den = nA[size_t(pr.p)] * pr.cp + nA[size_t(pr.q)] * pr.cq + nA[size_t(pr.r)];
          const rat t = rhs / den;
          RVec3 x;
          x[size_t(pr.r)] = t;
          x[size_t(pr.p)] = w[0] + pr.cp * t;
          x[size_t(pr.q)] = w[1] + pr.cq * t;
          Vec3 xv = to_vec3(x);
          poly.push_back(b + (xv - b) * (1.0 - eta));
        }
        sd.heads = fan_place(poly, sd.m);

        // fiber transport to the shrunken face-k plane
        auto trik = M.oriented_face(s, k);
        const Vec3 nk = to_vec3(M.face_vector_area(trik));
        const Vec3 xk = b + (to_vec3(M.vertices[size_t(trik[0])]) - b) * (1.0 - eta);
        const double dv = dot(nk, vdir);
        if (dv == 0.0) throw contract_error("quantize: degenerate fiber pairing");
        for (const Vec3& head : sd.heads) {
          const double t = dot(nk, head - xk) / dv;
          const Vec3 tail = head - vdir * t;
          if (!(t > 0.0))
            throw contract_error("quantize: fiber exits the wrong side");
          sd.tails.push_back(tail);
        }
        out.subfaces.emplace(std::make_tuple(s, j, k), std::move(sd));
      }
  }

  // m_ij = sum_k m_ijk per active face (outflow pairs (j,k) for positive
  // faces, inflow pairs (k,j) for negative boundary faces)
  for (const auto& [fid, fd] : out.faces) {
    long sum = 0;
    const int s = fd.rep_simplex, j = fd.rep_local;
    for (int k = 0; k < 4; ++k) {
      auto it = out.subfaces.find(std::make_tuple(s, j, k));
      if (it != out.subfaces.end()) sum += it->second.m;
      auto it2 = out.subfaces.find(std::make_tuple(s, k, j));
      if (it2 != out.subfaces.end()) sum += it2->second.m;
    }
    if (flux[size_t(s)].active && sum != fd.m)
      throw contract_error("quantize: m_ij != sum_k m_ijk");
  }
  return out;
}

std::vector<Segment> build_interior_segments(const PLOneForm& p, const QuantizedFaceData& q,
                                             std::vector<int>* region_tags) {
  std::vector<Segment> segs;
  for (const auto& [key, sd] : q.subfaces) {
    const int s = std::get<0>(key);
    for (long a = 0; a < sd.m; ++a) {
      Segment seg{sd.tails[size_t(a)], sd.heads[size_t(a)]};
      if (seg.length() < 1e-14) continue;  // degenerate fiber, nothing to carry
      segs.push_back(seg);
      if (region_tags) region_tags->push_back(s);
    }
  }
  return segs;
}

std::vector<Segment> connect_frustum(const std::vector<Vec3>& heads,
                                     const std::vector<Vec3>& tails) {
  if (heads.size() != tails.size())
    throw invalid_input("connect_frustum: unbalanced boundary points");
  if (heads.empty()) return {};
  SignedPoints pts;
  pts.positives = heads;
  pts.negatives = tails;
  MatchingResult mr = minimal_connection(pts);
  std::vector<Segment> segs;
  for (auto [i, j] : mr.pairs) {
    Segment s{tails[size_t(j)], heads[size_t(i)]};
    if (s.length() < 1e-14) continue;
    segs.push_back(s);
  }
  return segs;
}

std::vector<Segment> build_frustum_segments(const PLOneForm& p, const QuantizedFaceData& q,
                                            std::vector<int>* region_tags) {
  const auto& M = *p.mesh;
  std::vector<Segment> segs;
  for (const auto& [fid, fd] : q.faces) {
    // two frusta per interior face (one per side), one for boundary faces
    std::array<std::pair<int, int>, 2> sides{{{fd.rep_simplex, fd.rep_local}, {-1, -1}}};
    const auto& face = M.faces[size_t(fid)];
    if (face.twin.simplex >= 0) {
      if (face.owner.simplex == fd.rep_simplex && face.owner.local == fd.rep_local)
        sides[1] = {face.twin.simplex, face.twin.local};
      else
        sides[1] = {face.owner.simplex, face.owner.local};
    }
    for (const auto& [s, j] : sides) {
      if (s < 0) continue;
      // flux sign through face j as seen from simplex s: the representative
      // side carries fd.phi, the twin the opposite
      const bool rep_side = s == fd.rep_simplex && j == fd.rep_local;
      const bool outflow = rep_side ? sgn(fd.phi) > 0 : sgn(fd.phi) < 0;
      // inner points on the shrunken subfaces of face j of simplex s
      std::vector<Vec3> inner;
      for (int k = 0; k < 4; ++k) {
        auto it = q.subfaces.find(std::make_tuple(s, j, k));
        if (it != q.subfaces.end())
          inner.insert(inner.end(), it->second.heads.begin(), it->second.heads.end());
        auto it2 = q.subfaces.find(std::make_tuple(s, k, j));
        if (it2 != q.subfaces.end())
          inner.insert(inner.end(), it2->second.tails.begin(), it2->second.tails.end());
      }
      if (long(inner.size()) != fd.m)
        throw contract_error("frustum: inner point count mismatch");
      // outflow: the face points are heads (vorticity leaves the simplex);
      // inflow: the face points are tails
      std::vector<Segment> part =
          outflow ? connect_frustum(fd.points, inner) : connect_frustum(inner, fd.points);
      for (const Segment& sg : part) {
        segs.push_back(sg);
        if (region_tags) region_tags->push_back(int(M.simplices.size()) + fid * 8 + j);
      }
    }
  }
  return segs;
}

VortexSystem assemble(const PLOneForm& p, const QuantizedFaceData& q,
                      std::vector<Segment> segments, std::vector<int> region_tags) {
  const auto& M = *p.mesh;
  VortexSystem sys;
  sys.weight_h = q.h.get_d();
  sys.segments = std::move(segments);
  sys.region = std::move(region_tags);
  if (sys.region.empty()) sys.region.assign(sys.segments.size(), 0);

  std::map<Vec3, int, VecLess> node_of;
  std::vector<std::vector<int>> node_out, node_in;
  std::vector<Vec3> node_pos;
  auto node_id = [&](const Vec3& x) {
    auto it = node_of.find(x);
    if (it != node_of.end()) return it->second;
    const int id = int(node_pos.size());
    node_of.emplace(x, id);
    node_pos.push_back(x);
    node_out.emplace_back();
    node_in.emplace_back();
    return id;
  };
  for (int s = 0; s < int(sys.segments.size()); ++s) {
    node_out[size_t(node_id(sys.segments[size_t(s)].a))].push_back(s);
    node_in[size_t(node_id(sys.segments[size_t(s)].b))].push_back(s);
  }

  // boundary nodes: face points of boundary mesh faces
  std::set<int> boundary_nodes;
  for (const auto& [fid, fd] : q.faces)
    if (fd.boundary)
      for (const Vec3& x : fd.points) {
        auto it = node_of.find(x);
        if (it != node_of.end()) boundary_nodes.insert(it->second);
      }

  // interior balance
  std::vector<int> offenders;
  for (int n = 0; n < int(node_pos.size()); ++n) {
    if (boundary_nodes.count(n)) continue;
    if (node_out[size_t(n)].size() != node_in[size_t(n)].size()) offenders.push_back(n);
  }
  if (!offenders.empty())
    throw contract_error("assemble: " + std::to_string(offenders.size()) +
                         " interior vertices with unbalanced degree");

  // walk: paths from boundary nodes first, then cycles
  std::vector<uint8_t> used(sys.segments.size(), 0);
  auto next_segment = [&](int node, const Vec3& tin) {
    int best = -1;
    double bestdot = -2.0;
    for (int cand : node_out[size_t(node)]) {
      if (used[size_t(cand)]) continue;
      const double d = dot(tin, sys.segments[size_t(cand)].tangent());
      if (d > bestdot + 1e-15 || (std::fabs(d - bestdot) <= 1e-15 && (best < 0 || cand < best))) {
        bestdot = d;
        best = cand;
      }
    }
    return best;
  };
  auto walk_from = [&](int seg) {
    std::vector<int> chain{seg};
    used[size_t(seg)] = 1;
    int node = node_id(sys.segments[size_t(seg)].b);
    Vec3 tin = sys.segments[size_t(seg)].tangent();
    const int start = node_id(sys.segments[size_t(seg)].a);
    while (true) {
      const int nxt = next_segment(node, tin);
      if (nxt < 0) break;
      used[size_t(nxt)] = 1;
      chain.push_back(nxt);
      tin = sys.segments[size_t(nxt)].tangent();
      node = node_id(sys.segments[size_t(nxt)].b);
      if (node == start && next_segment(node, tin) < 0) break;
    }
    const bool closed = node == start;
    sys.loops.push_back(std::move(chain));
    sys.loop_closed.push_back(closed ? 1 : 0);
  };
  // boundary-rooted paths
  for (int n : boundary_nodes)
    for (int seg : node_out[size_t(n)])
      if (!used[size_t(seg)]) walk_from(seg);
  // remaining cycles in id order
  for (int seg = 0; seg < int(sys.segments.size()); ++seg)
    if (!used[size_t(seg)]) walk_from(seg);

  // closure check: every non-boundary-terminated loop must be closed
  for (size_t l = 0; l < sys.loops.size(); ++l) {
    if (sys.loop_closed[l]) continue;
    const int first = sys.loops[l].front(), last = sys.loops[l].back();
    const int a = node_of.at(sys.segments[size_t(first)].a);
    const int b = node_of.at(sys.segments[size_t(last)].b);
    if (!boundary_nodes.count(a) || !boundary_nodes.count(b))
      throw contract_error("assemble: open polyline not ending on the boundary");
  }
  (void)M;
  return sys;
}

VortexSystem discretize_vorticity(const PLOneForm& p, double eta, long N,
                                  bool enforce_h_gate) {
  QuantizedFaceData q = quantize(p, eta, N, enforce_h_gate);
  std::vector<int> tags;
  std::vector<Segment> segs = build_interior_segments(p, q, &tags);
  std::vector<Segment> fr = build_frustum_segments(p, q, &tags);
  segs.insert(segs.end(), fr.begin(), fr.end());
  return assemble(p, q, std::move(segs), std::move(tags));
}

namespace {

// deterministic 8-way tetra refinement down to a target edge length; emits
// (barycenter, volume) pairs
void subdivide_tetra(const std::array<Vec3, 4>& t, double target_edge, int depth,
                     std::vector<std::pair<Vec3, double>>& out) {
  double mx = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) mx = std::max(mx, norm(t[size_t(i)] - t[size_t(j)]));
  const double vol =
      std::fabs(dot(t[1] - t[0], cross(t[2] - t[0], t[3] - t[0]))) / 6.0;
  if (mx <= target_edge || depth >= 6 || vol == 0.0) {
    out.push_back({(t[0] + t[1] + t[2] + t[3]) / 4.0, vol});
    return;
  }
  auto mid = [&](int i, int j) { return (t[size_t(i)] + t[size_t(j)]) * 0.5; };
  const Vec3 m01 = mid(0, 1), m02 = mid(0, 2), m03 = mid(0, 3), m12 = mid(1, 2),
             m13 = mid(1, 3), m23 = mid(2, 3);
  const std::array<std::array<Vec3, 4>, 8> kids{{{t[0], m01, m02, m03},
                                                 {m01, t[1], m12, m13},
                                                 {m02, m12, t[2], m23},
                                                 {m03, m13, m23, t[3]},
                                                 {m01, m02, m03, m13},
                                                 {m01, m02, m12, m13},
                                                 {m02, m03, m13, m23},
                                                 {m02, m12, m13, m23}}};
  for (const auto& k : kids) subdivide_tetra(k, target_edge, depth + 1, out);
}

}  // namespace

PropertyReport verify_properties(const VortexSystem& gamma, const PLOneForm& p,
                                 double eta, double h, double mass_C_cap) {
  PropertyReport rep;
  rep.mass = gamma.mass();
  rep.dp_l1 = p.dp_total_variation();
  rep.mass_excess = rep.mass - rep.dp_l1;
  rep.fitted_C = eta > 0.0 ? rep.mass_excess / eta : 0.0;
  rep.mass_ok = rep.mass <= rep.dp_l1 + mass_C_cap * eta;

  // separation over disjoint pairs
  double minsep = std::numeric_limits<double>::infinity();
  const auto& S = gamma.segments;
  for (size_t i = 0; i < S.size(); ++i)
    for (size_t j = i + 1; j < S.size(); ++j) {
      const bool share = S[i].a == S[j].a || S[i].a == S[j].b || S[i].b == S[j].a ||
                         S[i].b == S[j].b;
      if (share) continue;
      minsep = std::min(minsep, segment_segment_distance(S[i], S[j]));
    }
  rep.min_separation = std::isfinite(minsep) ? minsep : 0.0;
  rep.sep_c0 = eta > 0.0 && h > 0.0 ? rep.min_separation / (eta * std::sqrt(h)) : 0.0;
  rep.sep_ok = S.size() < 2 || rep.min_separation > 0.0;

  // adjacent tangents along loops
  double mindot = 1.0;
  for (size_t l = 0; l < gamma.loops.size(); ++l) {
    const auto& chain = gamma.loops[l];
    const size_t n = chain.size();
    if (n < 2) continue;
    const size_t last = gamma.loop_closed[l] ? n : n - 1;
    for (size_t t = 0; t < last; ++t) {
      const Segment& s1 = S[size_t(chain[t])];
      const Segment& s2 = S[size_t(chain[(t + 1) % n])];
      mindot = std::min(mindot, dot(s1.tangent(), s2.tangent()));
    }
  }
  rep.min_adjacent_dot = mindot;
  rep.angle_margin = eta > 0.0 ? (1.0 + mindot) / (eta * eta) : 0.0;
  rep.angle_ok = mindot > -1.0;

  // W^{-1,1} gap estimate: q_h as chunked segment currents against dp
  // sampled on a refined tetra decomposition
  PointMeasure mu;
  const double chunk = std::max(0.25 * eta * std::sqrt(std::max(h, 1e-12)), 1e-3);
  for (const Segment& s : S) add_segment_current(mu, s, gamma.weight_h, chunk);
  const auto& M = *p.mesh;
  double target = std::max(2.0 * chunk, 0.05);
  for (int s = 0; s < int(M.simplices.size()); ++s) {
    const Vec3 c = p.curl_of(s);
    if (c == Vec3{0, 0, 0}) continue;
    std::array<Vec3, 4> t;
    for (int m = 0; m < 4; ++m)
      t[size_t(m)] = to_vec3(M.vertices[size_t(M.simplices[size_t(s)].v[size_t(m)])]);
    std::vector<std::pair<Vec3, double>> cells;
    subdivide_tetra(t, target, 0, cells);
    for (const auto& [x, vol] : cells)
      for (int comp = 0; comp < 3; ++comp) mu.add(x, -c[comp] * vol, comp);
  }
  // cap the instance like w11_gap does, paying R per unit dropped mass
  double R = 0.0;
  {
    Vec3 lo = to_vec3(M.vertices[0]), hi = lo;
    for (const RVec3& v : M.vertices) {
      const Vec3 x = to_vec3(v);
      for (int a = 0; a < 3; ++a) {
        lo[a] = std::min(lo[a], x[a]);
        hi[a] = std::max(hi[a], x[a]);
      }
    }
    R = norm(hi - lo);
  }
  const int max_atoms = 600;
  if (int(mu.atoms.size()) > max_atoms) {
    std::sort(mu.atoms.begin(), mu.atoms.end(),
              [](const PointMeasure::Atom& a, const PointMeasure::Atom& b) {
                return std::fabs(a.w) > std::fabs(b.w);
              });
    double dropped = 0.0;
    for (size_t t = size_t(max_atoms); t < mu.atoms.size(); ++t)
      dropped += std::fabs(mu.atoms[t].w);
    mu.atoms.resize(size_t(max_atoms));
    rep.w11_gap = flat_norm_w11(mu, R) + R * dropped;
  } else {
    rep.w11_gap = flat_norm_w11(mu, R);
  }
  return rep;
}

}  // namespace gl3d
