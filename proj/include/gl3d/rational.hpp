#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>

#include "gl3d/geometry.hpp"

namespace gl3d {

using rat = mpq_class;
using RVec3 = std::array<rat, 3>;

inline RVec3 rsub(const RVec3& a, const RVec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline RVec3 radd(const RVec3& a, const RVec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline RVec3 rscale(const rat& s, const RVec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline rat rdot(const RVec3& a, const RVec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline RVec3 rcross(const RVec3& a, const RVec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}
inline rat rdet3(const RVec3& a, const RVec3& b, const RVec3& c) {
  return rdot(a, rcross(b, c));
}

inline Vec3 to_vec3(const RVec3& a) {
  return {a[0].get_d(), a[1].get_d(), a[2].get_d()};
}
inline RVec3 to_rvec3(const Vec3& a) {
  return {rat(a.x), rat(a.y), rat(a.z)};
}

// nearest multiple of 1/den (ties round up)
inline rat round_to_denominator(const rat& v, unsigned long den) {
  rat scaled = v * rat(den);
  mpz_class num = scaled.get_num(), d = scaled.get_den();
  // floor(scaled + 1/2) = floor((2 num + d) / (2 d))
  mpz_class q;
  mpz_class twice = 2 * num + d;
  mpz_fdiv_q(q.get_mpz_t(), twice.get_mpz_t(), mpz_class(2 * d).get_mpz_t());
  rat r(q, mpz_class(den));
  r.canonicalize();
  return r;
}

}  // namespace gl3d
