#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace gl3d {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm2(const Vec3& v) { return dot(v, v); }
inline double norm(const Vec3& v) { return std::sqrt(norm2(v)); }
inline Vec3 normalized(const Vec3& v) { return v / norm(v); }

// Oriented line segment a -> b.
struct Segment {
  Vec3 a, b;
  Vec3 dir() const { return b - a; }
  double length() const { return norm(b - a); }
  Vec3 tangent() const { return normalized(b - a); }
  Vec3 point(double t) const { return a + (b - a) * t; }
};

// Distance from point p to the closed segment s.
inline double point_segment_distance(const Vec3& p, const Segment& s) {
  const Vec3 d = s.b - s.a;
  const double L2 = norm2(d);
  if (L2 == 0.0) return norm(p - s.a);
  double t = dot(p - s.a, d) / L2;
  t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
  return norm(p - (s.a + d * t));
}

// Distance between two closed segments (clamped quadratic minimization).
inline double segment_segment_distance(const Segment& s1, const Segment& s2) {
  const Vec3 u = s1.b - s1.a, v = s2.b - s2.a, w = s1.a - s2.a;
  const double a = dot(u, u), b = dot(u, v), c = dot(v, v);
  const double d = dot(u, w), e = dot(v, w);
  const double den = a * c - b * b;
  double best = std::numeric_limits<double>::infinity();
  if (den > 0.0) {
    // unconstrained minimizer of the convex quadratic; valid if inside [0,1]^2
    const double s = (b * e - c * d) / den;
    const double t = (a * e - b * d) / den;
    if (s >= 0.0 && s <= 1.0 && t >= 0.0 && t <= 1.0)
      best = norm(w + u * s - v * t);
  }
  // otherwise the minimum lies on a boundary edge of the (s,t) square
  best = std::min(best, point_segment_distance(s1.a, s2));
  best = std::min(best, point_segment_distance(s1.b, s2));
  best = std::min(best, point_segment_distance(s2.a, s1));
  best = std::min(best, point_segment_distance(s2.b, s1));
  return best;
}

}  // namespace gl3d
