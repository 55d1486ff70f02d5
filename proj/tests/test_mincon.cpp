#include <cmath>
#include <random>

#include "doctest.h"
#include "gl3d/mincon.hpp"

using namespace gl3d;

namespace {

Vec3 random_point(std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  return {d(rng), d(rng), d(rng)};
}

// Rodrigues rotation about a random axis
Vec3 rotate(const Vec3& v, const Vec3& axis, double angle) {
  const Vec3 k = normalized(axis);
  return v * std::cos(angle) + cross(k, v) * std::sin(angle) +
         k * (dot(k, v) * (1.0 - std::cos(angle)));
}

}  // namespace

TEST_CASE("single pair matches trivially") {
  SignedPoints pts;
  pts.positives = {{0, 0, 0}};
  pts.negatives = {{3, 4, 0}};
  auto r = minimal_connection(pts);
  CHECK(r.total_length == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(r.pairs.size() == 1);
  CHECK(r.recompute_length(pts) == doctest::Approx(r.total_length).epsilon(1e-12));
}

TEST_CASE("square configuration costs 2 under either pairing") {
  SignedPoints pts;
  pts.positives = {{0, 0, 0}, {1, 1, 0}};
  pts.negatives = {{1, 0, 0}, {0, 1, 0}};
  auto r = minimal_connection(pts);
  CHECK(r.total_length == doctest::Approx(2.0).epsilon(1e-14));
  auto b = brute_force_connection(pts);
  CHECK(b.total_length == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("unbalanced input rejected in balanced mode") {
  SignedPoints pts;
  pts.positives = {{0, 0, 0}};
  CHECK_THROWS_AS(minimal_connection(pts), invalid_input);
  CHECK_THROWS_AS(brute_force_connection(pts), invalid_input);
}

TEST_CASE("boundary-relative: center of unit ball pays radius") {
  SignedPoints pts;
  pts.positives = {{0, 0, 0}};
  pts.body = ConvexBody::ball({0, 0, 0}, 1.0);
  auto r = minimal_connection(pts, ConnectionMode::boundary_relative);
  CHECK(r.total_length == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.pairs.size() == 1);
  CHECK(r.pairs[0].second == -1);
}

TEST_CASE("boundary-relative prefers direct pairing when closer") {
  SignedPoints pts;
  pts.positives = {{0.0, 0.0, 0.0}};
  pts.negatives = {{0.1, 0.0, 0.0}};
  pts.body = ConvexBody::ball({0, 0, 0}, 1.0);
  auto r = minimal_connection(pts, ConnectionMode::boundary_relative);
  CHECK(r.total_length == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("Hungarian equals brute force on random instances") {
  std::mt19937_64 rng(123);
  for (int rep = 0; rep < 100; ++rep) {
    std::uniform_int_distribution<int> nd(1, 4);
    const int n = nd(rng);
    SignedPoints pts;
    for (int i = 0; i < n; ++i) pts.positives.push_back(random_point(rng));
    for (int i = 0; i < n; ++i) pts.negatives.push_back(random_point(rng));
    auto h = minimal_connection(pts);
    auto b = brute_force_connection(pts);
    CHECK(std::fabs(h.total_length - b.total_length) <=
          1e-12 * (1.0 + b.total_length));
  }
}

TEST_CASE("degenerate coincident pair contributes zero length") {
  SignedPoints pts;
  pts.positives = {{0.5, 0.5, 0.5}, {0, 0, 0}};
  pts.negatives = {{0.5, 0.5, 0.5}, {2, 0, 0}};
  auto r = minimal_connection(pts);
  CHECK(r.total_length == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("cost invariant under rigid motion") {
  std::mt19937_64 rng(77);
  for (int rep = 0; rep < 20; ++rep) {
    SignedPoints pts;
    for (int i = 0; i < 5; ++i) pts.positives.push_back(random_point(rng));
    for (int i = 0; i < 5; ++i) pts.negatives.push_back(random_point(rng));
    const double c0 = minimal_connection(pts).total_length;
    const Vec3 axis = random_point(rng);
    std::uniform_real_distribution<double> ad(0.0, 6.28);
    const double angle = ad(rng);
    const Vec3 shift = random_point(rng, -5.0, 5.0);
    SignedPoints mv;
    for (const Vec3& p : pts.positives) mv.positives.push_back(rotate(p, axis, angle) + shift);
    for (const Vec3& p : pts.negatives) mv.negatives.push_back(rotate(p, axis, angle) + shift);
    const double c1 = minimal_connection(mv).total_length;
    CHECK(std::fabs(c0 - c1) <= 1e-12 * (1.0 + c0));
  }
}

TEST_CASE("segment bound: parallel unit segments at offset d") {
  const double d = 0.37;
  Segment L1{{0, 0, 0}, {1, 0, 0}};
  Segment L2{{0, 0, d}, {1, 0, d}};
  auto r = segment_distance_bound(L1, L2);
  CHECK(r.precondition_holds);
  CHECK(r.lhs == doctest::Approx(d).epsilon(1e-13));
  CHECK(r.ok);
  CHECK(r.lhs >= r.rhs);  // slack: rhs = d/sqrt(2)
}

TEST_CASE("segment bound: skew constraint configuration evaluates exactly") {
  // the two segments cross at angle 2*theta with vertical gap d = 2 sin(theta)
  // (the extreme case allowed by the pairing inequality at lambda = 1)
  const double theta = M_PI / 4.0;
  const double d = 2.0 * std::sin(theta);
  const double c = std::cos(theta), s = std::sin(theta);
  Segment L1{{-c, -s, d / 2}, {c, s, d / 2}};
  Segment L2{{-c, s, -d / 2}, {c, -s, -d / 2}};
  auto r = segment_distance_bound(L1, L2);
  CHECK(r.precondition_holds);
  CHECK(r.lhs == doctest::Approx(d).epsilon(1e-12));
  // min cross endpoint distance is sqrt(lambda^2 sin^2(2 theta) + d^2) = sqrt(3)
  CHECK(r.rhs == doctest::Approx(std::sqrt(3.0) / std::sqrt(2.0)).epsilon(1e-9));
  CHECK(r.ok);
  CHECK(r.lhs / r.rhs == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-9));
}

TEST_CASE("segment bound approaches equality for long nearly-parallel segments") {
  const double theta = 1e-3;
  const double d = 2.0 * std::sin(theta);  // constraint-extremal lambda = 1
  const double lam = 1.0;
  const double c = std::cos(theta), s = std::sin(theta);
  Segment L1{{-lam * c, -lam * s, d / 2}, {lam * c, lam * s, d / 2}};
  Segment L2{{-lam * c, lam * s, -d / 2}, {lam * c, -lam * s, -d / 2}};
  auto r = segment_distance_bound(L1, L2);
  CHECK(r.precondition_holds);
  CHECK(r.ok);
  CHECK(r.lhs / r.rhs == doctest::Approx(1.0).epsilon(2e-6));
}

TEST_CASE("segment bound holds on random disjoint constrained pairs") {
  std::mt19937_64 rng(2024);
  int tested = 0;
  while (tested < 1000) {
    Segment L1{random_point(rng), random_point(rng)};
    Segment L2{random_point(rng), random_point(rng)};
    auto r = segment_distance_bound(L1, L2);
    if (!r.precondition_holds || r.lhs <= 0.0) continue;
    ++tested;
    CHECK(r.ok);
  }
}
