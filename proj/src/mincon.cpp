#include "gl3d/mincon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gl3d {

ConvexBody ConvexBody::ball(const Vec3& center, double radius) {
  ConvexBody b;
  b.distance_to_boundary = [=](const Vec3& x) { return std::fabs(radius - norm(x - center)); };
  return b;
}

ConvexBody ConvexBody::axis_box(const Vec3& lo, const Vec3& hi) {
  ConvexBody b;
  b.distance_to_boundary = [=](const Vec3& x) {
    double d = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
      d = std::min(d, std::fabs(x[a] - lo[a]));
      d = std::min(d, std::fabs(hi[a] - x[a]));
    }
    return d;
  };
  return b;
}

ConvexBody ConvexBody::half_spaces(std::vector<std::pair<Vec3, double>> planes) {
  ConvexBody b;
  b.distance_to_boundary = [planes = std::move(planes)](const Vec3& x) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& [n, c] : planes) d = std::min(d, std::fabs(c - dot(n, x)) / norm(n));
    return d;
  };
  return b;
}

double MatchingResult::recompute_length(const SignedPoints& pts) const {
  double s = 0.0;
  for (auto [p, n] : pairs) {
    if (p >= 0 && n >= 0)
      s += norm(pts.positives[size_t(p)] - pts.negatives[size_t(n)]);
    else if (p >= 0)
      s += pts.body->distance_to_boundary(pts.positives[size_t(p)]);
    else
      s += pts.body->distance_to_boundary(pts.negatives[size_t(n)]);
  }
  return s;
}

// Jonker-Volgenant style shortest augmenting path assignment, O(n^3).
double solve_assignment(const std::vector<std::vector<double>>& cost,
                        std::vector<int>& row_to_col) {
  const int n = int(cost.size());
  row_to_col.assign(size_t(n), -1);
  if (n == 0) return 0.0;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(size_t(n) + 1, 0.0), v(size_t(n) + 1, 0.0);
  std::vector<int> p(size_t(n) + 1, 0), way(size_t(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(size_t(n) + 1, inf);
    std::vector<char> used(size_t(n) + 1, 0);
    do {
      used[size_t(j0)] = 1;
      const int i0 = p[size_t(j0)];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[size_t(j)]) continue;
        const double cur = cost[size_t(i0 - 1)][size_t(j - 1)] - u[size_t(i0)] - v[size_t(j)];
        if (cur < minv[size_t(j)]) {
          minv[size_t(j)] = cur;
          way[size_t(j)] = j0;
        }
        if (minv[size_t(j)] < delta) {
          delta = minv[size_t(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[size_t(j)]) {
          u[size_t(p[size_t(j)])] += delta;
          v[size_t(j)] -= delta;
        } else {
          minv[size_t(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[size_t(j0)] != 0);
    do {
      const int j1 = way[size_t(j0)];
      p[size_t(j0)] = p[size_t(j1)];
      j0 = j1;
    } while (j0);
  }
  double total = 0.0;
  for (int j = 1; j <= n; ++j)
    if (p[size_t(j)]) {
      row_to_col[size_t(p[size_t(j)] - 1)] = j - 1;
      total += cost[size_t(p[size_t(j)] - 1)][size_t(j - 1)];
    }
  return total;
}

MatchingResult minimal_connection(const SignedPoints& pts, ConnectionMode mode) {
  const int np = int(pts.positives.size());
  const int nn = int(pts.negatives.size());
  MatchingResult res;
  if (mode == ConnectionMode::balanced) {
    if (np != nn) throw invalid_input("minimal_connection: unbalanced point counts");
    if (np == 0) return res;
    const size_t sn = size_t(np);
    std::vector<std::vector<double>> cost(sn, std::vector<double>(sn, 0.0));
    for (int i = 0; i < np; ++i)
      for (int j = 0; j < np; ++j)
        cost[size_t(i)][size_t(j)] = norm(pts.positives[size_t(i)] - pts.negatives[size_t(j)]);
    std::vector<int> rc;
    res.total_length = solve_assignment(cost, rc);
    for (int i = 0; i < np; ++i) res.pairs.emplace_back(i, rc[size_t(i)]);
    return res;
  }
  // boundary-relative: pad to (np+nn) x (nn+np). Rows: positives then
  // boundary slots for negatives; columns: negatives then boundary slots
  // for positives. Slot-slot cells cost 0.
  if (!pts.body) throw invalid_input("minimal_connection: boundary mode needs a convex body");
  const int n = np + nn;
  if (n == 0) return res;
  const size_t sn = size_t(n);
  std::vector<std::vector<double>> cost(sn, std::vector<double>(sn, 0.0));
  for (int i = 0; i < np; ++i) {
    const double bd = pts.body->distance_to_boundary(pts.positives[size_t(i)]);
    for (int j = 0; j < nn; ++j)
      cost[size_t(i)][size_t(j)] = norm(pts.positives[size_t(i)] - pts.negatives[size_t(j)]);
    for (int j = nn; j < n; ++j) cost[size_t(i)][size_t(j)] = bd;
  }
  for (int i = np; i < n; ++i) {
    const double bd = pts.body->distance_to_boundary(pts.negatives[size_t(i - np)]);
    for (int j = 0; j < nn; ++j) cost[size_t(i)][size_t(j)] = bd;
  }
  std::vector<int> rc;
  res.total_length = solve_assignment(cost, rc);
  for (int i = 0; i < np; ++i) {
    if (rc[size_t(i)] < nn)
      res.pairs.emplace_back(i, rc[size_t(i)]);
    else
      res.pairs.emplace_back(i, -1);
  }
  for (int i = np; i < n; ++i)
    if (rc[size_t(i)] < nn) res.pairs.emplace_back(-1, rc[size_t(i)]);
  return res;
}

MatchingResult brute_force_connection(const SignedPoints& pts) {
  const int n = int(pts.positives.size());
  if (int(pts.negatives.size()) != n)
    throw invalid_input("brute_force_connection: unbalanced point counts");
  if (n > 8) throw invalid_input("brute_force_connection: instance too large");
  MatchingResult res;
  if (n == 0) return res;
  std::vector<int> perm(size_t(n), 0);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> best_perm = perm;
  do {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      s += norm(pts.positives[size_t(i)] - pts.negatives[size_t(perm[size_t(i)])]);
    if (s < best) {
      best = s;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  res.total_length = best;
  for (int i = 0; i < n; ++i) res.pairs.emplace_back(i, best_perm[size_t(i)]);
  return res;
}

SegmentBoundReport segment_distance_bound(const Segment& L1, const Segment& L2) {
  SegmentBoundReport r;
  const double own = norm(L1.b - L1.a) + norm(L2.b - L2.a);
  const double crossed = norm(L1.b - L2.a) + norm(L2.b - L1.a);
  r.precondition_holds = own <= crossed + 1e-12;
  r.lhs = segment_segment_distance(L1, L2);
  double m = std::numeric_limits<double>::infinity();
  m = std::min(m, point_segment_distance(L1.a, L2));
  m = std::min(m, point_segment_distance(L1.b, L2));
  m = std::min(m, point_segment_distance(L2.a, L1));
  m = std::min(m, point_segment_distance(L2.b, L1));
  r.rhs = m / std::sqrt(2.0);
  r.ok = r.lhs >= r.rhs - 1e-12;
  return r;
}

}  // namespace gl3d
