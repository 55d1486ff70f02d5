#include "gl3d/flat_norm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gl3d/errors.hpp"

namespace gl3d {

double PointMeasure::total(int component) const {
  double s = 0.0;
  for (const Atom& a : atoms)
    if (a.component == component) s += a.w;
  return s;
}

// Successive shortest augmenting paths with potentials on the dense
// bipartite residual graph. Each augmentation saturates a source or a
// sink, so at most |S|+|D| iterations run.
double solve_transport(const std::vector<double>& supply,
                       const std::vector<double>& demand,
                       const std::vector<std::vector<double>>& cost) {
  const int P = int(supply.size()), N = int(demand.size());
  if (P == 0 || N == 0) {
    double s = 0.0;
    for (double v : supply) s += v;
    for (double v : demand) s += v;
    if (s > 1e-12) throw invalid_input("solve_transport: unbalanced empty instance");
    return 0.0;
  }
  std::vector<double> rem_s = supply, rem_d = demand;
  std::vector<std::vector<double>> flow(size_t(P), std::vector<double>(size_t(N), 0.0));
  std::vector<double> pot_s(size_t(P), 0.0), pot_d(size_t(N), 0.0);
  const double inf = std::numeric_limits<double>::infinity();

  double total_supply = 0.0;
  for (double v : supply) total_supply += v;

  double shipped = 0.0, total_cost = 0.0;
  while (shipped < total_supply - 1e-13 * (1.0 + total_supply)) {
    // Dijkstra over 2-layer graph; distances to sources and sinks.
    std::vector<double> ds(size_t(P), inf), dd(size_t(N), inf);
    std::vector<int> prev_sink_of_src(size_t(P), -2);  // sink we came from (-1 = origin)
    std::vector<int> prev_src_of_sink(size_t(N), -2);
    std::vector<char> done_s(size_t(P), 0), done_d(size_t(N), 0);
    for (int i = 0; i < P; ++i)
      if (rem_s[size_t(i)] > 0.0) {
        ds[size_t(i)] = 0.0;
        prev_sink_of_src[size_t(i)] = -1;
      }
    while (true) {
      // pick unfinished node with smallest tentative distance
      double best = inf;
      int bi = -1;
      bool is_src = true;
      for (int i = 0; i < P; ++i)
        if (!done_s[size_t(i)] && ds[size_t(i)] < best) { best = ds[size_t(i)]; bi = i; is_src = true; }
      for (int j = 0; j < N; ++j)
        if (!done_d[size_t(j)] && dd[size_t(j)] < best) { best = dd[size_t(j)]; bi = j; is_src = false; }
      if (bi < 0) break;
      if (is_src) {
        done_s[size_t(bi)] = 1;
        const auto& crow = cost[size_t(bi)];
        for (int j = 0; j < N; ++j) {
          if (done_d[size_t(j)]) continue;
          const double rc = crow[size_t(j)] - pot_s[size_t(bi)] + pot_d[size_t(j)];
          if (ds[size_t(bi)] + rc < dd[size_t(j)]) {
            dd[size_t(j)] = ds[size_t(bi)] + rc;
            prev_src_of_sink[size_t(j)] = bi;
          }
        }
      } else {
        done_d[size_t(bi)] = 1;
        for (int i = 0; i < P; ++i) {
          if (done_s[size_t(i)] || flow[size_t(i)][size_t(bi)] <= 0.0) continue;
          const double rc = -(cost[size_t(i)][size_t(bi)] - pot_s[size_t(i)] + pot_d[size_t(bi)]);
          if (dd[size_t(bi)] + rc < ds[size_t(i)]) {
            ds[size_t(i)] = dd[size_t(bi)] + rc;
            prev_sink_of_src[size_t(i)] = bi;
          }
        }
      }
    }
    // choose reachable sink with remaining demand
    int tgt = -1;
    double bestd = inf;
    for (int j = 0; j < N; ++j)
      if (rem_d[size_t(j)] > 0.0 && dd[size_t(j)] < bestd) { bestd = dd[size_t(j)]; tgt = j; }
    if (tgt < 0) throw contract_error("solve_transport: no augmenting path (unbalanced?)");
    // bottleneck along path
    double bottleneck = rem_d[size_t(tgt)];
    {
      int j = tgt;
      while (true) {
        const int i = prev_src_of_sink[size_t(j)];
        if (prev_sink_of_src[size_t(i)] == -1) { bottleneck = std::min(bottleneck, rem_s[size_t(i)]); break; }
        const int jp = prev_sink_of_src[size_t(i)];
        bottleneck = std::min(bottleneck, flow[size_t(i)][size_t(jp)]);
        j = jp;
      }
    }
    // apply augmentation
    {
      int j = tgt;
      rem_d[size_t(tgt)] -= bottleneck;
      while (true) {
        const int i = prev_src_of_sink[size_t(j)];
        flow[size_t(i)][size_t(j)] += bottleneck;
        total_cost += bottleneck * cost[size_t(i)][size_t(j)];
        if (prev_sink_of_src[size_t(i)] == -1) { rem_s[size_t(i)] -= bottleneck; break; }
        const int jp = prev_sink_of_src[size_t(i)];
        flow[size_t(i)][size_t(jp)] -= bottleneck;
        total_cost -= bottleneck * cost[size_t(i)][size_t(jp)];
        j = jp;
      }
    }
    shipped += bottleneck;
    // potential update capped at the target distance keeps reduced costs
    // nonnegative for arcs touching unreached nodes
    for (int i = 0; i < P; ++i)
      pot_s[size_t(i)] -= std::min(ds[size_t(i)], bestd);
    for (int j = 0; j < N; ++j)
      pot_d[size_t(j)] -= std::min(dd[size_t(j)], bestd);
  }
  return total_cost;
}

namespace {

double flat_norm_component(const std::vector<Vec3>& px, const std::vector<double>& pw,
                           const std::vector<Vec3>& nx, const std::vector<double>& nw,
                           double R) {
  // Balanced transportation with a boundary source/sink absorbing or
  // emitting mass at cost R per unit.
  const int P = int(px.size()), N = int(nx.size());
  if (P == 0 && N == 0) return 0.0;
  double sp = 0.0, sn = 0.0;
  for (double v : pw) sp += v;
  for (double v : nw) sn += v;
  std::vector<double> supply = pw;
  supply.push_back(sn);  // boundary source feeds negatives
  std::vector<double> demand = nw;
  demand.push_back(sp);  // boundary sink absorbs positives
  std::vector<std::vector<double>> cost(size_t(P) + 1, std::vector<double>(size_t(N) + 1, 0.0));
  for (int i = 0; i < P; ++i) {
    for (int j = 0; j < N; ++j)
      cost[size_t(i)][size_t(j)] = std::min(norm(px[size_t(i)] - nx[size_t(j)]), 2.0 * R);
    cost[size_t(i)][size_t(N)] = R;
  }
  for (int j = 0; j < N; ++j) cost[size_t(P)][size_t(j)] = R;
  cost[size_t(P)][size_t(N)] = 0.0;
  return solve_transport(supply, demand, cost);
}

}  // namespace

double flat_norm_w11(const PointMeasure& mu, double R) {
  if (!(R > 0.0)) throw invalid_input("flat_norm_w11: scale R must be positive");
  double total = 0.0;
  for (int c = 0; c < 3; ++c) {
    std::vector<Vec3> px, nx;
    std::vector<double> pw, nw;
    for (const auto& a : mu.atoms) {
      if (a.component != c || a.w == 0.0) continue;
      if (a.w > 0.0) {
        px.push_back(a.x);
        pw.push_back(a.w);
      } else {
        nx.push_back(a.x);
        nw.push_back(-a.w);
      }
    }
    if (px.size() + nx.size() > 20000)
      throw invalid_input("flat_norm_w11: instance too large; coarsen or raise drop_tol");
    total += flat_norm_component(px, pw, nx, nw, R);
  }
  return total;
}

PointMeasure form2_measure(const Form2& w, double drop_tol) {
  PointMeasure mu;
  const GridSpec& g = w.grid;
  const double area = g.spacing * g.spacing;
  for (int axis = 0; axis < 3; ++axis) {
    const int b = (axis + 1) % 3, c = (axis + 2) % 3;
    const Dims3& d = w.comp[axis].dims;
    for (int64_t k = 0; k < d.n[2]; ++k)
      for (int64_t j = 0; j < d.n[1]; ++j)
        for (int64_t i = 0; i < d.n[0]; ++i) {
          const double val = w.comp[axis].at(i, j, k);
          if (std::fabs(val) * area <= drop_tol) continue;
          Vec3 x = g.vertex_pos(i, j, k);
          x[b] += 0.5 * g.spacing;
          x[c] += 0.5 * g.spacing;
          mu.add(x, val * area, axis);
        }
  }
  return mu;
}

PointMeasure form2_difference_measure(const Form2& a, const Form2& b, double drop_tol) {
  if (!a.grid.same_layout(b.grid))
    throw invalid_input("form2_difference_measure: grid mismatch");
  Form2 d = a;
  for (int c = 0; c < 3; ++c)
    for (size_t i = 0; i < d.comp[c].v.size(); ++i) d.comp[c].v[i] -= b.comp[c].v[i];
  return form2_measure(d, drop_tol);
}

void add_segment_current(PointMeasure& mu, const Segment& s, double weight,
                         double max_chunk) {
  const double L = s.length();
  if (L == 0.0 || weight == 0.0) return;
  const int n = std::max<int>(1, int(std::ceil(L / max_chunk)));
  const Vec3 t = s.tangent();
  for (int i = 0; i < n; ++i) {
    const double ds = L / n;
    const Vec3 x = s.point((i + 0.5) / n);
    for (int c = 0; c < 3; ++c) mu.add(x, weight * t[c] * ds, c);
  }
}

}  // namespace gl3d
