#include <cmath>
#include <random>
#include <map>

#include "doctest.h"
#include "gl3d/recovery.hpp"
#include "gl3d/vortex_extract.hpp"

using namespace gl3d;

namespace {

GridSpec torus(int64_t n, double L = 1.0) {
  GridSpec g;
  g.dims = {n, n, n};
  g.spacing = L / double(n);
  g.mode = BoundaryMode::periodic;
  return g;
}

}  // namespace

TEST_CASE("modulus profile: empty system, column distances, ring tube") {
  GridSpec g = torus(32);

  SUBCASE("empty system gives rho == 1") {
    VortexSystem empty;
    Form0 rho = modulus_profile(g, empty, 0.05);
    for (double v : rho.a.v) CHECK(v == 1.0);
  }

  SUBCASE("column: rho = dist/eps clipped") {
    VortexSystem col = line_system({0.5, 0.5, -1.0}, {0.5, 0.5, 2.0}, 1.0);
    const double eps = 0.1;
    Form0 rho = modulus_profile(g, col, eps);
    // vertex at (0.5 + eps/2, 0.5, z) sits at distance eps/2
    // grid spacing 1/32: eps/2 = 0.05 = 1.6 cells; use an exact vertex:
    // (0.5+1/16, 0.5, *) at distance 1/16 = 0.625 eps
    const int64_t i = 16 + 2, j = 16, k = 5;
    CHECK(rho.a.at(i, j, k) == doctest::Approx((2.0 / 32.0) / eps).epsilon(1e-12));
    CHECK(rho.a.at(0, 0, 0) == 1.0);
    CHECK(rho.a.at(16, 16, 9) == 0.0);  // on the line
  }

  SUBCASE("ring: tube cell count matches the solid-torus volume") {
    const double R = 0.25, eps = 4.0 / 32.0;
    VortexSystem ring = circle_system({0.5, 0.5, 0.5}, R, 2, 256, 1.0);
    Form0 rho = modulus_profile(g, ring, eps);
    int64_t inside = 0;
    for (double v : rho.a.v)
      if (v < 1.0) ++inside;
    const double vol = double(inside) * std::pow(g.spacing, 3);
    const double expect = 2.0 * M_PI * R * M_PI * eps * eps;
    CHECK(vol >= 0.7 * expect);
    CHECK(vol <= 1.3 * expect);
  }
}

TEST_CASE("phase assembly: zero field, exact gradients, tree independence") {
  GridSpec g = torus(16);

  SUBCASE("A = 0 gives u == 1") {
    Form1 A(g);
    PhaseField pf = phase_assemble(A, nullptr, 1.0);
    for (const cplx& v : pf.v.values) CHECK(std::abs(v - cplx(1.0, 0.0)) == 0.0);
    CHECK(pf.max_unpierced_defect == 0.0);
  }

  SUBCASE("exact gradient integrates to the potential difference") {
    Form0 f(g);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-0.5, 0.5);
    for (double& v : f.a.v) v = d(rng);
    Form1 A = exterior_derivative(f);
    PhaseField pf = phase_assemble(A, nullptr, 1.0, 0.05);
    const double root = f.a.at(0, 0, 0);
    for (int64_t k = 0; k < 16; ++k)
      for (int64_t j = 0; j < 16; ++j)
        for (int64_t i = 0; i < 16; ++i) {
          const cplx expect = std::polar(1.0, f.a.at(i, j, k) - root);
          CHECK(std::abs(pf.v.at(i, j, k) - expect) <= 1e-10);
        }
  }

  SUBCASE("BFS and DFS trees agree up to a global phase") {
    // a legitimate field: spectral vortex field of a closed loop, scaled
    PoissonConfig cfg = PoissonConfig::for_grid(g);
    VortexSystem ring = circle_system({0.53, 0.5, 0.5}, 0.22, 2, 128, 1.0 / 4.0);
    Form2 q = rasterize_to_form2(ring, g);
    Form1 A = spectral_vortex_field(q, cfg);
    for (int c = 0; c < 3; ++c)
      for (double& v : A.comp[c].v) v *= 2.0 * M_PI / ring.weight_h;
    quantize_torus_holonomy(A);
    PhaseField a = phase_assemble(A, &q, ring.weight_h, 0.05, TreeKind::bfs);
    PhaseField b = phase_assemble(A, &q, ring.weight_h, 0.05, TreeKind::dfs);
    const cplx g0 = b.v.values[0] / a.v.values[0];
    for (size_t t = 0; t < a.v.values.size(); ++t)
      CHECK(std::abs(b.v.values[t] - g0 * a.v.values[t]) <= 1e-6);
  }
}

TEST_CASE("recovery field: trivial, pure momentum winding, vortex round trip") {
  SUBCASE("empty input gives u == 1 with zero energy") {
    GridSpec g = torus(16);
    RecoveryParams params = RecoveryParams::make(Regime::S2, 0.05);
    PoissonConfig cfg = PoissonConfig::for_grid(g);
    RecoveryInput in;
    RecoveryResult r = recovery_field(g, in, params, cfg);
    for (const cplx& v : r.u.values) CHECK(std::abs(v - cplx(1, 0)) <= 1e-15);
    Potential W = Potential::ginzburg_landau();
    CHECK(energy(r.u, params.eps, W).total == 0.0);
  }

  SUBCASE("torus winding carries the expected momentum energy") {
    GridSpec g = torus(24);
    RecoveryParams params = RecoveryParams::make(Regime::S3, 0.02);
    PoissonConfig cfg = PoissonConfig::for_grid(g);
    RecoveryInput in;
    in.torus_winding = {0, 0, 2};
    RecoveryResult r = recovery_field(g, in, params, cfg);
    Potential W = Potential::ginzburg_landau();
    const double E = energy(r.u, params.eps, W).total;
    // E/g for u = exp(2 pi i n z / L): 1/2 (2 pi n h / L)^2 |Omega| at
    // lattice accuracy (sinc^2 factor)
    const double v0 = 2.0 * M_PI * 2.0 * params.h;  // |v| = h |grad theta|
    const double expect = 0.5 * v0 * v0;
    CHECK(E / params.g == doctest::Approx(expect).epsilon(0.05));
  }

  SUBCASE("vortex column pair: |u| <= 1, zeros on the lines, degrees recovered") {
    GridSpec g = torus(32);
    RecoveryParams params = RecoveryParams::make(Regime::S2, 0.04);
    PoissonConfig cfg = PoissonConfig::for_grid(g);
    VortexSystem pair;
    pair.weight_h = params.h;
    pair.segments = {{{0.296875, 0.296875, 0.0}, {0.296875, 0.296875, 1.0}},
                     {{0.703125, 0.703125, 1.0}, {0.703125, 0.703125, 0.0}}};
    pair.region = {0, 0};
    pair.loops = {{0}, {1}};
    pair.loop_closed = {0, 0};
    RecoveryInput in;
    in.gamma = &pair;
    RecoveryResult r = recovery_field(g, in, params, cfg);
    for (const cplx& v : r.u.values) CHECK(std::abs(v) <= 1.0 + 1e-12);
    CHECK(r.phase.max_unpierced_defect <= 1e-6);

    auto off = choose_offset(r.u, 4, 16, 99);
    DiscreteVorticity nu = extract_vorticity(r.u, 4, off, 0.05);
    CHECK(nu.closed());
    // per layer: exactly one +1 column and one -1 column
    std::map<int64_t, int> plus, minus;
    for (const auto& e : nu.dual_edges) {
      REQUIRE(e.axis == 2);
      if (e.weight > 0)
        plus[e.k] += e.weight;
      else
        minus[e.k] += e.weight;
    }
    for (auto& [k, w] : plus) CHECK(w == 1);
    for (auto& [k, w] : minus) CHECK(w == -1);
    CHECK(int(plus.size()) == int(nu.coarse.ncells[2]));
    CHECK(int(minus.size()) == int(nu.coarse.ncells[2]));
  }
}

TEST_CASE("ring recovery: extraction reproduces the linking class") {
  GridSpec g = torus(32);
  RecoveryParams params = RecoveryParams::make(Regime::S2, 0.05);
  PoissonConfig cfg = PoissonConfig::for_grid(g);
  const double R = 0.25;
  VortexSystem ring = circle_system({0.515, 0.485, 0.515}, R, 2, 200, params.h);
  RecoveryInput in;
  in.gamma = &ring;
  RecoveryResult r = recovery_field(g, in, params, cfg);
  CHECK(r.phase.max_unpierced_defect <= 1e-6);
  auto off = choose_offset(r.u, 4, 16, 7);
  DiscreteVorticity nu = extract_vorticity(r.u, 4, off, 0.05);
  CHECK(nu.closed());
  CHECK(!nu.dual_edges.empty());

  // the extracted dual cycle as a unit-weight current
  VortexSystem dual;
  dual.weight_h = 1.0;
  for (const auto& e : nu.dual_edges) {
    Segment s = nu.dual_segment(e);
    const int w = std::abs(e.weight);
    for (int t = 0; t < w; ++t) {
      if (e.weight > 0)
        dual.segments.push_back(s);
      else
        dual.segments.push_back({s.b, s.a});
      dual.region.push_back(0);
    }
  }

  // probe loops threading the ring: small circles around the filament core
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ad(0.0, 2.0 * M_PI);
  int agreements = 0;
  for (int rep = 0; rep < 10; ++rep) {
    const double a = ad(rng);
    const Vec3 core{0.515 + R * std::cos(a), 0.485 + R * std::sin(a), 0.515};
    // probe circle in the (radial, z) plane around the core
    std::vector<Vec3> probe;
    const Vec3 radial{std::cos(a), std::sin(a), 0.0};
    const double r0 = 0.09;
    for (int t = 0; t < 48; ++t) {
      const double b = 2.0 * M_PI * t / 48.0;
      probe.push_back(core + radial * (r0 * std::cos(b)) +
                      Vec3{0, 0, r0 * std::sin(b)});
    }
    auto lk_ring = linking_number(probe, ring);
    auto lk_dual = linking_number(probe, dual);
    CHECK(lk_ring.residual <= 1e-4);
    CHECK(lk_dual.residual <= 1e-4);
    CHECK(std::labs(lk_ring.link) == 1);
    if (lk_ring.link == lk_dual.link) ++agreements;
  }
  CHECK(agreements == 10);
}

TEST_CASE("limit functionals") {
  GridSpec g = torus(16);

  SUBCASE("zero data") {
    Form1 v(g);
    VortexSystem none;
    none.weight_h = 1.0;
    CHECK(limit_energy(none, &v) == 0.0);
    Form1 A(g), Aex(g);
    CHECK(limit_F(v, A, Aex) == 0.0);
  }

  SUBCASE("straight line of length L, multiplicity 1") {
    VortexSystem line = line_system({0, 0, 0}, {0, 0, 0.8}, 1.0);
    CHECK(limit_energy(line, nullptr) == doctest::Approx(M_PI * 0.8).epsilon(1e-12));
  }

  SUBCASE("circle of radius R") {
    VortexSystem ring = circle_system({0, 0, 0}, 0.25, 2, 4096, 1.0);
    CHECK(limit_energy(ring, nullptr) ==
          doctest::Approx(M_PI * 2.0 * M_PI * 0.25).epsilon(1e-5));
  }

  SUBCASE("v = A, dA = dA_ex leaves only the dv mass term") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Form1 v(g);
    for (int c = 0; c < 3; ++c)
      for (double& t : v.comp[c].v) t = d(rng);
    const double F = limit_F(v, v, v);
    Form2 dv = exterior_derivative(v);
    CHECK(F == doctest::Approx(0.5 * norm_lq(dv, 1.0)).epsilon(1e-12));
  }

  SUBCASE("pure quadratic field energy matches the closed form") {
    // A = c x dy on the unit torus box, v = 0: F = 1/2 ||A||^2 + 1/2||dA||^2;
    // use A_ex = A so the curl term cancels: F = 1/2 c^2 int x^2 = c^2/6
    const double c = 0.8;
    GridSpec gb;
    gb.dims = {33, 33, 33};
    gb.spacing = 1.0 / 32.0;
    gb.mode = BoundaryMode::box;
    Form1 A(gb), v(gb), Aex(gb);
    Dims3 dd = A.comp[1].dims;
    for (int64_t k = 0; k < dd.n[2]; ++k)
      for (int64_t j = 0; j < dd.n[1]; ++j)
        for (int64_t i = 0; i < dd.n[0]; ++i) {
          A.comp[1].at(i, j, k) = c * double(i) / 32.0;
          Aex.comp[1].at(i, j, k) = A.comp[1].at(i, j, k);
        }
    const double F = limit_F(v, A, Aex);
    CHECK(F == doctest::Approx(c * c / 6.0).epsilon(0.01));
  }
}

TEST_CASE("curvature residual") {
  SUBCASE("straight filament with j = 0") {
    std::vector<Vec3> pts;
    for (int t = 0; t < 100; ++t) pts.push_back({0.01 * t, 0, 0});
    auto rep = curvature_residual(pts, false, [](const Vec3&) { return Vec3{0, 0, 0}; });
    CHECK(rep.max_residual <= 1e-10);
  }

  SUBCASE("circle with the matched current: residual below 1e-8 / R") {
    const double R = 0.35;
    const int n = 10000;
    std::vector<Vec3> pts;
    for (int t = 0; t < n; ++t) {
      const double a = 2.0 * M_PI * t / n;
      pts.push_back({R * std::cos(a), R * std::sin(a), 0.0});
    }
    // counterclockwise circle: kappa points inward, 2 tau x j must match;
    // the correct sign is j = -(1/2R) dz
    auto j_good = [&](const Vec3&) { return Vec3{0, 0, -1.0 / (2.0 * R)}; };
    auto rep = curvature_residual(pts, true, j_good);
    CHECK(rep.max_residual <= 1e-8 / R);
    auto j_bad = [&](const Vec3&) { return Vec3{0, 0, 1.0 / (2.0 * R)}; };
    auto rep_bad = curvature_residual(pts, true, j_bad);
    CHECK(rep_bad.max_residual >= 1.0 / R);  // wrong sign cannot match
  }

  SUBCASE("circle with j = 0 reports exactly the curvature magnitude") {
    const double R = 0.5;
    const int n = 4096;
    std::vector<Vec3> pts;
    for (int t = 0; t < n; ++t) {
      const double a = 2.0 * M_PI * t / n;
      pts.push_back({R * std::cos(a), R * std::sin(a), 0.0});
    }
    auto rep = curvature_residual(pts, true, [](const Vec3&) { return Vec3{0, 0, 0}; });
    CHECK(rep.max_residual == doctest::Approx(1.0 / R).epsilon(1e-9));
  }

  SUBCASE("degenerate duplicate vertices rejected") {
    std::vector<Vec3> pts{{0, 0, 0}, {0, 0, 0}, {1, 0, 0}};
    CHECK_THROWS_AS(curvature_residual(pts, false, [](const Vec3&) { return Vec3{}; }),
                    invalid_input);
  }
}

TEST_CASE("S1 regime: dual weights combine vortex and momentum phases") {
  // below the critical regime the vortex phase carries the coarser weight
  // h' while the harmonic momentum winding is quantized at h
  GridSpec g = torus(32);
  // the S1 window g in (|log|, |log|^2/4) with h < eta^2 only opens at small
  // eps; pin an admissible point with the override schedules
  RecoveryParams params = RecoveryParams::make(Regime::S1, 0.01, 0.9, 0.0, 5.0);
  params.validate();
  CHECK(params.h / params.hprime < 0.5);
  PoissonConfig cfg = PoissonConfig::for_grid(g);
  VortexSystem ring = circle_system({0.515, 0.485, 0.515}, 0.25, 2, 160, params.hprime);
  CHECK(params.hprime < 1.0);
  RecoveryInput in;
  in.gamma = &ring;
  in.torus_winding = {0, 0, 1};
  RecoveryResult r = recovery_field(g, in, params, cfg);
  CHECK(r.phase.max_unpierced_defect <= 1e-6);
  for (const cplx& v : r.u.values) CHECK(std::abs(v) <= 1.0 + 1e-12);
  // the ring is still extracted exactly despite the momentum winding
  auto off = choose_offset(r.u, 4, 8, 17);
  DiscreteVorticity nu = extract_vorticity(r.u, 4, off, 0.05);
  CHECK(nu.closed());
  CHECK(!nu.dual_edges.empty());
  // and the torus winding survives: lattice line through a far corner
  std::vector<std::array<int64_t, 3>> line;
  for (int64_t k = 0; k < 32; ++k) line.push_back({1, 1, k});
  auto w = loop_degree(r.u, line, 0.05);
  REQUIRE(w.has_value());
  CHECK(*w == 1);
}
