#include <cstdio>
#include <cstdlib>
#include <random>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "gl3d/dec.hpp"
#include "gl3d/field_io.hpp"
#include "json.hpp"

using nlohmann::json;

namespace {

std::string cli_path() {
  const char* p = std::getenv("GL3D_CLI");
  REQUIRE(p != nullptr);
  return p;
}

int run(const std::string& args, std::string* output = nullptr) {
  const std::string cmd = cli_path() + " " + args + " 2>/tmp/gl3d_cli_err.txt";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (fgets(buf, sizeof buf, pipe)) out += buf;
  const int status = pclose(pipe);
  if (output) *output = out;
  return WEXITSTATUS(status);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  os << text;
}

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("mincon: golden 4+4 fixture cost matches the brute-force value") {
  // fixture produced by the exhaustive oracle (test_mincon verifies the
  // equality Hungarian == brute force on random instances)
  json cfg;
  cfg["positives"] = {{0.0, 0.0, 0.0}, {1.0, 1.0, 0.0}, {0.2, 0.8, 0.3}, {0.9, 0.1, 0.7}};
  cfg["negatives"] = {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.25, 0.85, 0.3}, {0.9, 0.2, 0.68}};
  cfg["out"] = "/tmp/gl3d_cli_mincon.json";
  write_file("/tmp/gl3d_cli_mincon_cfg.json", cfg.dump());
  std::string out;
  const int rc = run("mincon --config /tmp/gl3d_cli_mincon_cfg.json", &out);
  CHECK(rc == 0);
  // brute-force optimum over all 24 pairings (itertools enumeration)
  const double golden = 2.1726910683905105;
  CHECK(std::stod(out) == doctest::Approx(golden).epsilon(1e-12));
  json rj = json::parse(slurp("/tmp/gl3d_cli_mincon.json"));
  CHECK(rj["total_length"].get<double>() == doctest::Approx(golden).epsilon(1e-12));
  CHECK(rj["provenance"]["tool_version"].get<std::string>().substr(0, 4) == "gl3d");
}

TEST_CASE("bad schema: unknown field rejected with exit code 2") {
  json cfg;
  cfg["positives"] = {{0.0, 0.0, 0.0}};
  cfg["negatives"] = {{1.0, 0.0, 0.0}};
  cfg["no_such_field"] = 1;
  write_file("/tmp/gl3d_cli_bad_cfg.json", cfg.dump());
  std::string out;
  const int rc = run("mincon --config /tmp/gl3d_cli_bad_cfg.json", &out);
  CHECK(rc == 2);
  const std::string err = slurp("/tmp/gl3d_cli_err.txt");
  CHECK(err.find("no_such_field") != std::string::npos);
}

TEST_CASE("synthesize: empty spec gives u == 1; line round trip has degree 1") {
  SUBCASE("empty filament") {
    json cfg;
    cfg["grid"] = {{"n", 8}};
    cfg["regime"] = "S2";
    cfg["eps"] = 0.05;
    cfg["out_field"] = "/tmp/gl3d_cli_u1.fld";
    cfg["out_json"] = "/tmp/gl3d_cli_u1.json";
    write_file("/tmp/gl3d_cli_syn1.json", cfg.dump());
    CHECK(run("synthesize --config /tmp/gl3d_cli_syn1.json") == 0);
    json e;
    e["field"] = "/tmp/gl3d_cli_u1.fld";
    e["eps"] = 0.05;
    e["out"] = "/tmp/gl3d_cli_e1.json";
    write_file("/tmp/gl3d_cli_energy1.json", e.dump());
    std::string out;
    CHECK(run("energy --config /tmp/gl3d_cli_energy1.json", &out) == 0);
    CHECK(std::stod(out) == 0.0);
  }

  SUBCASE("vertical column pair extracts to per-layer degrees +-1") {
    json cfg;
    cfg["grid"] = {{"n", 32}};
    cfg["regime"] = "S2";
    cfg["eps"] = 0.04;
    json pts = json::array();
    // closed rectangle through the periodic z-direction: up at one column,
    // down at another
    // rectangle through the box interior, horizontal runs at mid-cell
    // heights so no lattice vertex sits on the filament
    cfg["filament"] = {{"kind", "polyline"},
                       {"closed", true},
                       {"points",
                        {{0.296875, 0.296875, 0.015625},
                         {0.296875, 0.296875, 0.984375},
                         {0.703125, 0.703125, 0.984375},
                         {0.703125, 0.703125, 0.015625}}}};
    cfg["out_field"] = "/tmp/gl3d_cli_u2.fld";
    cfg["out_json"] = "/tmp/gl3d_cli_u2.json";
    write_file("/tmp/gl3d_cli_syn2.json", cfg.dump());
    CHECK(run("synthesize --config /tmp/gl3d_cli_syn2.json") == 0);

    json ex;
    ex["field"] = "/tmp/gl3d_cli_u2.fld";
    ex["step"] = 4;
    ex["min_modulus"] = 0.05;
    ex["out"] = "/tmp/gl3d_cli_nu.json";
    write_file("/tmp/gl3d_cli_ext.json", ex.dump());
    CHECK(run("extract --config /tmp/gl3d_cli_ext.json --seed 3") == 0);
    json nu = json::parse(slurp("/tmp/gl3d_cli_nu.json"));
    CHECK(nu["closed"].get<bool>());
    int plus = 0, minus = 0;
    for (const auto& e : nu["dual_edges"]) {
      if (e["axis"].get<int>() != 2) continue;
      const int w = e["weight"].get<int>();
      if (w > 0) plus += w;
      if (w < 0) minus += w;
    }
    CHECK(plus >= 6);   // +1 column across the interior coarse layers
    CHECK(minus <= -6);
  }
}

TEST_CASE("hodge on the p = d(f) fixture reports tiny co-exact leakage") {
  using namespace gl3d;
  GridSpec g;
  g.dims = {16, 16, 16};
  g.spacing = 1.0 / 16.0;
  g.mode = BoundaryMode::periodic;
  Form0 f(g);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (double& v : f.a.v) v = d(rng);
  Form1 p = exterior_derivative(f);
  save_field("/tmp/gl3d_cli_grad.fld", p);

  json h;
  h["field"] = "/tmp/gl3d_cli_grad.fld";
  h["out"] = "/tmp/gl3d_cli_hodge.json";
  write_file("/tmp/gl3d_cli_hodge_cfg.json", h.dump());
  CHECK(run("hodge --config /tmp/gl3d_cli_hodge_cfg.json") == 0);
  json rep = json::parse(slurp("/tmp/gl3d_cli_hodge.json"));
  CHECK(rep["norm_dstar_beta"].get<double>() <= 1e-9 * (1.0 + l2_norm(p)));
}

TEST_CASE("gamma-sweep smoke: one coarse row completes quickly and is finite") {
  json cfg;
  cfg["regime"] = "S2";
  cfg["filament"] = {{"kind", "circle"}, {"center", {0.5, 0.5, 0.515}},
                     {"radius", 0.25}, {"segments", 64}};
  cfg["eps_list"] = {0.05};
  cfg["grid_sizes"] = {8};
  cfg["out_csv"] = "/tmp/gl3d_cli_sweep.csv";
  cfg["out_json"] = "/tmp/gl3d_cli_sweep.json";
  write_file("/tmp/gl3d_cli_sweep_cfg.json", cfg.dump());
  CHECK(run("gamma-sweep --config /tmp/gl3d_cli_sweep_cfg.json") == 0);
  json rep = json::parse(slurp("/tmp/gl3d_cli_sweep.json"));
  REQUIRE(rep["rows"].size() == 1);
  CHECK(rep["rows"][0]["ok"].get<bool>());
  CHECK(std::isfinite(rep["rows"][0]["energy_over_g"].get<double>()));
}

TEST_CASE("determinism: identical config and seed give byte-identical outputs") {
  json cfg;
  cfg["grid"] = {{"n", 16}};
  cfg["regime"] = "S2";
  cfg["eps"] = 0.05;
  cfg["filament"] = {{"kind", "circle"}, {"center", {0.515, 0.485, 0.5}},
                     {"radius", 0.22}, {"segments", 64}};
  cfg["out_field"] = "/tmp/gl3d_cli_det1.fld";
  cfg["out_json"] = "/tmp/gl3d_cli_det1.json";
  write_file("/tmp/gl3d_cli_det_cfg1.json", cfg.dump());
  cfg["out_field"] = "/tmp/gl3d_cli_det2.fld";
  cfg["out_json"] = "/tmp/gl3d_cli_det2.json";
  write_file("/tmp/gl3d_cli_det_cfg2.json", cfg.dump());
  CHECK(run("synthesize --config /tmp/gl3d_cli_det_cfg1.json --seed 5") == 0);
  CHECK(run("synthesize --config /tmp/gl3d_cli_det_cfg2.json --seed 5") == 0);
  CHECK(slurp("/tmp/gl3d_cli_det1.fld") == slurp("/tmp/gl3d_cli_det2.fld"));
}

TEST_CASE("curvature command reproduces the matched-circle residual") {
  json cfg;
  cfg["circle"] = {{"radius", 0.35}, {"n", 10000}};
  cfg["j"] = {0.0, 0.0, -1.0 / (2.0 * 0.35)};
  cfg["out"] = "/tmp/gl3d_cli_curv.json";
  write_file("/tmp/gl3d_cli_curv_cfg.json", cfg.dump());
  std::string out;
  CHECK(run("curvature --config /tmp/gl3d_cli_curv_cfg.json", &out) == 0);
  CHECK(std::stod(out) <= 1e-8 / 0.35);
}

TEST_CASE("discretize command writes the system and its property report") {
  json cfg;
  cfg["mesh"] = {{"nx", 1}, {"ny", 1}, {"nz", 1}, {"scale_num", 1}, {"scale_den", 1}};
  cfg["form"] = {{"kind", "vertical"}, {"c", 0.5}};
  cfg["denominator"] = 16;
  cfg["eta"] = 0.4;
  cfg["N"] = 2;
  cfg["enforce_h_gate"] = false;
  cfg["out"] = "/tmp/gl3d_cli_gamma.json";
  cfg["out_vtk"] = "/tmp/gl3d_cli_gamma.vtk";
  cfg["report"] = "/tmp/gl3d_cli_gamma_report.json";
  write_file("/tmp/gl3d_cli_disc_cfg.json", cfg.dump());
  CHECK(run("discretize --config /tmp/gl3d_cli_disc_cfg.json") == 0);
  json rep = json::parse(slurp("/tmp/gl3d_cli_gamma_report.json"));
  CHECK(rep["h"].get<double>() == doctest::Approx(1.0 / 16.0).epsilon(1e-15));
  CHECK(rep["n_segments"].get<int>() > 0);
  CHECK(rep["mass"].get<double>() >= 0.5 - 1e-9);
  json sys = json::parse(slurp("/tmp/gl3d_cli_gamma.json"));
  CHECK(sys["segments"].size() == size_t(rep["n_segments"].get<int>()));
}
