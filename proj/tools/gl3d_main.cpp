// gl3d: synthesis, extraction and verification tools for quantized vortex
// line systems in 3-D Ginzburg-Landau fields.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gl3d/biot_savart.hpp"
#include "gl3d/field_io.hpp"
#include "gl3d/gamma_sweep.hpp"
#include "gl3d/line_discretize.hpp"
#include "gl3d/mincon.hpp"
#include "gl3d/recovery.hpp"
#include "gl3d/vortex_extract.hpp"
#include "json.hpp"

using namespace gl3d;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "gl3d 1.0.0";

int log_level() {
  const char* env = std::getenv("GL3D_LOG");
  if (!env) return 1;
  const std::string s(env);
  if (s == "quiet" || s == "0") return 0;
  if (s == "debug" || s == "2") return 2;
  return 1;
}

void logi(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[gl3d] " << msg << "\n";
}

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash(const json& j) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(j.dump());
  return os.str();
}

json provenance(const json& cfg, const std::string& stage) {
  return json{{"tool_version", kToolVersion},
              {"config_hash", config_hash(cfg)},
              {"stage", stage}};
}

void require_keys(const json& j, const std::vector<std::string>& allowed,
                  const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const auto& k : allowed) ok = ok || it.key() == k;
    if (!ok)
      throw invalid_input("config: unknown field '" + it.key() + "' in " + where);
  }
}

json load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw invalid_input("cannot open config " + path);
  json j;
  try {
    is >> j;
  } catch (const std::exception& ex) {
    throw invalid_input(std::string("config parse error: ") + ex.what());
  }
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw invalid_input("cannot write " + path);
  os << text;
}

std::string out_path(const std::string& dir, const std::string& name) {
  if (dir.empty()) return name;
  return dir + "/" + name;
}

GridSpec grid_from_json(const json& j) {
  require_keys(j, {"n", "dims", "spacing", "mode", "origin"}, "grid");
  GridSpec g;
  if (j.contains("dims")) {
    auto d = j["dims"];
    g.dims = {d.at(0).get<int64_t>(), d.at(1).get<int64_t>(), d.at(2).get<int64_t>()};
  } else {
    const int64_t n = j.at("n").get<int64_t>();
    g.dims = {n, n, n};
  }
  const std::string mode = j.value("mode", "periodic");
  if (mode == "periodic")
    g.mode = BoundaryMode::periodic;
  else if (mode == "box")
    g.mode = BoundaryMode::box;
  else
    throw invalid_input("grid.mode must be 'periodic' or 'box'");
  g.spacing = j.value("spacing", 1.0 / double(g.dims[0] - (g.periodic() ? 0 : 1)));
  if (j.contains("origin")) {
    auto o = j["origin"];
    g.origin = {o.at(0).get<double>(), o.at(1).get<double>(), o.at(2).get<double>()};
  }
  g.validate();
  return g;
}

FilamentSpec filament_from_json(const json& j) {
  require_keys(j,
               {"kind", "a", "b", "center", "radius", "axis", "segments", "points",
                "closed"},
               "filament");
  FilamentSpec f;
  const std::string kind = j.value("kind", "none");
  if (kind == "none")
    f.kind = FilamentSpec::Kind::none;
  else if (kind == "line")
    f.kind = FilamentSpec::Kind::line;
  else if (kind == "circle")
    f.kind = FilamentSpec::Kind::circle;
  else if (kind == "polyline")
    f.kind = FilamentSpec::Kind::polyline;
  else
    throw invalid_input("filament.kind must be none|line|circle|polyline");
  auto vec3 = [](const json& v) {
    return Vec3{v.at(0).get<double>(), v.at(1).get<double>(), v.at(2).get<double>()};
  };
  if (j.contains("a")) f.a = vec3(j["a"]);
  if (j.contains("b")) f.b = vec3(j["b"]);
  if (j.contains("center")) f.center = vec3(j["center"]);
  f.radius = j.value("radius", 0.25);
  f.axis = j.value("axis", 2);
  f.segments = j.value("segments", 256);
  f.closed = j.value("closed", true);
  if (j.contains("points"))
    for (const auto& p : j["points"]) f.polyline.push_back(vec3(p));
  return f;
}

Regime regime_from_string(const std::string& s) {
  if (s == "S1") return Regime::S1;
  if (s == "S2") return Regime::S2;
  if (s == "S3") return Regime::S3;
  throw invalid_input("regime must be S1|S2|S3");
}

// -------- subcommands --------

int cmd_synthesize(const json& cfg, const std::string& out_dir) {
  require_keys(cfg,
               {"grid", "filament", "system_json", "regime", "eps", "eta", "delta",
                "g", "winding", "out_field", "out_json"},
               "synthesize");
  GridSpec g = grid_from_json(cfg.at("grid"));
  RecoveryParams params =
      RecoveryParams::make(regime_from_string(cfg.value("regime", "S2")),
                           cfg.value("eps", 0.05), cfg.value("eta", 0.0),
                           cfg.value("delta", 0.0), cfg.value("g", 0.0));
  PoissonConfig pcfg = PoissonConfig::for_grid(g);

  VortexSystem gamma;
  if (cfg.contains("system_json")) {
    gamma = VortexSystem::load_json(cfg["system_json"].get<std::string>());
  } else if (cfg.contains("filament")) {
    FilamentSpec f = filament_from_json(cfg["filament"]);
    gamma = f.system(params.h);
  }
  RecoveryInput in;
  if (!gamma.segments.empty()) in.gamma = &gamma;
  if (cfg.contains("winding")) {
    auto w = cfg["winding"];
    in.torus_winding = {w.at(0).get<long>(), w.at(1).get<long>(), w.at(2).get<long>()};
  }
  RecoveryResult r = recovery_field(g, in, params, pcfg);
  const std::string field_path = out_path(out_dir, cfg.value("out_field", "u.fld"));
  save_field(field_path, r.u);
  json meta = provenance(cfg, "synthesize");
  meta["eps"] = params.eps;
  meta["h"] = gamma.segments.empty() ? params.h : gamma.weight_h;
  meta["g"] = params.g;
  meta["max_unpierced_defect"] = r.phase.max_unpierced_defect;
  meta["field"] = field_path;
  write_text(out_path(out_dir, cfg.value("out_json", "synthesize.json")),
             meta.dump(2) + "\n");
  logi("synthesized field -> " + field_path);
  return 0;
}

int cmd_extract(const json& cfg, const std::string& out_dir, uint64_t seed) {
  require_keys(cfg,
               {"field", "step", "offset", "auto_offset_k", "min_modulus", "out",
                "out_vtk"},
               "extract");
  ComplexField u = load_complex_field(cfg.at("field").get<std::string>());
  const int64_t step = cfg.value("step", 4);
  const double minmod = cfg.value("min_modulus", 0.1);
  std::array<int64_t, 3> off{0, 0, 0};
  if (cfg.contains("offset")) {
    auto o = cfg["offset"];
    off = {o.at(0).get<int64_t>(), o.at(1).get<int64_t>(), o.at(2).get<int64_t>()};
  } else {
    off = choose_offset(u, step, cfg.value("auto_offset_k", 16), seed);
  }
  DiscreteVorticity nu = extract_vorticity(u, step, off, minmod);
  json out;
  out["provenance"] = provenance(cfg, "extract");
  out["cell_size"] = nu.cell_size();
  out["offset"] = {off[0], off[1], off[2]};
  out["closed"] = nu.closed();
  out["mass"] = nu.mass();
  json edges = json::array();
  for (const auto& e : nu.dual_edges)
    edges.push_back({{"i", e.i}, {"j", e.j}, {"k", e.k}, {"axis", e.axis},
                     {"weight", e.weight}});
  out["dual_edges"] = std::move(edges);
  write_text(out_path(out_dir, cfg.value("out", "vorticity.json")), out.dump(2) + "\n");
  if (cfg.contains("out_vtk")) {
    VortexSystem dual;
    dual.weight_h = 1.0;
    for (const auto& e : nu.dual_edges) {
      Segment s = nu.dual_segment(e);
      if (e.weight < 0) std::swap(s.a, s.b);
      dual.segments.push_back(s);
      dual.region.push_back(0);
    }
    dual.save_vtk(out_path(out_dir, cfg["out_vtk"].get<std::string>()));
  }
  logi("extracted " + std::to_string(nu.dual_edges.size()) + " dual edges");
  return 0;
}

int cmd_energy(const json& cfg, const std::string& out_dir) {
  require_keys(cfg, {"field", "eps", "out"}, "energy");
  ComplexField u = load_complex_field(cfg.at("field").get<std::string>());
  const double eps = cfg.at("eps").get<double>();
  Potential W = Potential::ginzburg_landau();
  EnergyResult e = energy(u, eps, W);
  json out;
  out["provenance"] = provenance(cfg, "energy");
  out["eps"] = eps;
  out["total"] = e.total;
  write_text(out_path(out_dir, cfg.value("out", "energy.json")), out.dump(2) + "\n");
  std::ostringstream os;
  os.precision(17);
  os << e.total;
  std::cout << os.str() << "\n";
  return 0;
}

PLOneForm pl_form_from_json(const json& cfg) {
  const json& mj = cfg.at("mesh");
  require_keys(mj, {"nx", "ny", "nz", "scale_num", "scale_den"}, "mesh");
  auto mesh = std::make_shared<RationalSimplicialMesh>(triangulate_block(
      mj.value("nx", 1), mj.value("ny", 1), mj.value("nz", 1),
      rat(mj.value("scale_num", 1), mj.value("scale_den", 1))));
  const json& fj = cfg.at("form");
  require_keys(fj, {"kind", "c", "filament"}, "form");
  const std::string kind = fj.value("kind", "vertical");
  OneFormFn fn;
  if (kind == "vertical") {
    const double c = fj.value("c", 0.5);
    fn = [c](const Vec3& x) { return Vec3{0.0, c * x.x, 0.0}; };
  } else if (kind == "filament_bs") {
    FilamentSpec f = filament_from_json(fj.at("filament"));
    auto sys = std::make_shared<VortexSystem>(f.system(1.0));
    fn = [sys](const Vec3& x) {
      Vec3 acc{0, 0, 0};
      for (const Segment& s : sys->segments) acc += biot_savart_segment(s, x);
      return acc;
    };
  } else {
    throw invalid_input("form.kind must be vertical|filament_bs");
  }
  return rationalize(interpolate(fn, mesh), cfg.value("denominator", 720UL));
}

int cmd_discretize(const json& cfg, const std::string& out_dir) {
  require_keys(cfg,
               {"mesh", "form", "denominator", "eta", "N", "target_h",
                "enforce_h_gate", "out", "out_vtk", "report"},
               "discretize");
  PLOneForm p = pl_form_from_json(cfg);
  const double eta = cfg.value("eta", 0.2);
  long N = cfg.value("N", 0L);
  if (N <= 0) N = choose_subdivision(p, eta, cfg.value("target_h", eta * eta * 0.5));
  const bool gate = cfg.value("enforce_h_gate", true);
  VortexSystem sys = discretize_vorticity(p, eta, N, gate);
  sys.save_json(out_path(out_dir, cfg.value("out", "gamma.json")));
  if (cfg.contains("out_vtk"))
    sys.save_vtk(out_path(out_dir, cfg["out_vtk"].get<std::string>()));
  if (cfg.contains("report")) {
    PropertyReport rep = verify_properties(sys, p, eta, sys.weight_h);
    json rj;
    rj["provenance"] = provenance(cfg, "discretize");
    rj["h"] = sys.weight_h;
    rj["n_segments"] = sys.n_segments();
    rj["n_loops"] = sys.n_loops();
    rj["mass"] = rep.mass;
    rj["dp_l1"] = rep.dp_l1;
    rj["mass_excess"] = rep.mass_excess;
    rj["min_separation"] = rep.min_separation;
    rj["sep_c0"] = rep.sep_c0;
    rj["min_adjacent_dot"] = rep.min_adjacent_dot;
    rj["w11_gap"] = rep.w11_gap;
    write_text(out_path(out_dir, cfg["report"].get<std::string>()), rj.dump(2) + "\n");
  }
  logi("discretized: " + std::to_string(sys.n_segments()) + " segments, h = " +
       std::to_string(sys.weight_h));
  return 0;
}

int cmd_mincon(const json& cfg, const std::string& out_dir) {
  require_keys(cfg, {"positives", "negatives", "mode", "body", "out"}, "mincon");
  SignedPoints pts;
  auto vec3 = [](const json& v) {
    return Vec3{v.at(0).get<double>(), v.at(1).get<double>(), v.at(2).get<double>()};
  };
  for (const auto& p : cfg.at("positives")) pts.positives.push_back(vec3(p));
  if (cfg.contains("negatives"))
    for (const auto& p : cfg["negatives"]) pts.negatives.push_back(vec3(p));
  ConnectionMode mode = ConnectionMode::balanced;
  if (cfg.value("mode", "balanced") == "boundary_relative") {
    mode = ConnectionMode::boundary_relative;
    const json& bj = cfg.at("body");
    require_keys(bj, {"kind", "center", "radius", "lo", "hi"}, "body");
    if (bj.value("kind", "ball") == "ball")
      pts.body = ConvexBody::ball(vec3(bj.at("center")), bj.at("radius").get<double>());
    else
      pts.body = ConvexBody::axis_box(vec3(bj.at("lo")), vec3(bj.at("hi")));
  }
  MatchingResult r = minimal_connection(pts, mode);
  json out;
  out["provenance"] = provenance(cfg, "mincon");
  out["total_length"] = r.total_length;
  json pairs = json::array();
  for (auto [a, b] : r.pairs) pairs.push_back({a, b});
  out["pairs"] = std::move(pairs);
  out["certificate"] = "exact";
  write_text(out_path(out_dir, cfg.value("out", "mincon.json")), out.dump(2) + "\n");
  std::ostringstream os;
  os.precision(17);
  os << r.total_length;
  std::cout << os.str() << "\n";
  return 0;
}

int cmd_hodge(const json& cfg, const std::string& out_dir) {
  require_keys(cfg, {"field", "out"}, "hodge");
  Form1 p = load_form1(cfg.at("field").get<std::string>());
  PoissonConfig pcfg = PoissonConfig::for_grid(p.grid);
  HodgeParts h = hodge_decompose(p, pcfg);
  json out;
  out["provenance"] = provenance(cfg, "hodge");
  out["residual"] = h.residual;
  out["interior_residual"] = h.interior_residual;
  out["ortho"] = {h.ortho[0], h.ortho[1], h.ortho[2]};
  out["norm_gamma"] = l2_norm(h.gamma);
  out["norm_d_alpha"] = l2_norm(h.d_alpha);
  out["norm_dstar_beta"] = l2_norm(h.dstar_beta);
  write_text(out_path(out_dir, cfg.value("out", "hodge.json")), out.dump(2) + "\n");
  return 0;
}

int cmd_biot_savart(const json& cfg, const std::string& out_dir, int threads) {
  require_keys(cfg, {"system_json", "filament", "weight", "grid", "out_field"},
               "biot-savart");
  VortexSystem gamma;
  if (cfg.contains("system_json"))
    gamma = VortexSystem::load_json(cfg["system_json"].get<std::string>());
  else
    gamma = filament_from_json(cfg.at("filament")).system(cfg.value("weight", 1.0));
  GridSpec g = grid_from_json(cfg.at("grid"));
  QuadratureOptions q;
  q.threads = threads;
  Form1 A = biot_savart_field(gamma, g, q);
  save_field(out_path(out_dir, cfg.value("out_field", "biot_savart.fld")), A);
  return 0;
}

int cmd_gamma_sweep(const json& cfg, const std::string& out_dir, int threads) {
  require_keys(cfg,
               {"regime", "filament", "v_from_filament", "winding", "eps_list",
                "grid_sizes", "eta", "delta", "g", "spread", "out_csv", "out_json"},
               "gamma-sweep");
  SweepConfig sc;
  sc.regime = regime_from_string(cfg.value("regime", "S2"));
  if (cfg.contains("filament")) sc.filament = filament_from_json(cfg["filament"]);
  sc.v_from_filament = cfg.value("v_from_filament", true);
  if (cfg.contains("winding")) {
    auto w = cfg["winding"];
    sc.torus_winding = {w.at(0).get<long>(), w.at(1).get<long>(), w.at(2).get<long>()};
  }
  if (cfg.contains("eps_list"))
    sc.eps_list = cfg["eps_list"].get<std::vector<double>>();
  if (cfg.contains("grid_sizes"))
    sc.grid_sizes = cfg["grid_sizes"].get<std::vector<int64_t>>();
  sc.eta_override = cfg.value("eta", 0.0);
  sc.delta_override = cfg.value("delta", 0.0);
  sc.g_override = cfg.value("g", 0.0);
  sc.spread = cfg.value("spread", 1.0);
  sc.threads = threads;
  GammaReport rep = gamma_sweep(sc);
  write_text(out_path(out_dir, cfg.value("out_csv", "gamma_sweep.csv")), rep.to_csv());
  json out;
  out["provenance"] = provenance(cfg, "gamma-sweep");
  out["rows"] = json::parse(rep.to_json());
  write_text(out_path(out_dir, cfg.value("out_json", "gamma_sweep.json")),
             out.dump(2) + "\n");
  for (const auto& r : rep.rows)
    if (!r.ok) return 3;
  return 0;
}

int cmd_curvature(const json& cfg, const std::string& out_dir) {
  require_keys(cfg, {"circle", "points", "closed", "j", "out"}, "curvature");
  std::vector<Vec3> pts;
  bool closed = cfg.value("closed", true);
  if (cfg.contains("circle")) {
    const json& cj = cfg["circle"];
    require_keys(cj, {"radius", "n"}, "circle");
    const double R = cj.value("radius", 0.25);
    const int n = cj.value("n", 10000);
    for (int t = 0; t < n; ++t) {
      const double a = 2.0 * M_PI * t / n;
      pts.push_back({R * std::cos(a), R * std::sin(a), 0.0});
    }
    closed = true;
  } else {
    for (const auto& p : cfg.at("points"))
      pts.push_back({p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()});
  }
  Vec3 jconst{0, 0, 0};
  if (cfg.contains("j")) {
    const json& jj = cfg["j"];
    jconst = {jj.at(0).get<double>(), jj.at(1).get<double>(), jj.at(2).get<double>()};
  }
  auto rep = curvature_residual(pts, closed, [&](const Vec3&) { return jconst; });
  json out;
  out["provenance"] = provenance(cfg, "curvature");
  out["max_residual"] = rep.max_residual;
  write_text(out_path(out_dir, cfg.value("out", "curvature.json")), out.dump(2) + "\n");
  std::ostringstream os;
  os.precision(17);
  os << rep.max_residual;
  std::cout << os.str() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantized vortex line tools for 3-D Ginzburg-Landau fields"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int threads = 0;
  uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config path")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "worker threads (0 = hardware)");
    sub->add_option("--seed", seed, "RNG seed");
  };

  const std::vector<std::string> names = {"synthesize", "extract",     "energy",
                                          "discretize", "mincon",      "hodge",
                                          "biot-savart", "gamma-sweep", "curvature"};
  for (const auto& n : names) add_common(app.add_subcommand(n));

  CLI11_PARSE(app, argc, argv);

  try {
    json cfg = load_config(config_path);
    const std::string sub = app.get_subcommands().front()->get_name();
    if (sub == "synthesize") return cmd_synthesize(cfg, out_dir);
    if (sub == "extract") return cmd_extract(cfg, out_dir, seed);
    if (sub == "energy") return cmd_energy(cfg, out_dir);
    if (sub == "discretize") return cmd_discretize(cfg, out_dir);
    if (sub == "mincon") return cmd_mincon(cfg, out_dir);
    if (sub == "hodge") return cmd_hodge(cfg, out_dir);
    if (sub == "biot-savart") return cmd_biot_savart(cfg, out_dir, threads);
    if (sub == "gamma-sweep") return cmd_gamma_sweep(cfg, out_dir, threads);
    if (sub == "curvature") return cmd_curvature(cfg, out_dir);
    std::cerr << "unknown subcommand\n";
    return 2;
  } catch (const invalid_input& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  } catch (const contract_error& ex) {
    std::cerr << "numerical contract violation: " << ex.what() << "\n";
    return 3;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
}
