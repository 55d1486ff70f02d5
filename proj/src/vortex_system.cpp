#include "gl3d/vortex_system.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "gl3d/errors.hpp"
#include "json.hpp"

namespace gl3d {

using nlohmann::json;

PointMeasure VortexSystem::as_measure(double max_chunk) const {
  PointMeasure mu;
  for (const Segment& s : segments) add_segment_current(mu, s, weight_h, max_chunk);
  return mu;
}

std::string VortexSystem::to_json() const {
  json j;
  j["h"] = weight_h;
  json segs = json::array();
  for (const Segment& s : segments)
    segs.push_back({{"a", {s.a.x, s.a.y, s.a.z}}, {"b", {s.b.x, s.b.y, s.b.z}}});
  j["segments"] = std::move(segs);
  j["loops"] = loops;
  json closed = json::array();
  for (uint8_t c : loop_closed) closed.push_back(bool(c));
  j["closed"] = std::move(closed);
  return j.dump(2);
}

VortexSystem VortexSystem::from_json(const std::string& text) {
  json j = json::parse(text);
  VortexSystem sys;
  sys.weight_h = j.at("h").get<double>();
  for (const auto& s : j.at("segments")) {
    const auto& a = s.at("a");
    const auto& b = s.at("b");
    sys.segments.push_back({{a[0], a[1], a[2]}, {b[0], b[1], b[2]}});
  }
  sys.region.assign(sys.segments.size(), 0);
  if (j.contains("loops")) sys.loops = j["loops"].get<std::vector<std::vector<int>>>();
  if (j.contains("closed"))
    for (bool c : j["closed"]) sys.loop_closed.push_back(c ? 1 : 0);
  return sys;
}

void VortexSystem::save_json(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw invalid_input("VortexSystem: cannot write " + path);
  os << to_json() << "\n";
}

VortexSystem VortexSystem::load_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw invalid_input("VortexSystem: cannot read " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return from_json(ss.str());
}

void VortexSystem::save_vtk(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw invalid_input("VortexSystem: cannot write " + path);
  os << "# vtk DataFile Version 3.0\n";
  os << "vortex line system (weight " << weight_h << ")\n";
  os << "ASCII\nDATASET POLYDATA\n";
  os << "POINTS " << 2 * segments.size() << " double\n";
  os << std::setprecision(17);
  for (const Segment& s : segments) {
    os << s.a.x << " " << s.a.y << " " << s.a.z << "\n";
    os << s.b.x << " " << s.b.y << " " << s.b.z << "\n";
  }
  os << "LINES " << segments.size() << " " << 3 * segments.size() << "\n";
  for (size_t i = 0; i < segments.size(); ++i)
    os << "2 " << 2 * i << " " << 2 * i + 1 << "\n";
}

}  // namespace gl3d
