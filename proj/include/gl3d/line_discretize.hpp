#pragma once

#include <map>
#include <tuple>

#include "gl3d/mincon.hpp"
#include "gl3d/pl_form.hpp"
#include "gl3d/vortex_system.hpp"

namespace gl3d {

// Quantization of the face fluxes of dp at flux unit h: every phi_ij and
// every projected subface flux phi_ijk is an exact integer multiple of h.
struct QuantizedFaceData {
  rat h;
  double eta = 0.0;

  // canonical per-mesh-face data, oriented as its representative (s, j)
  struct FaceData {
    int rep_simplex = -1;
    int rep_local = -1;
    rat phi;                  // flux through the representative orientation
    long m = 0;               // |phi| / h
    std::vector<Vec3> points; // |m| points on the full face, shared by both sides
    bool boundary = false;
  };
  std::map<int, FaceData> faces;  // by global mesh face id

  // ordered pair (s, j, k) with phi_ijk > 0: m fiber-paired point sets on
  // the shrunken subfaces of face j (heads) and face k (tails)
  struct SubfaceData {
    rat phi;
    long m = 0;
    std::vector<Vec3> heads;
    std::vector<Vec3> tails;
  };
  std::map<std::tuple<int, int, int>, SubfaceData> subfaces;

  long face_m(int face_id) const {
    auto it = faces.find(face_id);
    return it == faces.end() ? 0 : it->second.m;
  }
};

// Exact fluxes phi_ij, phi_ijk of a rational PL 1-form via oblique
// projection along the per-simplex vorticity vector and rational polygon
// clipping; h = phi/N for the least common denominator phi^{-1}.
// Rejects h >= eta^2 when the gate is enforced (the separation and angle
// guarantees assume it; the construction itself is defined for any h that
// divides the fluxes).
QuantizedFaceData quantize(const PLOneForm& p, double eta, long N,
                           bool enforce_h_gate = true);

// Smallest N such that phi/N <= min(target_h, eta^2 (1 - tol)).
long choose_subdivision(const PLOneForm& p, double eta, double target_h);

// Deterministic selection of m sub-triangle barycenters of the l^2
// self-similar partition (spiral-from-centroid order), l = ceil(sqrt(m)).
std::vector<Vec3> place_face_points(const Vec3& A, const Vec3& B, const Vec3& C, long m);

// Segments of the discretized vorticity inside the shrunken simplices,
// exactly parallel to the per-simplex vorticity vector.
std::vector<Segment> build_interior_segments(const PLOneForm& p,
                                             const QuantizedFaceData& q,
                                             std::vector<int>* region_tags = nullptr);

// Minimal connection inside one pyramidal frustum: signed boundary points
// (positives = heads) joined by the exact Hungarian optimum.
std::vector<Segment> connect_frustum(const std::vector<Vec3>& heads,
                                     const std::vector<Vec3>& tails);

// All frustum connections of the quantized data.
std::vector<Segment> build_frustum_segments(const PLOneForm& p,
                                            const QuantizedFaceData& q,
                                            std::vector<int>* region_tags = nullptr);

// Loop decomposition: walk successor segments, pairing in/out segments at
// higher-degree junctions by the minimal turning angle. Interior vertices
// must balance exactly; only boundary face points may end a polyline.
VortexSystem assemble(const PLOneForm& p, const QuantizedFaceData& q,
                      std::vector<Segment> segments, std::vector<int> region_tags);

// Full pipeline: quantize + interior + frusta + assemble.
VortexSystem discretize_vorticity(const PLOneForm& p, double eta, long N,
                                  bool enforce_h_gate = true);

struct PropertyReport {
  double mass = 0.0;            // h * total length
  double dp_l1 = 0.0;           // exact simplex TV of dp
  double mass_excess = 0.0;     // mass - dp_l1
  double fitted_C = 0.0;        // mass_excess / eta
  bool mass_ok = false;         // mass <= dp_l1 + C_cap * eta

  double min_separation = 0.0;  // over disjoint segment pairs
  double sep_c0 = 0.0;          // min_separation / (eta sqrt(h))
  bool sep_ok = false;

  double min_adjacent_dot = 1.0;  // over consecutive segments in loops
  double angle_margin = 0.0;      // (1 + min_adjacent_dot) / eta^2
  bool angle_ok = false;

  double w11_gap = 0.0;  // flat-norm estimate of || q_h - dp ||
};

PropertyReport verify_properties(const VortexSystem& gamma, const PLOneForm& p,
                                 double eta, double h, double mass_C_cap = 10.0);

}  // namespace gl3d
