#pragma once

#include <optional>
#include <vector>

#include "gl3d/flat_norm.hpp"
#include "gl3d/grid.hpp"

namespace gl3d {

// Coarse grid overlaid on a field grid: cells of size step*spacing whose
// corners sit on field-lattice vertices, shifted by an integer offset.
struct CoarseGrid {
  int64_t step = 1;                       // field edges per coarse edge
  std::array<int64_t, 3> offset{0, 0, 0}; // field-lattice shift, 0 <= o < step
  std::array<int64_t, 3> ncells{0, 0, 0}; // coarse cells per axis

  static CoarseGrid fit(const GridSpec& g, int64_t step,
                        const std::array<int64_t, 3>& offset);

  // field-lattice vertex index of coarse vertex (I,J,K)
  std::array<int64_t, 3> corner(int64_t I, int64_t J, int64_t K) const {
    return {offset[0] + step * I, offset[1] + step * J, offset[2] + step * K};
  }
};

// Face of the coarse grid: normal axis, corner = coarse vertex index of its
// lower corner. Faces normal to `axis` at corner (I,J,K) span the two other
// axes; valid corners run over I_axis in [0, ncells_axis] and the others in
// [0, ncells).
struct CoarseFace {
  std::array<int64_t, 3> corner{0, 0, 0};
  int axis = 2;
};

struct PlaquetteDegrees {
  GridSpec field_grid;
  CoarseGrid coarse;
  double min_modulus = 0.1;
  // per axis: degrees array over faces, validity flags
  std::array<std::vector<int>, 3> degrees;
  std::array<std::vector<uint8_t>, 3> valid;

  Dims3 face_dims(int axis) const;
  int64_t face_index(const CoarseFace& f) const;
  // signed sum of the six face degrees of every coarse cell is zero
  bool closed() const;
};

struct DualEdge {
  int64_t i = 0, j = 0, k = 0;  // coarse face index (face normal `axis`)
  int axis = 2;
  int weight = 0;
};

// The measure-valued 2-form carried by the dual 1-cycle: each face with
// degree d contributes a dual edge of length cell_size with weight pi*d.
struct DiscreteVorticity {
  GridSpec field_grid;
  CoarseGrid coarse;
  std::vector<DualEdge> dual_edges;

  double cell_size() const { return double(coarse.step) * field_grid.spacing; }
  double mass() const;  // sum pi * cell_size * |weight|
  // Form2 view on the coarse grid (surface density pi*d/cell_size)
  Form2 as_form2() const;
  GridSpec coarse_grid_spec() const;
  // face-center atoms, weight pi * d * cell_size
  PointMeasure as_measure() const;
  // dual edge midpoints/segments in physical coordinates
  Segment dual_segment(const DualEdge& e) const;
  bool closed() const;
};

// All plaquette degrees of the coarse overlay with per-face validity.
PlaquetteDegrees compute_plaquette_degrees(const ComplexField& u, const CoarseGrid& cg,
                                           double min_modulus,
                                           std::vector<CoarseFace>* invalid = nullptr);

// Winding number of u/|u| around the boundary loop of a coarse face
// (right-hand rule about +axis); nullopt if some boundary sample has
// |u| < min_modulus.
std::optional<int> plaquette_degree(const ComplexField& u, const CoarseGrid& cg,
                                    const CoarseFace& face, double min_modulus);

// Degree of an arbitrary closed field-lattice loop given by vertex steps.
std::optional<int> loop_degree(const ComplexField& u,
                               const std::vector<std::array<int64_t, 3>>& verts,
                               double min_modulus);

// Pick among K random lattice offsets the one minimizing the 2-skeleton
// energy + cell_size * (1-skeleton energy); deterministic given seed.
std::array<int64_t, 3> choose_offset(const ComplexField& u, int64_t step, int K,
                                     uint64_t seed);

struct ExtractionFailure {
  std::vector<CoarseFace> invalid_faces;
};

DiscreteVorticity extract_vorticity(const ComplexField& u, int64_t step,
                                    const std::array<int64_t, 3>& offset,
                                    double min_modulus,
                                    ExtractionFailure* failure = nullptr);

// Upper estimate of || Ju - nu ||_{W^{-1,1}}: Ju aggregated conservatively
// to coarse face atoms, nu as dual-edge atoms, flat norm of the difference.
// Only the max_atoms largest atoms enter the transport solve; the rest pay
// the worst-case R per unit mass, so the estimate stays an upper bound.
double w11_gap(const Form2& Ju, const DiscreteVorticity& nu, double R = 0.0,
               int max_atoms = 512);

}  // namespace gl3d
