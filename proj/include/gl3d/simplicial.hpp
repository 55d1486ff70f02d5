#pragma once

#include <array>
#include <map>
#include <optional>
#include <vector>

#include "gl3d/errors.hpp"
#include "gl3d/rational.hpp"

namespace gl3d {

// Conforming rational triangulation of a union of axis-aligned cubes:
// five tetrahedra per cube (corner slicing), mirrored per cube parity so
// that the diagonals of shared square faces match.
struct RationalSimplicialMesh {
  struct Simplex {
    std::array<int, 4> v;  // vertex ids, ordered so the volume is positive
    int64_t cube = 0;      // index into cubes
    int tpl = 0;           // template id 0..4
  };
  // Oriented triangle: face j of a simplex is the triangle opposite vertex
  // j with the boundary-induced (outward) orientation.
  struct FaceRef {
    int simplex = -1;
    int local = -1;  // 0..3
  };
  struct Face {
    std::array<int, 3> key;  // sorted vertex ids
    FaceRef owner;           // first incidence
    FaceRef twin;            // second incidence or {-1,-1} on the boundary
  };

  std::vector<RVec3> vertices;
  std::vector<Simplex> simplices;
  std::vector<std::array<int64_t, 3>> cubes;
  rat scale = 1;
  std::vector<Face> faces;
  // per simplex: global face id of local faces 0..3
  std::vector<std::array<int, 4>> simplex_faces;
  // cube coordinate -> index into cubes (simplices of cube c are 5c..5c+4)
  std::map<std::array<int64_t, 3>, int64_t> cube_index;

  rat simplex_volume(int s) const;
  rat total_volume() const;
  // oriented vertex ids of local face j of simplex s
  std::array<int, 3> oriented_face(int s, int j) const;
  bool face_is_boundary(int f) const { return faces[size_t(f)].twin.simplex < 0; }
  RVec3 barycenter(int s) const;
  // exact vector area of the oriented triangle (half cross product)
  RVec3 face_vector_area(const std::array<int, 3>& tri) const;

  // locate the simplex containing x (ties resolved to the lowest id);
  // nullopt outside the mesh. Double arithmetic with a small tolerance.
  std::optional<int> locate(const Vec3& x) const;
  // barycentric coordinates of x in simplex s (double)
  std::array<double, 4> barycentric(int s, const Vec3& x) const;

  void validate() const;  // volume and two-sided face checks
};

// Triangulate distinct unit cells {c + [0,1]^3} * scale.
RationalSimplicialMesh triangulate_cubes(const std::vector<std::array<int64_t, 3>>& cubes,
                                         const rat& scale);

// Axis-aligned block of cubes [0,n)^3 at the given scale: the standard
// discretization of a cube domain.
RationalSimplicialMesh triangulate_block(int64_t nx, int64_t ny, int64_t nz,
                                         const rat& scale,
                                         const std::array<int64_t, 3>& base = {0, 0, 0});

}  // namespace gl3d
