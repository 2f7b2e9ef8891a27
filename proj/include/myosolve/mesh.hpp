#pragma once

#include <array>
#include <string>
#include <vector>

#include "myosolve/core.hpp"
#include "myosolve/smallmat.hpp"

namespace myo {

enum class Region : int { base = 0, epi = 1, endo = 2, free_boundary = 3 };

const char* region_name(Region r);

/// VTK corner index of the tensor-ordered corner (c0 fastest axis).
constexpr int vtk_corner(int c0, int c1, int c2) {
  constexpr int vtk_of_tensor[8] = {0, 1, 3, 2, 4, 5, 7, 6};
  return vtk_of_tensor[c0 + 2 * c1 + 4 * c2];
}

/// Local face geometry: the fixed reference axis and its side, plus the two
/// in-plane axes (u, v) ordered so du x dv points outward.
struct FaceAxes {
  int axis, side, u, v;
};
constexpr FaceAxes face_axes(int local_face) {
  constexpr FaceAxes faces[6] = {{0, 0, 2, 1}, {0, 1, 1, 2}, {1, 0, 0, 2},
                                 {1, 1, 2, 0}, {2, 0, 1, 0}, {2, 1, 0, 1}};
  return faces[local_face];
}

/// One boundary quad, identified by its owning hex and local face index.
/// Local faces: 0/1 fix the first reference axis at -1/+1, 2/3 the second,
/// 4/5 the third.
struct BoundaryFace {
  index_t hex;
  int local_face;
  Region tag;
};

struct FiberFrame {
  Vec3 f{1.0, 0.0, 0.0};
  Vec3 s{0.0, 1.0, 0.0};
  Vec3 n{0.0, 0.0, 1.0};
};

enum class MeshKind : int { box = 0, shell = 1 };

/// Conforming all-hex mesh with region tags and a per-node fiber frame.
/// Hex corners use VTK ordering; all hexes have positive Jacobians.
struct HexMesh {
  std::vector<Vec3> nodes;
  std::vector<std::array<index_t, 8>> hexes;
  std::vector<BoundaryFace> boundary;
  std::vector<FiberFrame> fibers;

  MeshKind kind = MeshKind::box;
  std::array<index_t, 3> grid{0, 0, 0};  // hex counts along the parameter axes

  index_t n_nodes() const { return static_cast<index_t>(nodes.size()); }
  index_t n_hexes() const { return static_cast<index_t>(hexes.size()); }
};

/// Axis-aligned box (0,lx) x (0,ly) x (0,lz) split into nx*ny*nz hexes.
/// Tags: endo on z=0, epi on z=lz, base on x=0, the rest free.
/// Fibers are the cartesian frame (f=x, s=y, n=z).
HexMesh build_beam_mesh(index_t nx, index_t ny, index_t nz, double lx = 10.0, double ly = 1.0,
                        double lz = 1.0);

/// Truncated prolate ellipsoidal shell. Axes are the cavity (endo) and outer
/// (epi) semi-axes; the long axis is z with the apex at negative z. The shell
/// is cut by the basal plane z = base_plane and, near the apex, by a per-layer
/// plane offset apex_offset inward from that layer's pole (the small apical
/// opening is tagged free). Fibers rotate linearly from +60 degrees at the
/// endocardium to -60 at the epicardium within the circumferential/longitudinal
/// tangent plane; s is transmural and n = f x s.
struct EllipsoidGeometry {
  double endo_a = 0.017;
  double endo_b = 0.017;
  double endo_c = 0.060;
  double epi_a = 0.027;
  double epi_b = 0.027;
  double epi_c = 0.070;
  double base_plane = 0.020;
  double apex_offset = 0.003;
  double fiber_angle_endo_deg = 60.0;
  double fiber_angle_epi_deg = -60.0;
};

HexMesh build_ellipsoid_mesh(index_t n_circ, index_t n_trans, index_t n_api,
                             const EllipsoidGeometry& geo = {});

/// Volume enclosed by the endocardial surface, closed with cones from the
/// basal-opening center. Shell meshes only.
double cavity_volume(const HexMesh& mesh);

/// The four node ids of a boundary face, counterclockwise seen from outside.
std::array<index_t, 4> face_nodes(const HexMesh& mesh, const BoundaryFace& face);

/// Versioned text format round-tripping nodes, fibers, hexes and tags.
void export_mesh(const HexMesh& mesh, const std::string& path);
HexMesh import_mesh(const std::string& path);

}  // namespace myo
