#pragma once

#include <array>
#include <span>
#include <vector>

#include "myosolve/smallmat.hpp"

namespace myo {

struct Quadrature1d {
  std::vector<double> x;
  std::vector<double> w;
};

/// Gauss-Legendre rule on [-1,1]; n in {2, 3}.
Quadrature1d gauss_1d(int n);

/// Shape functions on the reference hex [-1,1]^3. Order 1 uses the 8 VTK
/// corners; order 2 the 27-node lattice indexed i + 3j + 9k over {-1,0,1}.
int nodes_per_order(int order);
void eval_basis(int order, const Vec3& xi, std::span<double> n, std::span<Vec3> dn);

/// Volume basis tabulated at the tensor Gauss rule matching the order
/// (2^3 for order 1, 3^3 for order 2).
struct BasisTable {
  int order = 1;
  int n_nodes = 8;
  int n_qp = 8;
  std::vector<Vec3> xi;
  std::vector<double> w;
  std::vector<double> n;    // [q * n_nodes + a]
  std::vector<Vec3> dn;     // [q * n_nodes + a]
};
BasisTable volume_basis(int order);

/// Trilinear geometry from the 8 corner coordinates: position and Jacobian
/// d x / d xi at a reference point. Used for all orders (subparametric).
void eval_geometry(const std::array<Vec3, 8>& corners, const Vec3& xi, Vec3& x, Mat3& jac);

}  // namespace myo
