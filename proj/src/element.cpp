#include "myosolve/element.hpp"

#include <cmath>
#include <stdexcept>

#include "myosolve/mesh.hpp"

namespace myo {

Quadrature1d gauss_1d(int n) {
  if (n == 2) {
    const double g = 1.0 / std::sqrt(3.0);
    return {{-g, g}, {1.0, 1.0}};
  }
  if (n == 3) {
    const double g = std::sqrt(0.6);
    return {{-g, 0.0, g}, {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}};
  }
  throw std::invalid_argument("gauss_1d: unsupported rule");
}

int nodes_per_order(int order) {
  if (order == 1) return 8;
  if (order == 2) return 27;
  throw std::invalid_argument("nodes_per_order: unsupported order");
}

namespace {

// 1D quadratic Lagrange basis on {-1, 0, 1}.
inline void lagrange2(double t, double l[3], double dl[3]) {
  l[0] = 0.5 * t * (t - 1.0);
  l[1] = 1.0 - t * t;
  l[2] = 0.5 * t * (t + 1.0);
  dl[0] = t - 0.5;
  dl[1] = -2.0 * t;
  dl[2] = t + 0.5;
}

}  // namespace

void eval_basis(int order, const Vec3& xi, std::span<double> n, std::span<Vec3> dn) {
  if (order == 1) {
    for (int c2 = 0; c2 < 2; ++c2)
      for (int c1 = 0; c1 < 2; ++c1)
        for (int c0 = 0; c0 < 2; ++c0) {
          const double s0 = c0 ? 1.0 : -1.0;
          const double s1 = c1 ? 1.0 : -1.0;
          const double s2 = c2 ? 1.0 : -1.0;
          const double f0 = 0.5 * (1.0 + s0 * xi[0]);
          const double f1 = 0.5 * (1.0 + s1 * xi[1]);
          const double f2 = 0.5 * (1.0 + s2 * xi[2]);
          const int a = vtk_corner(c0, c1, c2);
          n[a] = f0 * f1 * f2;
          dn[a] = Vec3{0.5 * s0 * f1 * f2, f0 * 0.5 * s1 * f2, f0 * f1 * 0.5 * s2};
        }
    return;
  }
  if (order == 2) {
    double l0[3], d0[3], l1[3], d1[3], l2[3], d2[3];
    lagrange2(xi[0], l0, d0);
    lagrange2(xi[1], l1, d1);
    lagrange2(xi[2], l2, d2);
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) {
          const int a = i + 3 * j + 9 * k;
          n[a] = l0[i] * l1[j] * l2[k];
          dn[a] = Vec3{d0[i] * l1[j] * l2[k], l0[i] * d1[j] * l2[k], l0[i] * l1[j] * d2[k]};
        }
    return;
  }
  throw std::invalid_argument("eval_basis: unsupported order");
}

BasisTable volume_basis(int order) {
  BasisTable t;
  t.order = order;
  t.n_nodes = nodes_per_order(order);
  const Quadrature1d g = gauss_1d(order + 1);
  const int nq1 = static_cast<int>(g.x.size());
  t.n_qp = nq1 * nq1 * nq1;
  t.xi.reserve(t.n_qp);
  t.w.reserve(t.n_qp);
  t.n.resize(static_cast<std::size_t>(t.n_qp) * t.n_nodes);
  t.dn.resize(static_cast<std::size_t>(t.n_qp) * t.n_nodes);
  int q = 0;
  for (int k = 0; k < nq1; ++k)
    for (int j = 0; j < nq1; ++j)
      for (int i = 0; i < nq1; ++i, ++q) {
        t.xi.push_back(Vec3{g.x[i], g.x[j], g.x[k]});
        t.w.push_back(g.w[i] * g.w[j] * g.w[k]);
        eval_basis(order, t.xi.back(), std::span<double>(t.n).subspan(q * t.n_nodes, t.n_nodes),
                   std::span<Vec3>(t.dn).subspan(q * t.n_nodes, t.n_nodes));
      }
  return t;
}

void eval_geometry(const std::array<Vec3, 8>& corners, const Vec3& xi, Vec3& x, Mat3& jac) {
  double n[8];
  Vec3 dn[8];
  eval_basis(1, xi, n, dn);
  x = Vec3{0.0, 0.0, 0.0};
  jac = Mat3::zero();
  for (int c = 0; c < 8; ++c) {
    x = x + n[c] * corners[c];
    jac = jac + outer(corners[c], dn[c]);
  }
}

}  // namespace myo
