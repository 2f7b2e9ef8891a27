#include "myosolve/assembly.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "myosolve/element.hpp"
#include "myosolve/gmres.hpp"
#include "doctest.h"

using namespace myo;

namespace {

struct Fixture {
  HexMesh mesh;
  Partition part;
  DofMap dofs;
  Problem prob;

  Fixture(index_t nx, index_t ny, index_t nz, int order, index_t px = 2) {
    mesh = build_beam_mesh(nx, ny, nz);
    part = partition_structured(mesh, px, 1, 1);
    dofs = build_dofmap(mesh, part, order);
    prob.mesh = &mesh;
    prob.partition = &part;
    prob.dofs = &dofs;
  }
};

std::vector<double> random_vec(index_t n, double scale, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("quadrature tables integrate polynomials exactly") {
  const Quadrature1d g2 = gauss_1d(2);
  const Quadrature1d g3 = gauss_1d(3);
  const auto integrate = [](const Quadrature1d& q, int power) {
    double s = 0.0;
    for (std::size_t i = 0; i < q.x.size(); ++i) s += q.w[i] * std::pow(q.x[i], power);
    return s;
  };
  CHECK(integrate(g2, 0) == doctest::Approx(2.0));
  CHECK(integrate(g2, 2) == doctest::Approx(2.0 / 3.0));
  CHECK(integrate(g2, 3) == doctest::Approx(0.0));
  CHECK(integrate(g3, 4) == doctest::Approx(2.0 / 5.0));
  CHECK(integrate(g3, 5) == doctest::Approx(0.0));
}

TEST_CASE("basis functions interpolate and sum to one") {
  for (int order : {1, 2}) {
    const int nn = nodes_per_order(order);
    std::vector<double> n(nn);
    std::vector<Vec3> dn(nn);
    eval_basis(order, Vec3{0.2, -0.4, 0.7}, n, dn);
    double sum = 0.0;
    Vec3 dsum{0.0, 0.0, 0.0};
    for (int a = 0; a < nn; ++a) {
      sum += n[a];
      dsum = dsum + dn[a];
    }
    CHECK(sum == doctest::Approx(1.0));
    CHECK(norm(dsum) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("rest state with no loads has zero residual") {
  Fixture fx(2, 1, 1, 1);
  const index_t n = fx.dofs.n_dofs();
  std::vector<double> zero(n, 0.0);
  StepState st;
  st.dt = 1e-3;
  st.d = zero;
  st.d_prev = zero;
  st.d_prev2 = zero;
  const std::vector<double> r = assemble_residual(fx.prob, st);
  CHECK(norm2(r) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("jacobian matches finite differences of the residual") {
  for (int order : {1, 2}) {
    Fixture fx(2, 1, 1, order);
    fx.prob.robin_base = {2e5, 2e4, 1e4, 2e3};
    const index_t n = fx.dofs.n_dofs();

    StepState st;
    st.dt = 1e-3;
    st.pressure = 120.0;
    st.gamma = 5e3;
    const std::vector<double> d = random_vec(n, 1e-3, 61);
    const std::vector<double> dp = random_vec(n, 1e-3, 62);
    const std::vector<double> dpp = random_vec(n, 1e-3, 63);
    st.d = d;
    st.d_prev = dp;
    st.d_prev2 = dpp;

    const UnassembledMatrix k = assemble_jacobian(fx.prob, st);
    const std::vector<double> v = random_vec(n, 1.0, 64);
    std::vector<double> kv(n, 0.0);
    k.spmv(v, kv);

    const double h = 1e-6;
    std::vector<double> dplus(n), dminus(n);
    for (index_t i = 0; i < n; ++i) {
      dplus[i] = d[i] + h * v[i];
      dminus[i] = d[i] - h * v[i];
    }
    StepState sp = st, sm = st;
    sp.d = dplus;
    sm.d = dminus;
    const std::vector<double> rp = assemble_residual(fx.prob, sp);
    const std::vector<double> rm = assemble_residual(fx.prob, sm);

    double err = 0.0, den = 0.0;
    for (index_t i = 0; i < n; ++i) {
      const double fd = (rp[i] - rm[i]) / (2.0 * h);
      err += (fd - kv[i]) * (fd - kv[i]);
      den += fd * fd;
    }
    CHECK(std::sqrt(err / den) < 1e-5);
  }
}

TEST_CASE("assembled and unassembled forms are the same operator") {
  Fixture fx(4, 2, 2, 1);
  fx.prob.robin_base = {2e5, 2e4, 1e4, 2e3};
  const index_t n = fx.dofs.n_dofs();
  const std::vector<double> d = random_vec(n, 1e-3, 67);
  const std::vector<double> zero(n, 0.0);
  StepState st;
  st.dt = 1e-3;
  st.pressure = 80.0;
  st.d = d;
  st.d_prev = zero;
  st.d_prev2 = zero;

  const UnassembledMatrix k = assemble_jacobian(fx.prob, st);
  const CsrMatrix a = k.assemble();
  const std::vector<double> v = random_vec(n, 1.0, 68);
  std::vector<double> y1(n, 0.0), y2(n, 0.0);
  k.spmv(v, y1);
  spmv(a, v, y2);
  for (index_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-12));
}

TEST_CASE("follower pressure breaks symmetry, dead load keeps it") {
  Fixture fx(4, 2, 2, 1);
  const index_t n = fx.dofs.n_dofs();
  const std::vector<double> d = random_vec(n, 2e-3, 71);
  const std::vector<double> zero(n, 0.0);
  StepState st;
  st.dt = 1e30;  // no dashpot or inertia contribution to speak of
  st.pressure = 200.0;
  st.d = d;
  st.d_prev = zero;
  st.d_prev2 = zero;

  fx.prob.follower_pressure = true;
  const UnassembledMatrix kf = assemble_jacobian(fx.prob, st);
  CHECK(!probe_symmetry(
      [&kf](std::span<const double> x, std::span<double> y) { kf.spmv(x, y); }, n));

  fx.prob.follower_pressure = false;
  const UnassembledMatrix kd = assemble_jacobian(fx.prob, st);
  CHECK(probe_symmetry(
      [&kd](std::span<const double> x, std::span<double> y) { kd.spmv(x, y); }, n));
}

TEST_CASE("rigid body modes annihilate the pure elastic stiffness") {
  Fixture fx(4, 2, 2, 1);
  fx.prob.material.rho = 0.0;
  const index_t n = fx.dofs.n_dofs();
  const std::vector<double> zero(n, 0.0);
  StepState st;
  st.dt = 1.0;
  st.d = zero;
  st.d_prev = zero;
  st.d_prev2 = zero;

  const UnassembledMatrix k = assemble_jacobian(fx.prob, st);
  REQUIRE(k.near_nullspace.size() == 6);
  const CsrMatrix a = k.assemble();
  const double scale = csr_max_abs(a);
  for (const auto& mode : k.near_nullspace) {
    std::vector<double> y(n, 0.0);
    k.spmv(mode, y);
    CHECK(norm2(y) < 1e-8 * scale);
  }
}

TEST_CASE("pressure on the lower face pushes the beam upward") {
  Fixture fx(4, 2, 2, 1);
  fx.prob.material.rho = 1.0;
  const index_t n = fx.dofs.n_dofs();
  const std::vector<double> zero(n, 0.0);
  StepState st;
  st.dt = 1e-3;
  st.pressure = 4.0;
  st.d = zero;
  st.d_prev = zero;
  st.d_prev2 = zero;

  // at rest the residual is minus the external load; the load must point +z
  const std::vector<double> r = assemble_residual(fx.prob, st);
  double fz = 0.0;
  for (index_t i = 0; i < n; i += 3) fz += -r[i + 2];
  CHECK(fz == doctest::Approx(4.0 * 10.0 * 1.0));  // p times the endo area
}
