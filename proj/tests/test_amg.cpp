#include "myosolve/amg.hpp"

#include <random>
#include <vector>

#include "myosolve/assembly.hpp"
#include "myosolve/gmres.hpp"
#include "doctest.h"

using namespace myo;

namespace {

CsrMatrix laplacian_1d(index_t n) {
  std::vector<Triplet> trips;
  for (index_t i = 0; i < n; ++i) {
    trips.push_back({i, i, 2.0});
    if (i > 0) trips.push_back({i, i - 1, -1.0});
    if (i + 1 < n) trips.push_back({i, i + 1, -1.0});
  }
  return csr_from_triplets(n, n, std::move(trips));
}

std::vector<index_t> unit_nodes(index_t n) {
  std::vector<index_t> ptr(n + 1);
  for (index_t i = 0; i <= n; ++i) ptr[i] = i;
  return ptr;
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("greedy aggregation on the 1d laplacian") {
  const CsrMatrix a = laplacian_1d(9);
  const auto strong = amg_strength_graph(a, unit_nodes(9), 0.25, false);
  REQUIRE(strong.size() == 9);
  CHECK(strong[0] == std::vector<index_t>{1});
  CHECK(strong[4] == std::vector<index_t>{3, 5});

  const auto [agg, count] = amg_aggregate(strong);
  REQUIRE(count == 3);
  const std::vector<index_t> expect{0, 0, 1, 1, 1, 2, 2, 2, 2};
  CHECK(agg == expect);

  // the signed scalar rule marks the same couplings here
  const auto signed_strong = amg_strength_graph(a, unit_nodes(9), 0.25, true);
  CHECK(signed_strong == strong);
}

TEST_CASE("weak couplings drop out of the strength graph") {
  std::vector<Triplet> trips{{0, 0, 4.0}, {1, 1, 4.0}, {2, 2, 4.0},
                             {0, 1, -1.0}, {1, 0, -1.0},   // strong pair
                             {1, 2, -0.05}, {2, 1, -0.05}};  // weak pair
  const CsrMatrix a = csr_from_triplets(3, 3, std::move(trips));
  const auto strong = amg_strength_graph(a, unit_nodes(3), 0.08, false);
  CHECK(strong[0] == std::vector<index_t>{1});
  CHECK(strong[1] == std::vector<index_t>{0});
  CHECK(strong[2].empty());

  const auto [agg, count] = amg_aggregate(strong);
  CHECK(count == 2);  // {0,1} and the isolated {2}
  CHECK(agg[0] == agg[1]);
  CHECK(agg[2] != agg[0]);
}

TEST_CASE("tentative prolongators carry the near-nullspace exactly") {
  HexMesh mesh = build_beam_mesh(8, 3, 3);
  Partition part = partition_structured(mesh, 2, 1, 1);
  DofMap dofs = build_dofmap(mesh, part, 1);
  Problem prob;
  prob.mesh = &mesh;
  prob.partition = &part;
  prob.dofs = &dofs;
  prob.material.rho = 1.0;
  prob.follower_pressure = false;

  const index_t n = dofs.n_dofs();
  const std::vector<double> zero(n, 0.0);
  StepState st;
  st.dt = 1e-3;
  st.d = zero;
  st.d_prev = zero;
  st.d_prev2 = zero;
  const UnassembledMatrix k = assemble_jacobian(prob, st);
  const CsrMatrix a = k.assemble();

  AmgOptions opts;
  const AmgHierarchy amg(a, 3, k.near_nullspace, opts);
  REQUIRE(amg.n_levels() >= 2);

  for (int l = 0; l + 1 < amg.n_levels(); ++l) {
    const CsrMatrix& p = amg.prolongator(l);
    const auto& bf = amg.nullspace(l);
    const auto& bc = amg.nullspace(l + 1);
    REQUIRE(bf.size() == bc.size());
    CHECK(amg.level_dofs(l + 1) < amg.level_dofs(l));
    for (std::size_t m = 0; m < bf.size(); ++m) {
      std::vector<double> pb(p.rows, 0.0);
      spmv(p, bc[m], pb);
      double err = 0.0;
      for (index_t i = 0; i < p.rows; ++i) err += (pb[i] - bf[m][i]) * (pb[i] - bf[m][i]);
      CHECK(std::sqrt(err) < 1e-10 * (1.0 + norm2(bf[m])));
    }
  }
}

TEST_CASE("v-cycle preconditioning accelerates gmres on spd problems") {
  // scalar 2d laplacian, large enough for two levels
  const index_t g = 24;
  std::vector<Triplet> trips;
  const auto id = [g](index_t i, index_t j) { return i * g + j; };
  for (index_t i = 0; i < g; ++i)
    for (index_t j = 0; j < g; ++j) {
      trips.push_back({id(i, j), id(i, j), 4.0});
      if (i > 0) trips.push_back({id(i, j), id(i - 1, j), -1.0});
      if (i + 1 < g) trips.push_back({id(i, j), id(i + 1, j), -1.0});
      if (j > 0) trips.push_back({id(i, j), id(i, j - 1), -1.0});
      if (j + 1 < g) trips.push_back({id(i, j), id(i, j + 1), -1.0});
    }
  const index_t n = g * g;
  const CsrMatrix a = csr_from_triplets(n, n, std::move(trips));
  const std::vector<std::vector<double>> ones{std::vector<double>(n, 1.0)};

  AmgOptions opts;
  opts.strength_eps = 0.25;
  const AmgHierarchy amg(a, 1, ones, opts);
  REQUIRE(amg.n_levels() >= 2);

  std::mt19937 rng(103);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> b(n), x(n, 0.0), x0(n, 0.0);
  for (auto& v : b) v = u(rng);

  GmresOptions gopt;
  gopt.rtol = 1e-8;
  const auto apply = [&a](std::span<const double> in, std::span<double> out) { spmv(a, in, out); };
  const GmresResult with =
      gmres(apply, [&amg](std::span<const double> in, std::span<double> out) { amg.vcycle(in, out); },
            b, x, gopt);
  const GmresResult without = gmres(apply, b, x0, gopt);
  CHECK(with.converged);
  CHECK(with.iters * 2 < without.iters);

  std::vector<double> r(n);
  spmv(a, x, r);
  double err = 0.0;
  for (index_t i = 0; i < n; ++i) err += (r[i] - b[i]) * (r[i] - b[i]);
  CHECK(std::sqrt(err) / norm2(b) < 1e-8);
}

TEST_CASE("block jacobi smoothing works as an alternative") {
  HexMesh mesh = build_beam_mesh(10, 3, 3);  // enough dofs to force a second level
  Partition part = partition_structured(mesh, 2, 1, 1);
  DofMap dofs = build_dofmap(mesh, part, 1);
  Problem prob;
  prob.mesh = &mesh;
  prob.partition = &part;
  prob.dofs = &dofs;
  prob.material.rho = 1.0;

  const index_t n = dofs.n_dofs();
  const std::vector<double> zero(n, 0.0);
  StepState st;
  st.dt = 1e-3;
  st.d = zero;
  st.d_prev = zero;
  st.d_prev2 = zero;
  const UnassembledMatrix k = assemble_jacobian(prob, st);
  const CsrMatrix a = k.assemble();

  AmgOptions opts;
  opts.smoother = "bjacobi";
  const AmgHierarchy amg(a, 3, k.near_nullspace, opts);

  std::vector<double> b(n, 1.0), x(n, 0.0);
  GmresOptions gopt;
  gopt.rtol = 1e-8;
  const GmresResult res = gmres(
      [&a](std::span<const double> in, std::span<double> out) { spmv(a, in, out); },
      [&amg](std::span<const double> in, std::span<double> out) { amg.vcycle(in, out); }, b, x,
      gopt);
  CHECK(res.converged);
}
