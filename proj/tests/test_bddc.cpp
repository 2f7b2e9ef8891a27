#include "myosolve/bddc.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "myosolve/assembly.hpp"
#include "myosolve/dense.hpp"
#include "myosolve/factorization.hpp"
#include "myosolve/gmres.hpp"
#include "doctest.h"

using namespace myo;

namespace {

struct Setup {
  HexMesh mesh;
  Partition part;
  DofMap dofs;
  Problem prob;
  std::vector<double> d, d_prev, d_prev2;
  UnassembledMatrix k;

  Setup(index_t nx, index_t ny, index_t nz, index_t px, index_t py, index_t pz, int order = 1,
        double dscale = 1e-3) {
    mesh = build_beam_mesh(nx, ny, nz);
    part = partition_structured(mesh, px, py, pz);
    dofs = build_dofmap(mesh, part, order);
    prob.mesh = &mesh;
    prob.partition = &part;
    prob.dofs = &dofs;
    prob.material.rho = 1.0;
    prob.robin_base = {2e5, 2e4, 1e4, 2e3};

    const index_t n = dofs.n_dofs();
    std::mt19937 rng(73);
    std::uniform_real_distribution<double> u(-dscale, dscale);
    d.resize(n);
    d_prev.resize(n);
    d_prev2.resize(n);
    for (index_t i = 0; i < n; ++i) {
      d[i] = u(rng);
      d_prev[i] = u(rng);
      d_prev2[i] = u(rng);
    }
    StepState st;
    st.dt = 1e-3;
    st.pressure = 150.0;
    st.gamma = 1e3;
    st.d = d;
    st.d_prev = d_prev;
    st.d_prev2 = d_prev2;
    k = assemble_jacobian(prob, st);
  }
};

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> random_vec(index_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("partition of unity: scalings invert the interface multiplicity") {
  Setup s(4, 2, 2, 2, 1, 1);
  BddcOptions opts;
  const Bddc bddc(s.k, s.dofs.node_coords, opts);

  // each interface node of this split has multiplicity two
  const auto& sets = bddc.interface_sets();
  CHECK(bddc.n_gamma_dofs() == 3 * sets.n_gamma_nodes());
  for (index_t g : sets.gamma_nodes)
    CHECK(sets.multiplicity[sets.gamma_index_of_node[g]] == 2);
}

TEST_CASE("primal space sizes follow the class counts") {
  Setup s(8, 2, 2, 2, 2, 1);
  int vertices = 0, edges = 0, faces = 0;
  {
    const Bddc probe(s.k, s.dofs.node_coords, {PrimalConfig::from_name("v"), 2, 8});
    for (const auto& cl : probe.interface_sets().classes) {
      vertices += cl.kind == ClassKind::vertex;
      edges += cl.kind == ClassKind::edge;
      faces += cl.kind == ClassKind::face;
    }
    CHECK(probe.n_primal_dofs() == 3 * vertices);
  }
  const Bddc ve(s.k, s.dofs.node_coords, {PrimalConfig::from_name("ve"), 2, 8});
  CHECK(ve.n_primal_dofs() == 3 * (vertices + edges));
  const Bddc ef(s.k, s.dofs.node_coords, {PrimalConfig::from_name("ef"), 2, 8});
  CHECK(ef.n_primal_dofs() == 3 * (edges + faces));
  const Bddc vef(s.k, s.dofs.node_coords, {PrimalConfig::from_name("vef"), 2, 8});
  CHECK(vef.n_primal_dofs() == 3 * (vertices + edges + faces));
  const Bddc full(s.k, s.dofs.node_coords, {PrimalConfig::from_name("full"), 2, 8});
  CHECK(full.n_primal_dofs() == full.n_gamma_dofs());
}

TEST_CASE("two subdomains with every interface dof primal give an exact method") {
  Setup s(4, 2, 2, 2, 1, 1);
  const Bddc bddc(s.k, s.dofs.node_coords, {PrimalConfig::from_name("full"), 2, 8});
  CHECK(!bddc.symmetric());

  const index_t n = s.dofs.n_dofs();
  const std::vector<double> b = random_vec(n, 79);
  std::vector<double> x(n, 0.0);
  GmresOptions gopt;
  gopt.rtol = 1e-10;
  const GmresResult res = gmres(
      [&](std::span<const double> in, std::span<double> out) { s.k.spmv(in, out); },
      [&](std::span<const double> in, std::span<double> out) { bddc.precondition_full(in, out); },
      b, x, gopt);
  CHECK(res.converged);
  CHECK(res.iters <= 2);

  std::vector<double> check(n);
  s.k.spmv(x, check);
  double err = 0.0;
  for (index_t i = 0; i < n; ++i) err += (check[i] - b[i]) * (check[i] - b[i]);
  CHECK(std::sqrt(err) / norm2(b) < 1e-9);
}

TEST_CASE("schur pieces reproduce the assembled inverse") {
  Setup s(4, 2, 2, 2, 1, 1);
  const Bddc bddc(s.k, s.dofs.node_coords, {PrimalConfig::from_name("vef"), 2, 8});
  const index_t n = s.dofs.n_dofs();
  const index_t ng = bddc.n_gamma_dofs();
  const CsrMatrix a = s.k.assemble();
  const DenseMatrix ad = dense_from_csr(a);

  // dense Schur complement over the interface dofs
  const auto& gd = bddc.gamma_dofs();
  std::vector<index_t> interior;
  {
    std::vector<char> is_g(n, 0);
    for (index_t g : gd) is_g[g] = 1;
    for (index_t i = 0; i < n; ++i)
      if (!is_g[i]) interior.push_back(i);
  }
  const index_t ni = static_cast<index_t>(interior.size());
  DenseMatrix aii(ni, ni), aig(ni, ng), agi(ng, ni), agg(ng, ng);
  for (index_t i = 0; i < ni; ++i) {
    for (index_t j = 0; j < ni; ++j) aii(i, j) = ad(interior[i], interior[j]);
    for (index_t g = 0; g < ng; ++g) aig(i, g) = ad(interior[i], gd[g]);
  }
  for (index_t g = 0; g < ng; ++g) {
    for (index_t j = 0; j < ni; ++j) agi(g, j) = ad(gd[g], interior[j]);
    for (index_t h = 0; h < ng; ++h) agg(g, h) = ad(gd[g], gd[h]);
  }
  DenseLu lu_ii;
  lu_ii.factor(aii);
  DenseMatrix schur = agg;
  for (index_t g = 0; g < ng; ++g) {
    std::vector<double> col(ni);
    for (index_t i = 0; i < ni; ++i) col[i] = aig(i, g);
    lu_ii.solve(std::span<double>(col));
    for (index_t h = 0; h < ng; ++h) {
      double sdot = 0.0;
      for (index_t i = 0; i < ni; ++i) sdot += agi(h, i) * col[i];
      schur(h, g) -= sdot;
    }
  }

  // schur_matvec against the dense construction
  const std::vector<double> xg = random_vec(ng, 83);
  std::vector<double> yg(ng, 0.0);
  bddc.schur_matvec(xg, yg);
  for (index_t g = 0; g < ng; ++g) {
    double sdot = 0.0;
    for (index_t h = 0; h < ng; ++h) sdot += schur(g, h) * xg[h];
    CHECK(yg[g] == doctest::Approx(sdot).epsilon(1e-8));
  }

  // with an exact interface solver, the full preconditioner is a full solve
  DenseLu lu_s;
  lu_s.factor(schur);
  const std::vector<double> b = random_vec(n, 89);
  std::vector<double> z(n, 0.0);
  bddc.precondition_full_with(b, z, [&](std::span<const double> rg, std::span<double> zg) {
    std::vector<double> tmp(rg.begin(), rg.end());
    lu_s.solve(std::span<double>(tmp));
    std::copy(tmp.begin(), tmp.end(), zg.begin());
  });
  std::vector<double> az(n);
  s.k.spmv(z, az);
  double err = 0.0;
  for (index_t i = 0; i < n; ++i) err += (az[i] - b[i]) * (az[i] - b[i]);
  CHECK(std::sqrt(err) / norm2(b) < 1e-8);

  // reduce and expand agree with the block elimination
  const std::vector<double> g = bddc.reduce_rhs(b);
  REQUIRE(static_cast<index_t>(g.size()) == ng);
  std::vector<double> xg2(ng);
  for (index_t i = 0; i < ng; ++i) xg2[i] = g[i];
  lu_s.solve(std::span<double>(xg2));
  const std::vector<double> full = bddc.expand_solution(b, xg2);
  double derr = 0.0;
  for (index_t i = 0; i < n; ++i) derr += (full[i] - z[i]) * (full[i] - z[i]);
  CHECK(std::sqrt(derr) / (norm2(z) + 1e-30) < 1e-8);
}

TEST_CASE("preconditioned interface iteration beats the plain one") {
  Setup s(8, 4, 4, 4, 2, 2);
  const Bddc bddc(s.k, s.dofs.node_coords, {PrimalConfig::from_name("vef"), 2, 8});

  const index_t n = s.dofs.n_dofs();
  const std::vector<double> b = random_vec(n, 97);
  GmresOptions gopt;
  gopt.rtol = 1e-8;

  std::vector<double> x(n, 0.0);
  const GmresResult with = gmres(
      [&](std::span<const double> in, std::span<double> out) { s.k.spmv(in, out); },
      [&](std::span<const double> in, std::span<double> out) { bddc.precondition_full(in, out); },
      b, x, gopt);
  CHECK(with.converged);

  std::vector<double> x0(n, 0.0);
  const GmresResult without = gmres(
      [&](std::span<const double> in, std::span<double> out) { s.k.spmv(in, out); }, b, x0, gopt);
  CHECK(with.iters * 3 < without.iters);
}

TEST_CASE("three levels agglomerate the coarse problem and still converge") {
  Setup s(8, 4, 4, 4, 2, 2);  // 16 subdomains
  const index_t n = s.dofs.n_dofs();
  const std::vector<double> b = random_vec(n, 101);
  GmresOptions gopt;
  gopt.rtol = 1e-8;

  const Bddc two(s.k, s.dofs.node_coords, {PrimalConfig::from_name("vef"), 2, 8});
  CHECK(two.levels() == 2);
  std::vector<double> x2(n, 0.0);
  const GmresResult r2 = gmres(
      [&](std::span<const double> in, std::span<double> out) { s.k.spmv(in, out); },
      [&](std::span<const double> in, std::span<double> out) { two.precondition_full(in, out); },
      b, x2, gopt);
  REQUIRE(r2.converged);

  const Bddc three(s.k, s.dofs.node_coords, {PrimalConfig::from_name("vef"), 3, 8});
  CHECK(three.levels() == 3);
  CHECK(three.n_agglomerates() == 2);
  std::vector<double> x3(n, 0.0);
  const GmresResult r3 = gmres(
      [&](std::span<const double> in, std::span<double> out) { s.k.spmv(in, out); },
      [&](std::span<const double> in, std::span<double> out) { three.precondition_full(in, out); },
      b, x3, gopt);
  REQUIRE(r3.converged);

  // both solve the same system
  double diff = 0.0;
  for (index_t i = 0; i < n; ++i) diff += (x3[i] - x2[i]) * (x3[i] - x2[i]);
  CHECK(std::sqrt(diff) / norm2(x2) < 1e-6);
  CHECK(r3.iters >= r2.iters);
}

TEST_CASE("constraint functionals average their class nodes") {
  Setup s(8, 2, 2, 2, 2, 1);
  const Bddc bddc(s.k, s.dofs.node_coords, {PrimalConfig::from_name("vef"), 2, 8});
  for (const auto& c : bddc.constraints()) {
    REQUIRE(c.nodes.size() == c.weights.size());
    double sum = 0.0;
    for (double w : c.weights) sum += w;
    CHECK(sum == doctest::Approx(1.0));
    CHECK(c.sharers.size() >= 2);
  }
}
