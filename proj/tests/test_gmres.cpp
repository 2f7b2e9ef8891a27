#include "myosolve/gmres.hpp"

#include <random>
#include <vector>

#include "myosolve/csr.hpp"
#include "myosolve/factorization.hpp"
#include "doctest.h"

using namespace myo;

namespace {

CsrMatrix convection_diffusion(index_t n) {
  // 1D diffusion with a skew convection term: unsymmetric, well conditioned
  std::vector<Triplet> trips;
  for (index_t i = 0; i < n; ++i) {
    trips.push_back({i, i, 4.0});
    if (i > 0) trips.push_back({i, i - 1, -1.0 - 0.4});
    if (i + 1 < n) trips.push_back({i, i + 1, -1.0 + 0.4});
  }
  return csr_from_triplets(n, n, std::move(trips));
}

double rel_residual(const CsrMatrix& a, std::span<const double> x, std::span<const double> b) {
  std::vector<double> r(a.rows);
  spmv(a, x, r);
  double num = 0.0, den = 0.0;
  for (index_t i = 0; i < a.rows; ++i) {
    num += (r[i] - b[i]) * (r[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("gmres solves an unsymmetric system to the requested tolerance") {
  const index_t n = 120;
  const CsrMatrix a = convection_diffusion(n);
  std::mt19937 rng(47);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> b(n), x(n, 0.0);
  for (auto& v : b) v = u(rng);

  GmresOptions opts;
  opts.rtol = 1e-10;
  const auto apply = [&a](std::span<const double> in, std::span<double> out) { spmv(a, in, out); };
  const GmresResult res = gmres(apply, b, x, opts);

  CHECK(res.converged);
  CHECK(res.iters > 0);
  CHECK(rel_residual(a, x, b) < 1e-10);
  CHECK(res.rel_residual < 1e-10);
}

TEST_CASE("an exact right preconditioner converges in one iteration") {
  const index_t n = 80;
  const CsrMatrix a = convection_diffusion(n);
  DirectSolver direct;
  direct.factor(a);

  std::mt19937 rng(53);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> b(n), x(n, 0.0);
  for (auto& v : b) v = u(rng);

  const GmresResult res = gmres(
      [&a](std::span<const double> in, std::span<double> out) { spmv(a, in, out); },
      [&direct](std::span<const double> in, std::span<double> out) { direct.solve(in, out); }, b,
      x, {});
  CHECK(res.converged);
  CHECK(res.iters <= 2);
  CHECK(rel_residual(a, x, b) < 1e-8);
}

TEST_CASE("restarts still reach convergence") {
  const index_t n = 100;
  const CsrMatrix a = convection_diffusion(n);
  std::vector<double> b(n, 1.0), x(n, 0.0);

  GmresOptions opts;
  opts.restart = 11;
  opts.max_iters = 4000;
  opts.rtol = 1e-9;
  const GmresResult res =
      gmres([&a](std::span<const double> in, std::span<double> out) { spmv(a, in, out); }, b, x,
            opts);
  CHECK(res.converged);
  CHECK(rel_residual(a, x, b) < 1e-9);
}

TEST_CASE("a warm start keeps its progress") {
  const index_t n = 60;
  const CsrMatrix a = convection_diffusion(n);
  std::vector<double> b(n, 1.0), x(n, 0.0);
  DirectSolver direct;
  direct.factor(a);
  std::vector<double> exact(n);
  direct.solve(b, exact);

  // start from the exact solution: no work left
  const GmresResult res = gmres(
      [&a](std::span<const double> in, std::span<double> out) { spmv(a, in, out); }, b, exact, {});
  CHECK(res.converged);
  CHECK(res.iters == 0);
}

TEST_CASE("symmetry probe separates the two operator kinds") {
  const index_t n = 50;
  const CsrMatrix a = convection_diffusion(n);
  CHECK(!probe_symmetry([&a](std::span<const double> in, std::span<double> out) { spmv(a, in, out); }, n));

  std::vector<Triplet> trips;
  for (index_t i = 0; i < n; ++i) {
    trips.push_back({i, i, 4.0});
    if (i > 0) trips.push_back({i, i - 1, -1.0});
    if (i + 1 < n) trips.push_back({i, i + 1, -1.0});
  }
  const CsrMatrix sym = csr_from_triplets(n, n, std::move(trips));
  CHECK(probe_symmetry([&sym](std::span<const double> in, std::span<double> out) { spmv(sym, in, out); }, n));
}
