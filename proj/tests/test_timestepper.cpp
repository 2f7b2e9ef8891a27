#include "myosolve/timestepper.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"

using namespace myo;

namespace {

struct Case {
  HexMesh mesh;
  Partition part;
  DofMap dofs;
  Problem prob;

  Case(index_t nx, index_t ny, index_t nz, index_t px) {
    mesh = build_beam_mesh(nx, ny, nz);
    part = partition_structured(mesh, px, 1, 1);
    dofs = build_dofmap(mesh, part, 1);
    prob.mesh = &mesh;
    prob.partition = &part;
    prob.dofs = &dofs;
    prob.material.rho = 1.0;
  }
};

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("load ramps hold their peak") {
  LoadProgram lp;
  lp.pressure_max = 10.0;
  lp.pressure_ramp = 0.1;
  lp.gamma_max = 6e4;
  lp.gamma_ramp = 0.25;
  CHECK(lp.pressure_at(0.0) == 0.0);
  CHECK(lp.pressure_at(0.05) == doctest::Approx(5.0));
  CHECK(lp.pressure_at(0.1) == doctest::Approx(10.0));
  CHECK(lp.pressure_at(3.0) == doctest::Approx(10.0));
  CHECK(lp.gamma_at(0.125) == doctest::Approx(3e4));
  CHECK(lp.gamma_at(1.0) == doctest::Approx(6e4));
}

TEST_CASE("newton converges and lifts the pressurized beam") {
  Case c(4, 2, 2, 2);
  TransientOptions opts;
  opts.dt = 1e-3;
  opts.loads.pressure_max = 4.0;
  opts.loads.pressure_ramp = 0.1;

  const index_t n = c.dofs.n_dofs();
  std::vector<double> d(n, 0.0), dp(n, 0.0), dpp(n, 0.0);
  const NewtonReport rep = newton_solve(c.prob, opts, 4.0, 0.0, d, dp, dpp);
  REQUIRE(rep.converged);
  CHECK(rep.iters >= 1);
  CHECK(rep.residual_norms.size() == static_cast<std::size_t>(rep.iters) + 1);
  CHECK(rep.residual_norms.back() <
        std::max(1e-9, 1e-6 * rep.residual_norms.front()));
  CHECK(rep.linear_iters.size() == static_cast<std::size_t>(rep.iters));

  double mean_uz = 0.0;
  for (index_t i = 0; i < n; i += 3) mean_uz += d[i + 2] / (n / 3);
  CHECK(mean_uz > 0.0);
}

TEST_CASE("hopeless steps report divergence instead of throwing") {
  Case c(2, 1, 1, 2);
  TransientOptions opts;
  opts.dt = 1e-3;
  opts.newton.max_iters = 8;

  const index_t n = c.dofs.n_dofs();
  std::vector<double> d(n, 0.0), dp(n, 0.0), dpp(n, 0.0);
  const NewtonReport rep = newton_solve(c.prob, opts, 1e12, 0.0, d, dp, dpp);
  CHECK(!rep.converged);
  CHECK(!rep.failure.empty());
}

TEST_CASE("transient loop advances histories and records every step") {
  Case c(4, 2, 2, 2);
  TransientOptions opts;
  opts.dt = 1e-3;
  opts.n_steps = 3;
  opts.loads.pressure_max = 4.0;
  opts.loads.pressure_ramp = 0.1;

  const TransientResult res = run_transient(c.prob, opts);
  REQUIRE(res.ok);
  REQUIRE(res.steps.size() == 3);
  for (int s = 0; s < 3; ++s) {
    CHECK(res.steps[s].step == s + 1);
    CHECK(res.steps[s].time == doctest::Approx((s + 1) * 1e-3));
    CHECK(res.steps[s].newton.converged);
    CHECK(!res.steps[s].newton.linear_iters.empty());
    CHECK(res.steps[s].seconds >= 0.0);
  }
  CHECK(norm2(res.d) > 0.0);
}

TEST_CASE("freezing the preconditioner within a step changes only the cost") {
  Case c(4, 2, 2, 2);
  TransientOptions opts;
  opts.dt = 1e-3;
  opts.n_steps = 2;
  opts.loads.pressure_max = 40.0;
  opts.loads.pressure_ramp = 1e-3;  // full load from the first step

  const TransientResult fresh = run_transient(c.prob, opts);
  opts.freeze_preconditioner = true;
  const TransientResult frozen = run_transient(c.prob, opts);
  REQUIRE(fresh.ok);
  REQUIRE(frozen.ok);
  double diff = 0.0;
  for (std::size_t i = 0; i < fresh.d.size(); ++i)
    diff += (fresh.d[i] - frozen.d[i]) * (fresh.d[i] - frozen.d[i]);
  CHECK(std::sqrt(diff) / (norm2(fresh.d) + 1e-30) < 1e-5);
}

TEST_CASE("halving the step leaves the quasi-static answer in place") {
  // no inertia, no dashpots: the state depends on the current load alone, so
  // runs that meet at the same time must agree to solver tolerance
  Case c(4, 2, 2, 2);
  c.prob.material.rho = 0.0;
  c.prob.robin_base = {2e4, 2e3, 0.0, 0.0};
  TransientOptions opts;
  opts.dt = 2e-3;
  opts.n_steps = 2;
  opts.loads.pressure_max = 4.0;
  opts.loads.pressure_ramp = 0.1;

  const TransientResult coarse = run_transient(c.prob, opts);
  opts.dt = 1e-3;
  opts.n_steps = 4;
  const TransientResult fine = run_transient(c.prob, opts);
  REQUIRE(coarse.ok);
  REQUIRE(fine.ok);

  double diff = 0.0;
  for (std::size_t i = 0; i < coarse.d.size(); ++i)
    diff += (coarse.d[i] - fine.d[i]) * (coarse.d[i] - fine.d[i]);
  CHECK(std::sqrt(diff) / norm2(fine.d) < 1e-6);
}

TEST_CASE("amg and bddc time loops land on the same displacement") {
  Case c(4, 2, 2, 2);
  TransientOptions opts;
  opts.dt = 1e-3;
  opts.n_steps = 2;
  opts.loads.pressure_max = 4.0;
  opts.loads.pressure_ramp = 0.1;
  opts.gmres.rtol = 1e-10;

  const TransientResult bddc = run_transient(c.prob, opts);
  opts.solver = "amg";
  const TransientResult amg = run_transient(c.prob, opts);
  REQUIRE(bddc.ok);
  REQUIRE(amg.ok);
  double diff = 0.0;
  for (std::size_t i = 0; i < bddc.d.size(); ++i)
    diff += (bddc.d[i] - amg.d[i]) * (bddc.d[i] - amg.d[i]);
  CHECK(std::sqrt(diff) / norm2(bddc.d) < 1e-5);
}
