#include "myosolve/timestepper.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace myo {

double LoadProgram::pressure_at(double t) const {
  if (pressure_max == 0.0) return 0.0;
  return pressure_max * std::min(t, pressure_ramp) / pressure_ramp;
}

double LoadProgram::gamma_at(double t) const {
  if (gamma_max == 0.0) return 0.0;
  return gamma_max * std::min(t, gamma_ramp) / gamma_ramp;
}

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

NewtonReport newton_solve(const Problem& prob, const TransientOptions& opts, double pressure,
                          double gamma, std::vector<double>& d, std::span<const double> d_prev,
                          std::span<const double> d_prev2) {
  NewtonReport rep;
  const index_t n = prob.dofs->n_dofs();
  StepState st;
  st.dt = opts.dt;
  st.pressure = pressure;
  st.gamma = gamma;
  st.d = d;
  st.d_prev = d_prev;
  st.d_prev2 = d_prev2;

  std::unique_ptr<Bddc> bddc;
  std::unique_ptr<AmgHierarchy> amg;
  CsrMatrix a_csr;

  double r0 = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  int growths = 0;
  try {
    for (int it = 0;; ++it) {
      std::vector<double> r = assemble_residual(prob, st);
      const double nr = norm2(r);
      rep.residual_norms.push_back(nr);
      rep.iters = it;
      if (it == 0) r0 = nr;
      if (it >= 1 && nr <= std::max(opts.newton.abs_tol, opts.newton.rel_tol * r0)) {
        rep.converged = true;
        return rep;
      }
      if (nr > prev) {
        if (++growths >= opts.newton.max_growths) {
          rep.failure = "diverged: residual grew " + std::to_string(growths) + " times";
          return rep;
        }
      } else {
        growths = 0;
      }
      prev = nr;
      if (it == opts.newton.max_iters) {
        rep.failure = "no convergence in " + std::to_string(it) + " iterations";
        return rep;
      }

      const UnassembledMatrix k = assemble_jacobian(prob, st);
      for (double& x : r) x = -x;
      std::vector<double> dx(n, 0.0);
      GmresResult lin;
      if (opts.solver == "bddc") {
        if (!bddc || !opts.freeze_preconditioner)
          bddc = std::make_unique<Bddc>(k, prob.dofs->node_coords, opts.bddc);
        lin = gmres([&k](std::span<const double> x, std::span<double> y) { k.spmv(x, y); },
                    [&](std::span<const double> x, std::span<double> y) {
                      bddc->precondition_full(x, y);
                    },
                    r, dx, opts.gmres);
      } else if (opts.solver == "amg") {
        a_csr = k.assemble();
        if (!amg || !opts.freeze_preconditioner)
          amg = std::make_unique<AmgHierarchy>(a_csr, k.block_size, k.near_nullspace, opts.amg);
        lin = gmres(
            [&a_csr](std::span<const double> x, std::span<double> y) { spmv(a_csr, x, y); },
            [&](std::span<const double> x, std::span<double> y) { amg->vcycle(x, y); }, r, dx,
            opts.gmres);
      } else {
        throw std::invalid_argument("newton_solve: unknown solver " + opts.solver);
      }
      rep.linear_iters.push_back(lin.iters);
      rep.linear_relres.push_back(lin.rel_residual);
      for (index_t i = 0; i < n; ++i) d[i] += dx[i];
    }
  } catch (const ElementInversionError& e) {
    rep.failure = std::string("diverged: ") + e.what();
  } catch (const SingularMatrixError& e) {
    rep.failure = std::string("diverged: ") + e.what();
  } catch (const std::invalid_argument& e) {
    rep.failure = std::string("diverged: ") + e.what();
  }
  return rep;
}

TransientResult run_transient(const Problem& prob, const TransientOptions& opts) {
  TransientResult res;
  const index_t n = prob.dofs->n_dofs();
  std::vector<double> d_prev(n, 0.0), d_prev2(n, 0.0);

  for (int step = 1; step <= opts.n_steps; ++step) {
    const double t = step * opts.dt;
    std::vector<double> d = d_prev;

    const auto t0 = std::chrono::steady_clock::now();
    NewtonReport rep = newton_solve(prob, opts, opts.loads.pressure_at(t), opts.loads.gamma_at(t),
                                    d, d_prev, d_prev2);
    const auto t1 = std::chrono::steady_clock::now();

    StepRecord rec;
    rec.step = step;
    rec.time = t;
    rec.seconds = std::chrono::duration<double>(t1 - t0).count();
    rec.newton = std::move(rep);
    const bool ok = rec.newton.converged;
    if (!ok) res.failure = "step " + std::to_string(step) + ": " + rec.newton.failure;
    res.steps.push_back(std::move(rec));
    if (!ok) {
      res.d = std::move(d);
      return res;
    }
    d_prev2 = std::move(d_prev);
    d_prev = std::move(d);
  }
  res.ok = true;
  res.d = std::move(d_prev);
  return res;
}

}  // namespace myo
