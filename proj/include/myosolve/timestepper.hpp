#pragma once

#include <string>
#include <vector>

#include "myosolve/amg.hpp"
#include "myosolve/assembly.hpp"
#include "myosolve/bddc.hpp"
#include "myosolve/gmres.hpp"

namespace myo {

/// Time course of the boundary loads: linear ramps that hold their peak.
struct LoadProgram {
  double pressure_max = 0.0;  // Pa
  double pressure_ramp = 0.1;
  double gamma_max = 0.0;  // Pa
  double gamma_ramp = 0.25;

  double pressure_at(double t) const;
  double gamma_at(double t) const;
};

struct NewtonSettings {
  double abs_tol = 1e-9;
  double rel_tol = 1e-6;  // relative to the first residual of the step
  int max_iters = 25;
  int max_growths = 3;  // consecutive residual growths before giving up
};

struct TransientOptions {
  double dt = 1e-3;
  int n_steps = 10;
  std::string solver = "bddc";  // "bddc" or "amg"
  BddcOptions bddc;
  AmgOptions amg;
  GmresOptions gmres;
  NewtonSettings newton;
  LoadProgram loads;
  bool freeze_preconditioner = false;  // reuse the first preconditioner of each step
};

struct NewtonReport {
  bool converged = false;
  int iters = 0;
  std::vector<double> residual_norms;  // per iteration, includes the accepted norm
  std::vector<int> linear_iters;       // per Newton iteration
  std::vector<double> linear_relres;
  std::string failure;  // empty when converged
};

struct StepRecord {
  int step = 0;
  double time = 0.0;
  double seconds = 0.0;
  NewtonReport newton;
};

struct TransientResult {
  bool ok = false;
  std::vector<StepRecord> steps;
  std::vector<double> d;  // last accepted displacement
  std::string failure;
};

/// Solves one implicit step by Newton's method on the dynamic residual. `d`
/// enters as the initial guess and leaves as the accepted iterate. At least
/// one correction is taken; assembly failures on an overshot iterate are
/// reported as divergence, not propagated.
NewtonReport newton_solve(const Problem& prob, const TransientOptions& opts, double pressure,
                          double gamma, std::vector<double>& d, std::span<const double> d_prev,
                          std::span<const double> d_prev2);

/// Implicit time loop from a resting start. Stops at the first step that
/// fails to converge; `steps` keeps the record of every attempted step.
TransientResult run_transient(const Problem& prob, const TransientOptions& opts);

}  // namespace myo
