#pragma once

#include <functional>
#include <span>
#include <vector>

#include "myosolve/core.hpp"

namespace myo {

using LinearOp = std::function<void(std::span<const double>, std::span<double>)>;

struct GmresOptions {
  index_t restart = 200;
  index_t max_iters = 2000;
  double rtol = 1e-8;  // relative to ||b||
  double atol = 0.0;
};

struct GmresResult {
  bool converged = false;
  index_t iters = 0;
  double rel_residual = 0.0;            // true residual over ||b||
  std::vector<double> residual_history;  // preconditioned-basis estimates
};

/// Restarted GMRES with right preconditioning, modified Gram-Schmidt with one
/// reorthogonalization pass, and Givens-rotation least squares. Convergence is
/// confirmed on the true residual; `x` holds the iterate on entry and exit.
GmresResult gmres(const LinearOp& apply_a, const LinearOp& apply_m, std::span<const double> b,
                  std::span<double> x, const GmresOptions& opts = {});

/// Unpreconditioned convenience overload.
GmresResult gmres(const LinearOp& apply_a, std::span<const double> b, std::span<double> x,
                  const GmresOptions& opts = {});

/// Tests x'(A y) == y'(A x) on `pairs` fixed-seed random vector pairs; the
/// mismatch is measured relative to the product magnitudes.
bool probe_symmetry(const LinearOp& apply_a, index_t n, int pairs = 20, double tol = 1e-10);

}  // namespace myo
