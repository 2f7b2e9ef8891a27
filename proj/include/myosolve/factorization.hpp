#pragma once

#include "myosolve/csr.hpp"

namespace myo {

/// Reverse Cuthill-McKee ordering on the symmetrized pattern of `a`. The last
/// `tail` rows are pinned at the end in their original order so constraint
/// rows of saddle systems eliminate after the primal block.
std::vector<index_t> rcm_ordering(const CsrMatrix& a, index_t tail = 0);

/// Sparse direct solver. Symmetric systems go through an up-looking LDL^T;
/// a degenerate pivot or a failed residual check falls back to left-looking
/// LU with row partial pivoting. Both paths use the RCM pre-ordering.
class DirectSolver {
 public:
  struct Options {
    bool symmetric = false;  // attempt LDL^T before LU
    index_t tail = 0;        // trailing rows excluded from reordering
    bool reorder = true;
  };

  void factor(const CsrMatrix& a) { factor(a, Options{}); }
  void factor(const CsrMatrix& a, const Options& opts);

  void solve(std::span<const double> b, std::span<double> x) const;
  std::vector<double> solve(std::span<const double> b) const;
  void solve_transpose(std::span<const double> b, std::span<double> x) const;
  std::vector<double> solve_transpose(std::span<const double> b) const;

  bool used_ldlt() const { return used_ldlt_; }
  index_t dim() const { return n_; }

 private:
  void factor_lu(const CsrMatrix& a);
  void factor_ldlt(const CsrMatrix& a);
  bool residual_ok(const CsrMatrix& a) const;

  index_t n_ = 0;
  bool used_ldlt_ = false;
  std::vector<index_t> perm_;  // fill-reducing order, position -> original id

  // LU factors in CSC over the permuted frame. L columns store the unit
  // diagonal first; U columns store the pivot last. Row indices of both are
  // pivot positions. rowof_[k] is the permuted-frame row pivoted at step k.
  std::vector<index_t> lp_, li_, up_, ui_, rowof_;
  std::vector<double> lx_, ux_;

  // LDL^T factors in CSC over the permuted frame (unit diagonal implicit).
  std::vector<index_t> ldl_lp_, ldl_li_;
  std::vector<double> ldl_lx_, ldl_d_;
};

}  // namespace myo
