#pragma once

#include <string>
#include <vector>

#include "myosolve/dense.hpp"
#include "myosolve/factorization.hpp"

namespace myo {

struct AmgOptions {
  double strength_eps = 0.08;
  bool signed_strength = false;  // scalar signed rule instead of block Frobenius
  bool smooth_prolongator = false;
  std::string smoother = "sgs";  // "sgs" or "bjacobi"
  double jacobi_omega = 2.0 / 3.0;
  int max_levels = 10;
  index_t coarse_cap = 200;   // direct solve at or below this size
  double stagnation = 0.9;    // stop coarsening when n_coarse exceeds this ratio
};

/// Smoothed-aggregation-style AMG V-cycle used as the baseline
/// preconditioner. Strength couples whole node blocks by Frobenius norm,
/// aggregation is greedy over the strength graph, and the tentative
/// prolongator reproduces the near-nullspace exactly per aggregate (thin QR,
/// rank drops give variable coarse block sizes). Prolongator smoothing is off
/// unless requested.
class AmgHierarchy {
 public:
  AmgHierarchy(const CsrMatrix& a, int block_size,
               const std::vector<std::vector<double>>& near_nullspace,
               const AmgOptions& opts = {});

  /// One V(1,1) cycle from a zero initial guess: z approximates inv(A) r.
  void vcycle(std::span<const double> r, std::span<double> z) const;

  int n_levels() const { return static_cast<int>(levels_.size()); }
  index_t level_dofs(int l) const { return levels_[l].a.rows; }
  index_t level_aggregates(int l) const { return levels_[l].n_aggregates; }

  /// Prolongator from level l+1 to level l and the nullspace vectors carried
  /// at level l (exposed for hierarchy invariants).
  const CsrMatrix& prolongator(int l) const { return levels_[l].p; }
  const std::vector<std::vector<double>>& nullspace(int l) const { return levels_[l].b; }

 private:
  struct Level {
    CsrMatrix a;
    std::vector<index_t> node_ptr;  // dof offsets per node, size n_nodes+1
    std::vector<std::vector<double>> b;
    CsrMatrix p;                    // to the next coarser level
    index_t n_aggregates = 0;
    std::vector<DenseMatrix> block_inv;  // per-node diagonal block inverses
  };

  void smooth(const Level& lv, std::span<const double> r, std::span<double> z) const;
  void cycle(std::size_t l, std::span<const double> r, std::span<double> z) const;

  AmgOptions opts_;
  std::vector<Level> levels_;
  DirectSolver coarse_;
};

/// Node-level strength-of-connection graph (symmetrized), exposed for tests.
/// Returns the adjacency of strong couplings, diagonal excluded.
std::vector<std::vector<index_t>> amg_strength_graph(const CsrMatrix& a,
                                                     const std::vector<index_t>& node_ptr,
                                                     double eps, bool signed_rule);

/// Greedy aggregation over a strength graph; returns the aggregate id per
/// node and the aggregate count.
std::pair<std::vector<index_t>, index_t> amg_aggregate(
    const std::vector<std::vector<index_t>>& strong);

}  // namespace myo
