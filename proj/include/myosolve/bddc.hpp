#pragma once

#include <memory>
#include <string>

#include "myosolve/dense.hpp"
#include "myosolve/factorization.hpp"
#include "myosolve/gmres.hpp"
#include "myosolve/interface.hpp"
#include "myosolve/unassembled.hpp"

namespace myo {

/// Selection of the coarse (primal) constraint space. Vertices pin single
/// interface nodes; edge and face averages constrain the mean of a class per
/// displacement component. `all_interface` turns every interface dof into a
/// vertex constraint; with it the preconditioner is an exact solver.
struct PrimalConfig {
  bool vertices = true;
  bool edge_averages = true;
  bool face_averages = true;
  bool all_interface = false;

  static PrimalConfig from_name(const std::string& name);  // v, ve, ef, vef, full
  std::string name() const;
};

struct BddcOptions {
  PrimalConfig primal;
  int levels = 2;      // 2 or 3; 3 re-applies the method to the coarse problem
  int coarsening = 8;  // target subdomains per agglomerate at the next level
};

/// One primal constraint: the same weighted node functional applied to each
/// of the three displacement components.
struct PrimalConstraint {
  std::vector<index_t> nodes;
  std::vector<double> weights;
  std::vector<index_t> sharers;  // block ids whose local space carries a row
};

/// Balancing domain decomposition by constraints over an unassembled
/// operator. Interface dofs (node shared by two or more blocks) are
/// preconditioned by scaled constrained-Neumann corrections plus a coarse
/// solve over the primal constraints; constraints are enforced through local
/// saddle-point factorizations. With three levels the coarse matrix stays
/// subassembled by block, blocks are agglomerated, and one application of the
/// same method replaces the direct coarse solve.
class Bddc {
 public:
  /// `node_coords` has one entry per 3-dof node of the operator; geometry
  /// only steers interface classification (corner promotion, agglomeration).
  Bddc(const UnassembledMatrix& k, std::vector<Vec3> node_coords, const BddcOptions& opts);

  index_t n_dofs() const { return n_; }
  index_t n_gamma_dofs() const { return static_cast<index_t>(gamma_dofs_.size()); }
  index_t n_primal_dofs() const { return n_primal_; }
  int levels() const { return levels_built_; }
  bool symmetric() const { return symmetric_; }
  index_t n_agglomerates() const { return n_agglomerates_; }

  /// Global dof ids of the interface, ascending; interface vectors below use
  /// this ordering.
  const std::vector<index_t>& gamma_dofs() const { return gamma_dofs_; }
  const std::vector<PrimalConstraint>& constraints() const { return constraints_; }
  const InterfaceSets& interface_sets() const { return sets_; }

  /// z_gamma = M^-1 r_gamma on the interface.
  void apply_interface(std::span<const double> r_gamma, std::span<double> z_gamma) const;

  /// Full-system preconditioner: exact interior solves wrapped around the
  /// interface correction (block-LDU form).
  void precondition_full(std::span<const double> r, std::span<double> z) const;
  void precondition_full_with(std::span<const double> r, std::span<double> z,
                              const LinearOp& interface_solver) const;

  /// y_gamma = S x_gamma, the interface Schur complement action.
  void schur_matvec(std::span<const double> x_gamma, std::span<double> y_gamma) const;

  /// Schur right-hand side g = r_gamma - A_gi inv(A_ii) r_i.
  std::vector<double> reduce_rhs(std::span<const double> r) const;

  /// Interior back-substitution given the interface solution.
  std::vector<double> expand_solution(std::span<const double> r,
                                      std::span<const double> x_gamma) const;

 private:
  struct Block {
    index_t n_local = 0;
    std::vector<index_t> interior;         // local dof ids
    std::vector<index_t> interior_global;  // aligned global dof ids
    std::vector<index_t> gamma;            // local dof ids
    std::vector<index_t> gamma_pos;        // per gamma dof, index into gamma_dofs_
    std::vector<double> dscale;            // per gamma dof, 1/multiplicity
    CsrMatrix a_ii, a_ig, a_gi, a_gg;
    DirectSolver interior_solver;
    DirectSolver saddle;              // [[A, C^T], [C, 0]], constraint rows last
    std::vector<index_t> primal_ids;  // global primal dof per constraint row
    DenseMatrix phi;                  // n_local x n_c
    DenseMatrix spp;                  // n_c x n_c subassembled coarse block
  };

  void build_constraints(const PrimalConfig& cfg,
                         const std::vector<std::vector<index_t>>& node_sharers);
  void build_block(Block& blk, const SubdomainBlock& sb, index_t blk_id,
                   const std::vector<std::vector<index_t>>& node_sharers);
  void build_coarse(const BddcOptions& opts);
  void coarse_solve(std::span<const double> r, std::span<double> z) const;

  index_t n_ = 0;
  bool symmetric_ = false;
  int levels_built_ = 2;
  index_t n_primal_ = 0;
  index_t n_agglomerates_ = 0;

  std::vector<Vec3> coords_;
  InterfaceSets sets_;
  std::vector<index_t> gamma_dofs_;
  std::vector<index_t> gamma_pos_of_dof_;  // -1 for interior dofs
  std::vector<PrimalConstraint> constraints_;
  std::vector<Block> blocks_;

  DirectSolver coarse_direct_;  // two-level path (also one agglomerate)
  bool coarse_is_direct_ = true;
  std::unique_ptr<UnassembledMatrix> coarse_matrix_;
  std::unique_ptr<Bddc> coarse_bddc_;
};

}  // namespace myo
