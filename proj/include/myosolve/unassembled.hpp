#pragma once

#include <string>
#include <vector>

#include "myosolve/csr.hpp"
#include "myosolve/smallmat.hpp"

namespace myo {

/// One subdomain block of an unassembled operator: a local stiffness on the
/// subdomain's own dofs plus the injection map into global dofs.
struct SubdomainBlock {
  CsrMatrix a;                          // n_local x n_local
  std::vector<index_t> local_to_global;  // ascending, size n_local
};

/// Sum-of-blocks operator A = sum_i R_i^T A_i R_i kept in unassembled form.
/// Dofs are grouped in `block_size` components per node. `near_nullspace`
/// optionally carries unit-norm rigid-body modes of the assembled operator.
struct UnassembledMatrix {
  index_t n_global = 0;
  int block_size = 3;
  std::vector<SubdomainBlock> blocks;
  std::vector<std::vector<double>> near_nullspace;

  void spmv(std::span<const double> x, std::span<double> y) const;
  CsrMatrix assemble() const;

  /// Writes one MatrixMarket file per block: <prefix>_sub<k>.mtx plus the
  /// local-to-global maps as <prefix>_map<k>.txt.
  void export_blocks(const std::string& prefix) const;
};

/// Six unit-norm rigid-body modes (translations, rotations about the
/// centroid) evaluated at 3-component nodes.
std::vector<std::vector<double>> rigid_body_modes(const std::vector<Vec3>& coords);

}  // namespace myo
