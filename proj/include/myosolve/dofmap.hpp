#pragma once

#include <vector>

#include "myosolve/mesh.hpp"
#include "myosolve/partition.hpp"

namespace myo {

/// Displacement dof numbering for Q1 or Q2 hex elements, with the
/// per-subdomain local numbering used by unassembled operators.
///
/// A "node" is any dof-carrying entity: mesh vertices for order 1; vertices,
/// edge midpoints, face centers and cell centers for order 2. Each node
/// carries the three displacement components, dof = 3 * node + component,
/// both globally and subdomain-locally.
struct DofMap {
  static constexpr int block_size = 3;

  int order = 1;
  int nodes_per_element = 8;
  index_t n_nodes = 0;
  std::vector<Vec3> node_coords;
  std::vector<index_t> element_nodes;  // n_hexes * nodes_per_element, eval_basis slot order
  std::vector<std::vector<index_t>> node_subdomains;  // ascending subdomain ids

  struct Subdomain {
    std::vector<index_t> nodes;  // global node ids, ascending
    std::vector<index_t> hexes;
    std::vector<index_t> element_local_nodes;  // per listed hex, local node ids
  };
  std::vector<Subdomain> subdomains;

  index_t n_dofs() const { return block_size * n_nodes; }
  index_t n_local_dofs(index_t sub) const {
    return block_size * static_cast<index_t>(subdomains[sub].nodes.size());
  }
  const index_t* nodes_of(index_t hex) const {
    return element_nodes.data() + static_cast<size_t>(hex) * nodes_per_element;
  }
};

DofMap build_dofmap(const HexMesh& mesh, const Partition& part, int order);

}  // namespace myo
