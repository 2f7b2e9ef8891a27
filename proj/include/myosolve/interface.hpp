#pragma once

#include <vector>

#include "myosolve/dofmap.hpp"

namespace myo {

enum class ClassKind : int { vertex = 0, edge = 1, face = 2 };

/// One equivalence class of interface nodes: every node in it is shared by
/// exactly the subdomains in `sharers`. Vertex classes hold a single node.
struct InterfaceClass {
  ClassKind kind;
  std::vector<index_t> sharers;  // ascending
  std::vector<index_t> nodes;    // ascending
};

/// Interface decomposition of a node set. Nodes shared by >= 2 subdomains form
/// the interface; each belongs to exactly one class. Labels: two sharers make
/// a face, more an edge; singleton classes and per-class bounding-box corners
/// are promoted to vertices, so vertices exist for every interface.
struct InterfaceSets {
  std::vector<index_t> gamma_nodes;           // ascending
  std::vector<index_t> gamma_index_of_node;   // -1 when not on the interface
  std::vector<int> multiplicity;              // per gamma node, = #sharers
  std::vector<InterfaceClass> classes;

  index_t n_gamma_nodes() const { return static_cast<index_t>(gamma_nodes.size()); }
};

/// Core classifier over arbitrary entities; reused for coarse levels where
/// "nodes" are primal sites.
InterfaceSets classify_entities(const std::vector<std::vector<index_t>>& sharers,
                                const std::vector<Vec3>& coords);

InterfaceSets classify_interface(const DofMap& dofmap);

}  // namespace myo
