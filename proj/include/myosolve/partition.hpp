#pragma once

#include <vector>

#include "myosolve/mesh.hpp"

namespace myo {

/// Non-overlapping element partition. H is the largest subdomain bounding-box
/// diagonal, h the largest element bounding-box diagonal.
struct Partition {
  index_t n_subdomains = 0;
  std::vector<index_t> subdomain_of_hex;
  double H = 0.0;
  double h = 0.0;
};

/// Splits a structured box grid into px*py*pz axis-aligned blocks.
/// Requires the mesh to be a box whose grid divides evenly.
Partition partition_structured(const HexMesh& mesh, index_t px, index_t py, index_t pz);

/// Recursive coordinate bisection over hex centroids into n parts, followed by
/// a repair pass that merges stray face-disconnected components into a
/// face-neighbor subdomain.
Partition partition_rcb(const HexMesh& mesh, index_t n);

/// Face-adjacency lists between subdomains (ascending, no self entries).
std::vector<std::vector<index_t>> subdomain_adjacency(const HexMesh& mesh, const Partition& part);

}  // namespace myo
