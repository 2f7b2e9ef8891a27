#include "myosolve/dofmap.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace myo {

namespace {

// Tensor index (i,j,k in {0,1,2}) of the order-2 lattice, i fastest.
int q2_index(int i, int j, int k) { return i + 3 * (j + 3 * k); }

}  // namespace

DofMap build_dofmap(const HexMesh& mesh, const Partition& part, int order) {
  if (order != 1 && order != 2) throw std::invalid_argument("element order must be 1 or 2");
  if (part.subdomain_of_hex.size() != static_cast<size_t>(mesh.n_hexes()))
    throw std::invalid_argument("partition does not match mesh");

  DofMap dm;
  dm.order = order;
  dm.nodes_per_element = order == 1 ? 8 : 27;

  if (order == 1) {
    dm.n_nodes = mesh.n_nodes();
    dm.node_coords = mesh.nodes;
    // slots follow the corner order of eval_basis(1), i.e. VTK
    dm.element_nodes.resize(static_cast<size_t>(mesh.n_hexes()) * 8);
    for (index_t e = 0; e < mesh.n_hexes(); ++e)
      for (int c = 0; c < 8; ++c) dm.element_nodes[8 * e + c] = mesh.hexes[e][c];
  } else {
    // Entity enumeration: mesh vertices, then unique edges, faces, cells.
    std::map<std::array<index_t, 2>, index_t> edge_ids;
    std::map<std::array<index_t, 4>, index_t> face_ids;
    auto corner_at = [&](index_t e, int i, int j, int k) {
      return mesh.hexes[e][vtk_corner(i / 2, j / 2, k / 2)];
    };
    for (index_t e = 0; e < mesh.n_hexes(); ++e)
      for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j)
          for (int i = 0; i < 3; ++i) {
            int mids = (i == 1) + (j == 1) + (k == 1);
            if (mids == 1) {
              std::array<index_t, 2> key;
              int c = 0;
              for (int s = -1; s <= 1; s += 2)
                key[c++] = corner_at(e, i == 1 ? i + s : i, j == 1 ? j + s : j,
                                     k == 1 ? k + s : k);
              std::sort(key.begin(), key.end());
              edge_ids.try_emplace(key, 0);
            } else if (mids == 2) {
              std::array<index_t, 4> key;
              int c = 0;
              for (int s1 = -1; s1 <= 1; s1 += 2)
                for (int s2 = -1; s2 <= 1; s2 += 2) {
                  int ii = i, jj = j, kk = k;
                  if (i == 1 && j == 1) { ii += s1; jj += s2; }
                  else if (i == 1 && k == 1) { ii += s1; kk += s2; }
                  else { jj += s1; kk += s2; }
                  key[c++] = corner_at(e, ii, jj, kk);
                }
              std::sort(key.begin(), key.end());
              face_ids.try_emplace(key, 0);
            }
          }
    index_t next = mesh.n_nodes();
    for (auto& [key, id] : edge_ids) id = next++;
    for (auto& [key, id] : face_ids) id = next++;
    index_t cell_base = next;
    dm.n_nodes = cell_base + mesh.n_hexes();

    dm.node_coords.resize(dm.n_nodes);
    for (index_t i = 0; i < mesh.n_nodes(); ++i) dm.node_coords[i] = mesh.nodes[i];
    for (const auto& [key, id] : edge_ids)
      dm.node_coords[id] = 0.5 * (mesh.nodes[key[0]] + mesh.nodes[key[1]]);
    for (const auto& [key, id] : face_ids)
      dm.node_coords[id] = 0.25 * (mesh.nodes[key[0]] + mesh.nodes[key[1]] +
                                   mesh.nodes[key[2]] + mesh.nodes[key[3]]);

    dm.element_nodes.resize(static_cast<size_t>(mesh.n_hexes()) * 27);
    for (index_t e = 0; e < mesh.n_hexes(); ++e) {
      Vec3 center{};
      for (int c = 0; c < 8; ++c) center = center + 0.125 * mesh.nodes[mesh.hexes[e][c]];
      dm.node_coords[cell_base + e] = center;
      for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j)
          for (int i = 0; i < 3; ++i) {
            int mids = (i == 1) + (j == 1) + (k == 1);
            index_t id;
            if (mids == 0) {
              id = corner_at(e, i, j, k);
            } else if (mids == 1) {
              std::array<index_t, 2> key;
              int c = 0;
              for (int s = -1; s <= 1; s += 2)
                key[c++] = corner_at(e, i == 1 ? i + s : i, j == 1 ? j + s : j,
                                     k == 1 ? k + s : k);
              std::sort(key.begin(), key.end());
              id = edge_ids.at(key);
            } else if (mids == 2) {
              std::array<index_t, 4> key;
              int c = 0;
              for (int s1 = -1; s1 <= 1; s1 += 2)
                for (int s2 = -1; s2 <= 1; s2 += 2) {
                  int ii = i, jj = j, kk = k;
                  if (i == 1 && j == 1) { ii += s1; jj += s2; }
                  else if (i == 1 && k == 1) { ii += s1; kk += s2; }
                  else { jj += s1; kk += s2; }
                  key[c++] = corner_at(e, ii, jj, kk);
                }
              std::sort(key.begin(), key.end());
              id = face_ids.at(key);
            } else {
              id = cell_base + e;
            }
            dm.element_nodes[27 * e + q2_index(i, j, k)] = id;
          }
    }
  }

  dm.node_subdomains.resize(dm.n_nodes);
  dm.subdomains.resize(part.n_subdomains);
  for (index_t e = 0; e < mesh.n_hexes(); ++e) {
    index_t s = part.subdomain_of_hex[e];
    dm.subdomains[s].hexes.push_back(e);
    for (int c = 0; c < dm.nodes_per_element; ++c)
      dm.node_subdomains[dm.nodes_of(e)[c]].push_back(s);
  }
  for (auto& subs : dm.node_subdomains) {
    std::sort(subs.begin(), subs.end());
    subs.erase(std::unique(subs.begin(), subs.end()), subs.end());
  }
  for (index_t s = 0; s < part.n_subdomains; ++s) {
    auto& sd = dm.subdomains[s];
    for (index_t e : sd.hexes)
      sd.nodes.insert(sd.nodes.end(), dm.nodes_of(e), dm.nodes_of(e) + dm.nodes_per_element);
    std::sort(sd.nodes.begin(), sd.nodes.end());
    sd.nodes.erase(std::unique(sd.nodes.begin(), sd.nodes.end()), sd.nodes.end());
    sd.element_local_nodes.reserve(sd.hexes.size() * dm.nodes_per_element);
    for (index_t e : sd.hexes)
      for (int c = 0; c < dm.nodes_per_element; ++c) {
        auto it = std::lower_bound(sd.nodes.begin(), sd.nodes.end(), dm.nodes_of(e)[c]);
        sd.element_local_nodes.push_back(static_cast<index_t>(it - sd.nodes.begin()));
      }
  }
  return dm;
}

}  // namespace myo
