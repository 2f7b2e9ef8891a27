#include "myosolve/partition.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace myo {

namespace {

Vec3 hex_centroid(const HexMesh& mesh, index_t e) {
  Vec3 c{};
  for (index_t n : mesh.hexes[e]) c = c + 0.125 * mesh.nodes[n];
  return c;
}

void fill_sizes(const HexMesh& mesh, Partition& part) {
  std::vector<Vec3> lo(part.n_subdomains, {1e300, 1e300, 1e300});
  std::vector<Vec3> hi(part.n_subdomains, {-1e300, -1e300, -1e300});
  part.h = 0.0;
  for (index_t e = 0; e < mesh.n_hexes(); ++e) {
    Vec3 elo{1e300, 1e300, 1e300}, ehi{-1e300, -1e300, -1e300};
    for (index_t n : mesh.hexes[e])
      for (int d = 0; d < 3; ++d) {
        elo[d] = std::min(elo[d], mesh.nodes[n][d]);
        ehi[d] = std::max(ehi[d], mesh.nodes[n][d]);
      }
    part.h = std::max(part.h, norm(ehi - elo));
    index_t s = part.subdomain_of_hex[e];
    for (int d = 0; d < 3; ++d) {
      lo[s][d] = std::min(lo[s][d], elo[d]);
      hi[s][d] = std::max(hi[s][d], ehi[d]);
    }
  }
  part.H = 0.0;
  for (index_t s = 0; s < part.n_subdomains; ++s) part.H = std::max(part.H, norm(hi[s] - lo[s]));
}

/// Hex -> face-neighbor hexes, via shared 4-node faces.
std::vector<std::vector<index_t>> hex_adjacency(const HexMesh& mesh) {
  std::map<std::array<index_t, 4>, std::array<index_t, 2>> owners;
  for (index_t e = 0; e < mesh.n_hexes(); ++e)
    for (int f = 0; f < 6; ++f) {
      auto fn = face_nodes(mesh, BoundaryFace{e, f, Region::free_boundary});
      std::array<index_t, 4> key{fn[0], fn[1], fn[2], fn[3]};
      std::sort(key.begin(), key.end());
      auto [it, inserted] = owners.try_emplace(key, std::array<index_t, 2>{e, -1});
      if (!inserted) it->second[1] = e;
    }
  std::vector<std::vector<index_t>> adj(mesh.n_hexes());
  for (const auto& [key, own] : owners)
    if (own[1] >= 0) {
      adj[own[0]].push_back(own[1]);
      adj[own[1]].push_back(own[0]);
    }
  for (auto& a : adj) std::sort(a.begin(), a.end());
  return adj;
}

void rcb_split(const HexMesh& mesh, std::vector<index_t>& hexes, index_t n, index_t first_id,
               std::vector<index_t>& out) {
  if (n == 1) {
    for (index_t e : hexes) out[e] = first_id;
    return;
  }
  Vec3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
  std::vector<std::pair<Vec3, index_t>> cents;
  cents.reserve(hexes.size());
  for (index_t e : hexes) {
    Vec3 c = hex_centroid(mesh, e);
    cents.emplace_back(c, e);
    for (int d = 0; d < 3; ++d) {
      lo[d] = std::min(lo[d], c[d]);
      hi[d] = std::max(hi[d], c[d]);
    }
  }
  int axis = 0;
  for (int d = 1; d < 3; ++d)
    if (hi[d] - lo[d] > hi[axis] - lo[axis]) axis = d;
  std::sort(cents.begin(), cents.end(), [axis](const auto& a, const auto& b) {
    if (a.first[axis] != b.first[axis]) return a.first[axis] < b.first[axis];
    return a.second < b.second;
  });
  index_t n_left = (n + 1) / 2;
  size_t cnt_left =
      (hexes.size() * static_cast<size_t>(n_left) + static_cast<size_t>(n) / 2) / n;
  cnt_left = std::min(std::max<size_t>(cnt_left, 1), hexes.size() - 1);
  std::vector<index_t> left, right;
  for (size_t i = 0; i < cents.size(); ++i)
    (i < cnt_left ? left : right).push_back(cents[i].second);
  rcb_split(mesh, left, n_left, first_id, out);
  rcb_split(mesh, right, n - n_left, first_id + n_left, out);
}

/// Reassigns every face-connected component except the largest per subdomain
/// to the neighboring subdomain it touches the most.
void repair_connectivity(const HexMesh& mesh, Partition& part) {
  auto adj = hex_adjacency(mesh);
  for (int pass = 0; pass < 8; ++pass) {
    bool changed = false;
    std::vector<int> comp(mesh.n_hexes(), -1);
    std::vector<std::vector<index_t>> comp_hexes;
    for (index_t seed = 0; seed < mesh.n_hexes(); ++seed) {
      if (comp[seed] >= 0) continue;
      int id = static_cast<int>(comp_hexes.size());
      comp_hexes.emplace_back();
      std::vector<index_t> stack{seed};
      comp[seed] = id;
      while (!stack.empty()) {
        index_t e = stack.back();
        stack.pop_back();
        comp_hexes[id].push_back(e);
        for (index_t nb : adj[e])
          if (comp[nb] < 0 && part.subdomain_of_hex[nb] == part.subdomain_of_hex[e]) {
            comp[nb] = id;
            stack.push_back(nb);
          }
      }
    }
    // Largest component per subdomain stays; ties keep the lowest hex id.
    std::vector<int> keep(part.n_subdomains, -1);
    for (int id = 0; id < static_cast<int>(comp_hexes.size()); ++id) {
      index_t s = part.subdomain_of_hex[comp_hexes[id][0]];
      if (keep[s] < 0 || comp_hexes[id].size() > comp_hexes[keep[s]].size()) keep[s] = id;
    }
    for (int id = 0; id < static_cast<int>(comp_hexes.size()); ++id) {
      index_t s = part.subdomain_of_hex[comp_hexes[id][0]];
      if (keep[s] == id) continue;
      std::map<index_t, int> contact;
      for (index_t e : comp_hexes[id])
        for (index_t nb : adj[e])
          if (part.subdomain_of_hex[nb] != s) ++contact[part.subdomain_of_hex[nb]];
      if (contact.empty()) continue;  // isolated island; nothing adjacent to move to
      index_t target = contact.begin()->first;
      for (const auto& [cand, cnt] : contact)
        if (cnt > contact[target]) target = cand;
      for (index_t e : comp_hexes[id]) part.subdomain_of_hex[e] = target;
      changed = true;
    }
    if (!changed) break;
  }
}

}  // namespace

Partition partition_structured(const HexMesh& mesh, index_t px, index_t py, index_t pz) {
  if (mesh.kind != MeshKind::box)
    throw std::invalid_argument("structured partition requires a box mesh");
  if (px < 1 || py < 1 || pz < 1)
    throw std::invalid_argument("structured partition needs positive block counts");
  auto [nx, ny, nz] = mesh.grid;
  if (nx % px || ny % py || nz % pz)
    throw std::invalid_argument("structured partition must divide the grid evenly");
  Partition part;
  part.n_subdomains = px * py * pz;
  part.subdomain_of_hex.resize(mesh.n_hexes());
  index_t bx = nx / px, by = ny / py, bz = nz / pz;
  for (index_t k = 0; k < nz; ++k)
    for (index_t j = 0; j < ny; ++j)
      for (index_t i = 0; i < nx; ++i)
        part.subdomain_of_hex[i + nx * (j + ny * k)] = (i / bx) + px * ((j / by) + py * (k / bz));
  fill_sizes(mesh, part);
  return part;
}

Partition partition_rcb(const HexMesh& mesh, index_t n) {
  if (n < 1) throw std::invalid_argument("partition needs at least one subdomain");
  if (n > mesh.n_hexes()) throw std::invalid_argument("more subdomains than elements");
  Partition part;
  part.n_subdomains = n;
  part.subdomain_of_hex.assign(mesh.n_hexes(), 0);
  std::vector<index_t> all(mesh.n_hexes());
  std::iota(all.begin(), all.end(), 0);
  rcb_split(mesh, all, n, 0, part.subdomain_of_hex);
  repair_connectivity(mesh, part);
  fill_sizes(mesh, part);
  return part;
}

std::vector<std::vector<index_t>> subdomain_adjacency(const HexMesh& mesh, const Partition& part) {
  auto adj = hex_adjacency(mesh);
  std::vector<std::vector<index_t>> out(part.n_subdomains);
  for (index_t e = 0; e < mesh.n_hexes(); ++e)
    for (index_t nb : adj[e]) {
      index_t a = part.subdomain_of_hex[e], b = part.subdomain_of_hex[nb];
      if (a != b) out[a].push_back(b);
    }
  for (auto& v : out) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return out;
}

}  // namespace myo
