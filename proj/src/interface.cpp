#include "myosolve/interface.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <set>

namespace myo {

namespace {

// Nearest entity of `nodes` to point p; ties broken toward the lowest id.
index_t nearest_node(const std::vector<index_t>& nodes, const std::vector<Vec3>& coords,
                     const Vec3& p) {
  index_t best = nodes.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (index_t n : nodes) {
    const Vec3 d = coords[n] - p;
    const double dd = dot(d, d);
    if (dd < best_d) {
      best_d = dd;
      best = n;
    }
  }
  return best;
}

}  // namespace

InterfaceSets classify_entities(const std::vector<std::vector<index_t>>& sharers,
                                const std::vector<Vec3>& coords) {
  const index_t n = static_cast<index_t>(sharers.size());
  InterfaceSets sets;
  sets.gamma_index_of_node.assign(n, -1);

  for (index_t i = 0; i < n; ++i) {
    if (sharers[i].size() >= 2) {
      sets.gamma_index_of_node[i] = static_cast<index_t>(sets.gamma_nodes.size());
      sets.gamma_nodes.push_back(i);
      sets.multiplicity.push_back(static_cast<int>(sharers[i].size()));
    }
  }

  // Group interface nodes by their exact sharing set.
  std::map<std::vector<index_t>, std::vector<index_t>> groups;
  for (index_t g : sets.gamma_nodes) groups[sharers[g]].push_back(g);

  std::vector<InterfaceClass> classes;
  for (auto& [key, nodes] : groups) {
    std::sort(nodes.begin(), nodes.end());
    if (nodes.size() == 1) {
      classes.push_back({ClassKind::vertex, key, nodes});
      continue;
    }
    const ClassKind kind = (key.size() == 2) ? ClassKind::face : ClassKind::edge;

    // Geometric corner promotion: the nodes nearest the class's bounding-box
    // corners become standalone vertex classes so every face and edge is
    // pinned at its extremities. Degenerate box axes collapse corners, so a
    // straight edge promotes exactly its two endpoints.
    Vec3 lo = coords[nodes.front()], hi = lo;
    for (index_t nd : nodes) {
      for (int a = 0; a < 3; ++a) {
        lo[a] = std::min(lo[a], coords[nd][a]);
        hi[a] = std::max(hi[a], coords[nd][a]);
      }
    }
    std::set<std::array<double, 3>> corners;
    for (int cx = 0; cx < 2; ++cx)
      for (int cy = 0; cy < 2; ++cy)
        for (int cz = 0; cz < 2; ++cz)
          corners.insert({cx ? hi[0] : lo[0], cy ? hi[1] : lo[1], cz ? hi[2] : lo[2]});

    std::set<index_t> promoted;
    for (const auto& c : corners)
      promoted.insert(nearest_node(nodes, coords, Vec3{c[0], c[1], c[2]}));

    for (index_t v : promoted)
      classes.push_back({ClassKind::vertex, key, {v}});

    std::vector<index_t> rest;
    for (index_t nd : nodes)
      if (!promoted.count(nd)) rest.push_back(nd);
    if (!rest.empty()) classes.push_back({kind, key, rest});
  }

  std::sort(classes.begin(), classes.end(), [](const InterfaceClass& a, const InterfaceClass& b) {
    if (a.sharers != b.sharers) return a.sharers < b.sharers;
    return a.nodes.front() < b.nodes.front();
  });
  sets.classes = std::move(classes);
  return sets;
}

InterfaceSets classify_interface(const DofMap& dofmap) {
  return classify_entities(dofmap.node_subdomains, dofmap.node_coords);
}

}  // namespace myo
