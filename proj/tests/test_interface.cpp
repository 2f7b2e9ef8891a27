#include "myosolve/interface.hpp"

#include <set>

#include "myosolve/dofmap.hpp"
#include "doctest.h"

using namespace myo;

namespace {

struct ClassTally {
  int vertex = 0, edge = 0, face = 0;
  index_t nodes = 0;
};

ClassTally tally(const InterfaceSets& sets) {
  ClassTally t;
  for (const auto& cl : sets.classes) {
    t.nodes += static_cast<index_t>(cl.nodes.size());
    if (cl.kind == ClassKind::vertex) ++t.vertex;
    if (cl.kind == ClassKind::edge) ++t.edge;
    if (cl.kind == ClassKind::face) ++t.face;
  }
  return t;
}

}  // namespace

TEST_CASE("two subdomains share one face with promoted corners") {
  const HexMesh mesh = build_beam_mesh(4, 2, 2);
  const Partition part = partition_structured(mesh, 2, 1, 1);
  const DofMap dofs = build_dofmap(mesh, part, 1);
  const InterfaceSets sets = classify_interface(dofs);

  // the x = 5 plane: 3 x 3 nodes, all of multiplicity two
  REQUIRE(sets.n_gamma_nodes() == 9);
  for (index_t g : sets.gamma_nodes)
    CHECK(sets.multiplicity[sets.gamma_index_of_node[g]] == 2);

  const ClassTally t = tally(sets);
  CHECK(t.face == 1);
  CHECK(t.edge == 0);
  CHECK(t.vertex == 4);  // promoted plane corners
  CHECK(t.nodes == 9);

  for (const auto& cl : sets.classes) {
    CHECK(cl.sharers == std::vector<index_t>{0, 1});
    if (cl.kind == ClassKind::face) CHECK(cl.nodes.size() == 5);
  }
}

TEST_CASE("four subdomains meet in faces, an edge, and promoted vertices") {
  const HexMesh mesh = build_beam_mesh(8, 2, 2);
  const Partition part = partition_structured(mesh, 2, 2, 1);
  const DofMap dofs = build_dofmap(mesh, part, 1);
  const InterfaceSets sets = classify_interface(dofs);

  // planes x = 5 and y = 0.5 overlap in a 3-node line shared by all four
  REQUIRE(sets.n_gamma_nodes() == 9 + 27 - 3);

  const ClassTally t = tally(sets);
  CHECK(t.face == 4);
  CHECK(t.edge == 1);
  CHECK(t.nodes == sets.n_gamma_nodes());

  int four_way = 0;
  for (const auto& cl : sets.classes)
    if (cl.sharers.size() == 4) {
      ++four_way;
      CHECK(cl.nodes.size() == 1);  // endpoints promoted away
      if (cl.nodes.size() == 1) CHECK(cl.kind != ClassKind::face);
    }
  CHECK(four_way == 3);  // the edge interior plus its two promoted endpoints

  // classes partition the interface
  std::set<index_t> seen;
  for (const auto& cl : sets.classes)
    for (index_t nd : cl.nodes) CHECK(seen.insert(nd).second);
  CHECK(seen.size() == static_cast<std::size_t>(sets.n_gamma_nodes()));

  // gamma indexing is dense and consistent
  for (index_t g = 0; g < sets.n_gamma_nodes(); ++g)
    CHECK(sets.gamma_index_of_node[sets.gamma_nodes[g]] == g);
}

TEST_CASE("interior nodes carry no interface index") {
  const HexMesh mesh = build_beam_mesh(4, 2, 2);
  const Partition part = partition_structured(mesh, 2, 1, 1);
  const DofMap dofs = build_dofmap(mesh, part, 1);
  const InterfaceSets sets = classify_interface(dofs);

  index_t interior = 0;
  for (index_t nd = 0; nd < static_cast<index_t>(sets.gamma_index_of_node.size()); ++nd)
    if (sets.gamma_index_of_node[nd] < 0) ++interior;
  CHECK(interior == mesh.n_nodes() - 9);
}
