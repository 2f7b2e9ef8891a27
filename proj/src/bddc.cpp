#include "myosolve/bddc.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace myo {

PrimalConfig PrimalConfig::from_name(const std::string& name) {
  if (name == "v") return {true, false, false, false};
  if (name == "ve") return {true, true, false, false};
  if (name == "ef") return {false, true, true, false};
  if (name == "vef") return {true, true, true, false};
  if (name == "full") return {false, false, false, true};
  throw std::invalid_argument("unknown primal space: " + name);
}

std::string PrimalConfig::name() const {
  if (all_interface) return "full";
  std::string s;
  if (vertices) s += 'v';
  if (edge_averages) s += 'e';
  if (face_averages) s += 'f';
  return s.empty() ? "none" : s;
}

Bddc::Bddc(const UnassembledMatrix& k, std::vector<Vec3> node_coords, const BddcOptions& opts) {
  n_ = k.n_global;
  coords_ = std::move(node_coords);
  const index_t n_nodes = n_ / 3;
  if (static_cast<index_t>(coords_.size()) != n_nodes)
    throw std::invalid_argument("Bddc: one coordinate per 3-dof node required");

  // Sharing sets straight from the block maps; local dofs come in complete
  // 3-component node groups, so every third entry names a node.
  std::vector<std::vector<index_t>> node_sharers(n_nodes);
  for (std::size_t b = 0; b < k.blocks.size(); ++b)
    for (std::size_t t = 0; t < k.blocks[b].local_to_global.size(); t += 3)
      node_sharers[k.blocks[b].local_to_global[t] / 3].push_back(static_cast<index_t>(b));

  sets_ = classify_entities(node_sharers, coords_);

  gamma_dofs_.reserve(3 * sets_.gamma_nodes.size());
  gamma_pos_of_dof_.assign(n_, -1);
  for (index_t gn : sets_.gamma_nodes)
    for (int c = 0; c < 3; ++c) {
      gamma_pos_of_dof_[3 * gn + c] = static_cast<index_t>(gamma_dofs_.size());
      gamma_dofs_.push_back(3 * gn + c);
    }

  build_constraints(opts.primal, node_sharers);

  symmetric_ = probe_symmetry(
      [&k](std::span<const double> x, std::span<double> y) { k.spmv(x, y); }, n_);

  blocks_.resize(k.blocks.size());
  for (std::size_t b = 0; b < k.blocks.size(); ++b)
    build_block(blocks_[b], k.blocks[b], static_cast<index_t>(b), node_sharers);

  build_coarse(opts);
}

void Bddc::build_constraints(const PrimalConfig& cfg,
                             const std::vector<std::vector<index_t>>& node_sharers) {
  if (cfg.all_interface) {
    for (index_t gn : sets_.gamma_nodes)
      constraints_.push_back({{gn}, {1.0}, node_sharers[gn]});
  } else {
    for (const InterfaceClass& cl : sets_.classes) {
      const bool pick = (cl.kind == ClassKind::vertex && cfg.vertices) ||
                        (cl.kind == ClassKind::edge && cfg.edge_averages) ||
                        (cl.kind == ClassKind::face && cfg.face_averages);
      if (!pick) continue;
      const double w = 1.0 / static_cast<double>(cl.nodes.size());
      constraints_.push_back({cl.nodes, std::vector<double>(cl.nodes.size(), w), cl.sharers});
    }
  }
  n_primal_ = 3 * static_cast<index_t>(constraints_.size());
}

void Bddc::build_block(Block& blk, const SubdomainBlock& sb, index_t blk_id,
                       const std::vector<std::vector<index_t>>& node_sharers) {
  blk.n_local = sb.a.rows;
  const index_t n_lnodes = blk.n_local / 3;

  std::vector<index_t> lnode_of_gnode(coords_.size(), -1);
  for (index_t ln = 0; ln < n_lnodes; ++ln) {
    const index_t gnode = sb.local_to_global[3 * ln] / 3;
    lnode_of_gnode[gnode] = ln;
    const int mult = static_cast<int>(node_sharers[gnode].size());
    for (int c = 0; c < 3; ++c) {
      const index_t ld = 3 * ln + c;
      const index_t gd = sb.local_to_global[ld];
      if (mult >= 2) {
        blk.gamma.push_back(ld);
        blk.gamma_pos.push_back(gamma_pos_of_dof_[gd]);
        blk.dscale.push_back(1.0 / mult);
      } else {
        blk.interior.push_back(ld);
        blk.interior_global.push_back(gd);
      }
    }
  }

  blk.a_ii = csr_extract(sb.a, blk.interior, blk.interior);
  blk.a_ig = csr_extract(sb.a, blk.interior, blk.gamma);
  blk.a_gi = csr_extract(sb.a, blk.gamma, blk.interior);
  blk.a_gg = csr_extract(sb.a, blk.gamma, blk.gamma);
  if (!blk.interior.empty())
    blk.interior_solver.factor(blk.a_ii, {.symmetric = symmetric_, .tail = 0, .reorder = true});

  // Constraint rows of this block, in global constraint order.
  std::vector<index_t> owned;
  for (std::size_t ci = 0; ci < constraints_.size(); ++ci) {
    const auto& sh = constraints_[ci].sharers;
    if (std::binary_search(sh.begin(), sh.end(), blk_id)) owned.push_back(static_cast<index_t>(ci));
  }
  const index_t n_c = 3 * static_cast<index_t>(owned.size());
  blk.primal_ids.resize(n_c);

  if (blk.gamma.empty()) return;  // no interface: the block never enters the correction

  // Constraint rows live on the operator's magnitude so the saddle pivots
  // stay balanced; that only reparametrizes the multipliers, and phi/spp are
  // rescaled back below, so the correction itself is unchanged.
  const double cscale = csr_max_abs(sb.a);
  std::vector<Triplet> trips;
  trips.reserve(sb.a.col.size() + 6 * n_c);
  for (index_t r = 0; r < sb.a.rows; ++r)
    for (index_t p = sb.a.ptr[r]; p < sb.a.ptr[r + 1]; ++p)
      trips.push_back({r, sb.a.col[p], sb.a.val[p]});
  for (std::size_t oi = 0; oi < owned.size(); ++oi) {
    const PrimalConstraint& pc = constraints_[owned[oi]];
    for (int c = 0; c < 3; ++c) {
      const index_t row = blk.n_local + 3 * static_cast<index_t>(oi) + c;
      blk.primal_ids[3 * oi + c] = 3 * owned[oi] + c;
      for (std::size_t t = 0; t < pc.nodes.size(); ++t) {
        const index_t ld = 3 * lnode_of_gnode[pc.nodes[t]] + c;
        trips.push_back({row, ld, cscale * pc.weights[t]});
        trips.push_back({ld, row, cscale * pc.weights[t]});
      }
    }
  }
  const index_t n_s = blk.n_local + n_c;
  blk.saddle.factor(csr_from_triplets(n_s, n_s, std::move(trips)),
                    {.symmetric = symmetric_, .tail = n_c, .reorder = true});

  blk.phi = DenseMatrix(blk.n_local, n_c);
  blk.spp = DenseMatrix(n_c, n_c);
  std::vector<double> rhs(n_s), sol(n_s);
  for (index_t p = 0; p < n_c; ++p) {
    std::fill(rhs.begin(), rhs.end(), 0.0);
    rhs[blk.n_local + p] = 1.0;
    blk.saddle.solve(rhs, sol);
    for (index_t l = 0; l < blk.n_local; ++l) blk.phi(l, p) = cscale * sol[l];
    for (index_t q = 0; q < n_c; ++q) blk.spp(q, p) = -cscale * cscale * sol[blk.n_local + q];
  }
}

void Bddc::build_coarse(const BddcOptions& opts) {
  if (n_primal_ == 0) {
    coarse_is_direct_ = true;
    levels_built_ = 2;
    n_agglomerates_ = 1;
    return;
  }

  auto assemble_direct = [&] {
    std::vector<Triplet> trips;
    for (const Block& blk : blocks_) {
      const index_t nc = static_cast<index_t>(blk.primal_ids.size());
      for (index_t p = 0; p < nc; ++p)
        for (index_t q = 0; q < nc; ++q)
          trips.push_back({blk.primal_ids[q], blk.primal_ids[p], blk.spp(q, p)});
    }
    coarse_direct_.factor(csr_from_triplets(n_primal_, n_primal_, std::move(trips)),
                          {.symmetric = symmetric_, .tail = 0, .reorder = true});
    coarse_is_direct_ = true;
    levels_built_ = 2;
  };

  if (opts.levels <= 2) {
    n_agglomerates_ = 1;
    assemble_direct();
    return;
  }

  // Greedy BFS agglomeration over face adjacency (classes shared by exactly
  // two blocks), capped at the coarsening factor per agglomerate.
  const index_t nb = static_cast<index_t>(blocks_.size());
  std::vector<std::set<index_t>> adj(nb);
  for (const InterfaceClass& cl : sets_.classes)
    if (cl.sharers.size() == 2) {
      adj[cl.sharers[0]].insert(cl.sharers[1]);
      adj[cl.sharers[1]].insert(cl.sharers[0]);
    }
  std::vector<index_t> agg_of(nb, -1);
  index_t n_agg = 0;
  for (index_t seed = 0; seed < nb; ++seed) {
    if (agg_of[seed] >= 0) continue;
    std::vector<index_t> queue = {seed};
    agg_of[seed] = n_agg;
    index_t taken = 1;
    for (std::size_t qi = 0; qi < queue.size() && taken < opts.coarsening; ++qi)
      for (index_t nbid : adj[queue[qi]]) {
        if (agg_of[nbid] >= 0 || taken >= opts.coarsening) continue;
        agg_of[nbid] = n_agg;
        queue.push_back(nbid);
        ++taken;
      }
    ++n_agg;
  }
  n_agglomerates_ = n_agg;
  if (n_agg == 1) {
    assemble_direct();
    return;
  }

  coarse_matrix_ = std::make_unique<UnassembledMatrix>();
  coarse_matrix_->n_global = n_primal_;
  coarse_matrix_->block_size = 3;
  coarse_matrix_->blocks.resize(n_agg);
  for (index_t a = 0; a < n_agg; ++a) {
    std::set<index_t> ids;
    for (index_t b = 0; b < nb; ++b)
      if (agg_of[b] == a) ids.insert(blocks_[b].primal_ids.begin(), blocks_[b].primal_ids.end());
    SubdomainBlock& cb = coarse_matrix_->blocks[a];
    cb.local_to_global.assign(ids.begin(), ids.end());
    std::vector<index_t> pos(n_primal_, -1);
    for (std::size_t t = 0; t < cb.local_to_global.size(); ++t)
      pos[cb.local_to_global[t]] = static_cast<index_t>(t);
    std::vector<Triplet> trips;
    for (index_t b = 0; b < nb; ++b) {
      if (agg_of[b] != a) continue;
      const Block& blk = blocks_[b];
      const index_t nc = static_cast<index_t>(blk.primal_ids.size());
      for (index_t p = 0; p < nc; ++p)
        for (index_t q = 0; q < nc; ++q)
          trips.push_back({pos[blk.primal_ids[q]], pos[blk.primal_ids[p]], blk.spp(q, p)});
    }
    const index_t nl = static_cast<index_t>(cb.local_to_global.size());
    cb.a = csr_from_triplets(nl, nl, std::move(trips));
  }

  std::vector<Vec3> centroids(constraints_.size());
  for (std::size_t ci = 0; ci < constraints_.size(); ++ci) {
    Vec3 c{0, 0, 0};
    for (index_t nd : constraints_[ci].nodes) c = c + coords_[nd];
    centroids[ci] = (1.0 / static_cast<double>(constraints_[ci].nodes.size())) * c;
  }
  BddcOptions sub = opts;
  sub.levels = opts.levels - 1;
  coarse_bddc_ = std::make_unique<Bddc>(*coarse_matrix_, std::move(centroids), sub);
  coarse_is_direct_ = false;
  levels_built_ = 1 + coarse_bddc_->levels();
}

void Bddc::coarse_solve(std::span<const double> r, std::span<double> z) const {
  if (n_primal_ == 0) return;
  if (coarse_is_direct_) {
    coarse_direct_.solve(r, z);
  } else {
    coarse_bddc_->precondition_full(r, z);
  }
}

void Bddc::apply_interface(std::span<const double> r_gamma, std::span<double> z_gamma) const {
  std::fill(z_gamma.begin(), z_gamma.end(), 0.0);
  std::vector<double> rpi(n_primal_, 0.0);
  std::vector<std::vector<double>> us(blocks_.size());

  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const Block& blk = blocks_[b];
    if (blk.gamma.empty()) continue;
    const index_t n_c = static_cast<index_t>(blk.primal_ids.size());
    const index_t n_s = blk.n_local + n_c;
    std::vector<double> rhs(n_s, 0.0), sol(n_s);
    for (std::size_t k = 0; k < blk.gamma.size(); ++k)
      rhs[blk.gamma[k]] = blk.dscale[k] * r_gamma[blk.gamma_pos[k]];
    blk.saddle.solve(rhs, sol);
    us[b].assign(sol.begin(), sol.begin() + blk.n_local);
    for (index_t p = 0; p < n_c; ++p) {
      double s = 0.0;
      for (std::size_t k = 0; k < blk.gamma.size(); ++k)
        s += blk.phi(blk.gamma[k], p) * rhs[blk.gamma[k]];
      rpi[blk.primal_ids[p]] += s;
    }
  }

  std::vector<double> zpi(n_primal_, 0.0);
  coarse_solve(rpi, zpi);

  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const Block& blk = blocks_[b];
    if (blk.gamma.empty()) continue;
    const index_t n_c = static_cast<index_t>(blk.primal_ids.size());
    for (index_t p = 0; p < n_c; ++p) {
      const double c = zpi[blk.primal_ids[p]];
      if (c == 0.0) continue;
      for (index_t l = 0; l < blk.n_local; ++l) us[b][l] += blk.phi(l, p) * c;
    }
    for (std::size_t k = 0; k < blk.gamma.size(); ++k)
      z_gamma[blk.gamma_pos[k]] += blk.dscale[k] * us[b][blk.gamma[k]];
  }
}

void Bddc::precondition_full(std::span<const double> r, std::span<double> z) const {
  precondition_full_with(r, z, [this](std::span<const double> rg, std::span<double> zg) {
    apply_interface(rg, zg);
  });
}

void Bddc::precondition_full_with(std::span<const double> r, std::span<double> z,
                                  const LinearOp& interface_solver) const {
  std::fill(z.begin(), z.end(), 0.0);
  if (gamma_dofs_.empty()) {
    // single-block operator: the interior solve is the whole (exact) solve
    for (const Block& blk : blocks_) {
      if (blk.interior.empty()) continue;
      std::vector<double> rl(blk.interior.size());
      for (std::size_t k = 0; k < blk.interior.size(); ++k) rl[k] = r[blk.interior_global[k]];
      const std::vector<double> u = blk.interior_solver.solve(rl);
      for (std::size_t k = 0; k < blk.interior.size(); ++k) z[blk.interior_global[k]] = u[k];
    }
    return;
  }

  const index_t ng = n_gamma_dofs();
  std::vector<double> rg(ng);
  for (index_t k = 0; k < ng; ++k) rg[k] = r[gamma_dofs_[k]];

  std::vector<std::vector<double>> u1(blocks_.size());
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const Block& blk = blocks_[b];
    if (blk.interior.empty()) continue;
    std::vector<double> rl(blk.interior.size());
    for (std::size_t k = 0; k < blk.interior.size(); ++k) rl[k] = r[blk.interior_global[k]];
    u1[b] = blk.interior_solver.solve(rl);
    std::vector<double> t(blk.gamma.size());
    spmv(blk.a_gi, u1[b], t);
    for (std::size_t k = 0; k < blk.gamma.size(); ++k) rg[blk.gamma_pos[k]] -= t[k];
  }

  std::vector<double> zg(ng, 0.0);
  interface_solver(rg, zg);
  for (index_t k = 0; k < ng; ++k) z[gamma_dofs_[k]] = zg[k];

  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const Block& blk = blocks_[b];
    if (blk.interior.empty()) continue;
    std::vector<double> xg(blk.gamma.size());
    for (std::size_t k = 0; k < blk.gamma.size(); ++k) xg[k] = zg[blk.gamma_pos[k]];
    std::vector<double> t(blk.interior.size());
    spmv(blk.a_ig, xg, t);
    const std::vector<double> u2 = blk.interior_solver.solve(t);
    for (std::size_t k = 0; k < blk.interior.size(); ++k)
      z[blk.interior_global[k]] = u1[b][k] - u2[k];
  }
}

void Bddc::schur_matvec(std::span<const double> x_gamma, std::span<double> y_gamma) const {
  std::fill(y_gamma.begin(), y_gamma.end(), 0.0);
  for (const Block& blk : blocks_) {
    if (blk.gamma.empty()) continue;
    std::vector<double> xg(blk.gamma.size());
    for (std::size_t k = 0; k < blk.gamma.size(); ++k) xg[k] = x_gamma[blk.gamma_pos[k]];
    std::vector<double> y(blk.gamma.size());
    spmv(blk.a_gg, xg, y);
    if (!blk.interior.empty()) {
      std::vector<double> t(blk.interior.size());
      spmv(blk.a_ig, xg, t);
      const std::vector<double> u = blk.interior_solver.solve(t);
      std::vector<double> s(blk.gamma.size());
      spmv(blk.a_gi, u, s);
      for (std::size_t k = 0; k < blk.gamma.size(); ++k) y[k] -= s[k];
    }
    for (std::size_t k = 0; k < blk.gamma.size(); ++k) y_gamma[blk.gamma_pos[k]] += y[k];
  }
}

std::vector<double> Bddc::reduce_rhs(std::span<const double> r) const {
  const index_t ng = n_gamma_dofs();
  std::vector<double> g(ng);
  for (index_t k = 0; k < ng; ++k) g[k] = r[gamma_dofs_[k]];
  for (const Block& blk : blocks_) {
    if (blk.interior.empty() || blk.gamma.empty()) continue;
    std::vector<double> rl(blk.interior.size());
    for (std::size_t k = 0; k < blk.interior.size(); ++k) rl[k] = r[blk.interior_global[k]];
    const std::vector<double> u = blk.interior_solver.solve(rl);
    std::vector<double> t(blk.gamma.size());
    spmv(blk.a_gi, u, t);
    for (std::size_t k = 0; k < blk.gamma.size(); ++k) g[blk.gamma_pos[k]] -= t[k];
  }
  return g;
}

std::vector<double> Bddc::expand_solution(std::span<const double> r,
                                          std::span<const double> x_gamma) const {
  std::vector<double> x(n_, 0.0);
  for (index_t k = 0; k < n_gamma_dofs(); ++k) x[gamma_dofs_[k]] = x_gamma[k];
  for (const Block& blk : blocks_) {
    if (blk.interior.empty()) continue;
    std::vector<double> rl(blk.interior.size());
    for (std::size_t k = 0; k < blk.interior.size(); ++k) rl[k] = r[blk.interior_global[k]];
    if (!blk.gamma.empty()) {
      std::vector<double> xg(blk.gamma.size());
      for (std::size_t k = 0; k < blk.gamma.size(); ++k) xg[k] = x_gamma[blk.gamma_pos[k]];
      std::vector<double> t(blk.interior.size());
      spmv(blk.a_ig, xg, t);
      for (std::size_t k = 0; k < blk.interior.size(); ++k) rl[k] -= t[k];
    }
    const std::vector<double> u = blk.interior_solver.solve(rl);
    for (std::size_t k = 0; k < blk.interior.size(); ++k) x[blk.interior_global[k]] = u[k];
  }
  return x;
}

}  // namespace myo
