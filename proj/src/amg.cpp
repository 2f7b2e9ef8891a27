#include "myosolve/amg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace myo {

std::vector<std::vector<index_t>> amg_strength_graph(const CsrMatrix& a,
                                                     const std::vector<index_t>& node_ptr,
                                                     double eps, bool signed_rule) {
  const index_t n_nodes = static_cast<index_t>(node_ptr.size()) - 1;
  std::vector<index_t> node_of(a.rows);
  for (index_t nd = 0; nd < n_nodes; ++nd)
    for (index_t d = node_ptr[nd]; d < node_ptr[nd + 1]; ++d) node_of[d] = nd;

  std::vector<std::vector<index_t>> adj(n_nodes);
  std::vector<double> acc(n_nodes, 0.0);
  std::vector<char> strong_flag(n_nodes, 0);
  std::vector<index_t> touched;
  std::vector<double> diag_fro(n_nodes, 0.0);

  if (!signed_rule) {
    // block Frobenius norms of the diagonal, then per row-node the off blocks
    for (index_t nd = 0; nd < n_nodes; ++nd) {
      double s = 0.0;
      for (index_t d = node_ptr[nd]; d < node_ptr[nd + 1]; ++d)
        for (index_t p = a.ptr[d]; p < a.ptr[d + 1]; ++p)
          if (node_of[a.col[p]] == nd) s += a.val[p] * a.val[p];
      diag_fro[nd] = std::sqrt(s);
    }
    for (index_t nd = 0; nd < n_nodes; ++nd) {
      touched.clear();
      for (index_t d = node_ptr[nd]; d < node_ptr[nd + 1]; ++d)
        for (index_t p = a.ptr[d]; p < a.ptr[d + 1]; ++p) {
          const index_t mc = node_of[a.col[p]];
          if (mc == nd) continue;
          if (acc[mc] == 0.0) touched.push_back(mc);
          acc[mc] += a.val[p] * a.val[p];
        }
      for (index_t mc : touched) {
        const double fro = std::sqrt(acc[mc]);
        acc[mc] = 0.0;
        if (fro >= eps * std::sqrt(diag_fro[nd] * diag_fro[mc])) adj[nd].push_back(mc);
      }
    }
  } else {
    // printed scalar rule: -a_pq >= eps sqrt(a_pp a_qq); a node pair couples
    // strongly when any scalar pair between the blocks does
    std::vector<double> d(a.rows, 0.0);
    for (index_t r = 0; r < a.rows; ++r) d[r] = std::max(a.at(r, r), 0.0);
    for (index_t nd = 0; nd < n_nodes; ++nd) {
      std::fill(strong_flag.begin(), strong_flag.end(), 0);
      for (index_t r = node_ptr[nd]; r < node_ptr[nd + 1]; ++r)
        for (index_t p = a.ptr[r]; p < a.ptr[r + 1]; ++p) {
          const index_t mc = node_of[a.col[p]];
          if (mc == nd || strong_flag[mc]) continue;
          if (-a.val[p] >= eps * std::sqrt(d[r] * d[a.col[p]])) strong_flag[mc] = 1;
        }
      for (index_t mc = 0; mc < n_nodes; ++mc)
        if (strong_flag[mc]) adj[nd].push_back(mc);
    }
  }

  // symmetrize
  std::vector<std::vector<index_t>> sym(n_nodes);
  for (index_t nd = 0; nd < n_nodes; ++nd)
    for (index_t mc : adj[nd]) {
      sym[nd].push_back(mc);
      sym[mc].push_back(nd);
    }
  for (auto& v : sym) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return sym;
}

std::pair<std::vector<index_t>, index_t> amg_aggregate(
    const std::vector<std::vector<index_t>>& strong) {
  const index_t n = static_cast<index_t>(strong.size());
  std::vector<index_t> agg(n, -1);
  index_t count = 0;

  // pass 1: aggregates from nodes whose strong neighborhood is untouched
  for (index_t i = 0; i < n; ++i) {
    if (agg[i] >= 0) continue;
    bool free = true;
    for (index_t j : strong[i])
      if (agg[j] >= 0) {
        free = false;
        break;
      }
    if (!free) continue;
    agg[i] = count;
    for (index_t j : strong[i]) agg[j] = count;
    ++count;
  }

  // pass 2: join the aggregate most connected to, decided on the pass-1 state
  const std::vector<index_t> snapshot = agg;
  for (index_t i = 0; i < n; ++i) {
    if (agg[i] >= 0) continue;
    index_t best = -1, best_links = 0;
    for (index_t j : strong[i]) {
      if (snapshot[j] < 0) continue;
      index_t links = 0;
      for (index_t k : strong[i])
        if (snapshot[k] == snapshot[j]) ++links;
      if (links > best_links || (links == best_links && best >= 0 && snapshot[j] < best)) {
        best_links = links;
        best = snapshot[j];
      }
    }
    if (best >= 0) agg[i] = best;
  }

  // pass 3: leftovers aggregate with their remaining strong neighbors
  for (index_t i = 0; i < n; ++i) {
    if (agg[i] >= 0) continue;
    agg[i] = count;
    for (index_t j : strong[i])
      if (agg[j] < 0) agg[j] = count;
    ++count;
  }
  return {agg, count};
}

AmgHierarchy::AmgHierarchy(const CsrMatrix& a, int block_size,
                           const std::vector<std::vector<double>>& near_nullspace,
                           const AmgOptions& opts)
    : opts_(opts) {
  if (a.rows % block_size != 0) throw std::invalid_argument("AmgHierarchy: block size mismatch");
  Level l0;
  l0.a = a;
  l0.b = near_nullspace;
  l0.node_ptr.resize(a.rows / block_size + 1);
  for (std::size_t i = 0; i < l0.node_ptr.size(); ++i)
    l0.node_ptr[i] = static_cast<index_t>(i) * block_size;
  levels_.push_back(std::move(l0));

  while (static_cast<int>(levels_.size()) < opts_.max_levels &&
         levels_.back().a.rows > opts_.coarse_cap) {
    Level& fine = levels_.back();
    const index_t n = fine.a.rows;
    const index_t nb = static_cast<index_t>(fine.b.size());

    const auto strong = amg_strength_graph(fine.a, fine.node_ptr, opts_.strength_eps,
                                           opts_.signed_strength);
    auto [agg_of, n_agg] = amg_aggregate(strong);
    fine.n_aggregates = n_agg;

    std::vector<std::vector<index_t>> agg_nodes(n_agg);
    for (std::size_t nd = 0; nd < agg_of.size(); ++nd) agg_nodes[agg_of[nd]].push_back(static_cast<index_t>(nd));

    // per-aggregate thin QR of the nullspace block; kept columns become the
    // prolongator, Q^T B the coarse nullspace rows
    std::vector<index_t> coarse_ptr(n_agg + 1, 0);
    std::vector<ThinQr> qrs(n_agg);
    std::vector<std::vector<index_t>> agg_dofs(n_agg);
    for (index_t ag = 0; ag < n_agg; ++ag) {
      for (index_t nd : agg_nodes[ag])
        for (index_t d = fine.node_ptr[nd]; d < fine.node_ptr[nd + 1]; ++d)
          agg_dofs[ag].push_back(d);
      const index_t m = static_cast<index_t>(agg_dofs[ag].size());
      DenseMatrix ba(m, nb);
      for (index_t r = 0; r < m; ++r)
        for (index_t c = 0; c < nb; ++c) ba(r, c) = fine.b[c][agg_dofs[ag][r]];
      qrs[ag] = thin_qr(ba, 1e-10);
      coarse_ptr[ag + 1] = coarse_ptr[ag] + static_cast<index_t>(qrs[ag].kept.size());
    }
    const index_t nc = coarse_ptr[n_agg];
    if (nc == 0 || nc >= static_cast<index_t>(opts_.stagnation * n)) break;

    std::vector<Triplet> ptrips;
    std::vector<std::vector<double>> bc(nb, std::vector<double>(nc, 0.0));
    for (index_t ag = 0; ag < n_agg; ++ag) {
      const index_t m = static_cast<index_t>(agg_dofs[ag].size());
      const index_t r_a = static_cast<index_t>(qrs[ag].kept.size());
      for (index_t r = 0; r < m; ++r)
        for (index_t k = 0; k < r_a; ++k)
          ptrips.push_back({agg_dofs[ag][r], coarse_ptr[ag] + k, qrs[ag].q(r, k)});
      // coarse nullspace rows: Q^T B_a (exact since range(B_a) = range(Q))
      for (index_t k = 0; k < r_a; ++k)
        for (index_t c = 0; c < nb; ++c) {
          double s = 0.0;
          for (index_t r = 0; r < m; ++r) s += qrs[ag].q(r, k) * fine.b[c][agg_dofs[ag][r]];
          bc[c][coarse_ptr[ag] + k] = s;
        }
    }
    CsrMatrix p = csr_from_triplets(n, nc, std::move(ptrips));

    if (opts_.smooth_prolongator) {
      // damped Jacobi smoothing with omega = (4/3) / rho(D^-1 A)
      std::vector<double> dinv(n);
      for (index_t r = 0; r < n; ++r) {
        const double d = fine.a.at(r, r);
        dinv[r] = d != 0.0 ? 1.0 / d : 0.0;
      }
      std::mt19937 rng(0xa99);
      std::uniform_real_distribution<double> dist(-1.0, 1.0);
      std::vector<double> v(n), av(n);
      for (double& x : v) x = dist(rng);
      double lam = 1.0;
      for (int it = 0; it < 10; ++it) {
        spmv(fine.a, v, av);
        for (index_t r = 0; r < n; ++r) av[r] *= dinv[r];
        lam = std::sqrt(std::inner_product(av.begin(), av.end(), av.begin(), 0.0));
        if (lam == 0.0) break;
        for (index_t r = 0; r < n; ++r) v[r] = av[r] / lam;
      }
      const double omega = (4.0 / 3.0) / std::max(lam, 1e-300);
      CsrMatrix ap = csr_matmul(fine.a, p);
      for (index_t r = 0; r < ap.rows; ++r)
        for (index_t q = ap.ptr[r]; q < ap.ptr[r + 1]; ++q) ap.val[q] *= omega * dinv[r];
      p = csr_add(p, ap, 1.0, -1.0);
    }

    Level next;
    next.a = csr_matmul(csr_matmul(csr_transpose(p), fine.a), p);
    next.b = std::move(bc);
    next.node_ptr.assign(coarse_ptr.begin(), coarse_ptr.end());
    fine.p = std::move(p);
    levels_.push_back(std::move(next));
  }

  // smoother data on all but the coarsest level
  for (std::size_t l = 0; l + 1 < levels_.size(); ++l) {
    Level& lv = levels_[l];
    if (opts_.smoother == "bjacobi") {
      const index_t n_nodes = static_cast<index_t>(lv.node_ptr.size()) - 1;
      lv.block_inv.resize(n_nodes);
      for (index_t nd = 0; nd < n_nodes; ++nd) {
        const index_t b0 = lv.node_ptr[nd], b1 = lv.node_ptr[nd + 1];
        DenseMatrix blk(b1 - b0, b1 - b0);
        for (index_t r = b0; r < b1; ++r)
          for (index_t p = lv.a.ptr[r]; p < lv.a.ptr[r + 1]; ++p)
            if (lv.a.col[p] >= b0 && lv.a.col[p] < b1) blk(r - b0, lv.a.col[p] - b0) = lv.a.val[p];
        lv.block_inv[nd] = dense_inverse(blk);
      }
    } else if (opts_.smoother != "sgs") {
      throw std::invalid_argument("AmgHierarchy: unknown smoother " + opts_.smoother);
    }
  }
  coarse_.factor(levels_.back().a, {.symmetric = false, .tail = 0, .reorder = true});
}

void AmgHierarchy::smooth(const Level& lv, std::span<const double> r, std::span<double> z) const {
  const index_t n = lv.a.rows;
  if (!lv.block_inv.empty()) {
    std::vector<double> t(n);
    spmv(lv.a, z, t);
    for (index_t i = 0; i < n; ++i) t[i] = r[i] - t[i];
    const index_t n_nodes = static_cast<index_t>(lv.node_ptr.size()) - 1;
    for (index_t nd = 0; nd < n_nodes; ++nd) {
      const index_t b0 = lv.node_ptr[nd], b1 = lv.node_ptr[nd + 1];
      const DenseMatrix& inv = lv.block_inv[nd];
      for (index_t i = b0; i < b1; ++i) {
        double s = 0.0;
        for (index_t j = b0; j < b1; ++j) s += inv(i - b0, j - b0) * t[j];
        z[i] += opts_.jacobi_omega * s;
      }
    }
    return;
  }
  // symmetric Gauss-Seidel sweep, forward then backward
  for (index_t i = 0; i < n; ++i) {
    double s = r[i], dii = 1.0;
    for (index_t p = lv.a.ptr[i]; p < lv.a.ptr[i + 1]; ++p) {
      if (lv.a.col[p] == i)
        dii = lv.a.val[p];
      else
        s -= lv.a.val[p] * z[lv.a.col[p]];
    }
    z[i] = s / dii;
  }
  for (index_t i = n - 1; i >= 0; --i) {
    double s = r[i], dii = 1.0;
    for (index_t p = lv.a.ptr[i]; p < lv.a.ptr[i + 1]; ++p) {
      if (lv.a.col[p] == i)
        dii = lv.a.val[p];
      else
        s -= lv.a.val[p] * z[lv.a.col[p]];
    }
    z[i] = s / dii;
  }
}

void AmgHierarchy::cycle(std::size_t l, std::span<const double> r, std::span<double> z) const {
  if (l + 1 == levels_.size()) {
    coarse_.solve(r, z);
    return;
  }
  const Level& lv = levels_[l];
  smooth(lv, r, z);

  std::vector<double> t(lv.a.rows);
  spmv(lv.a, z, t);
  for (index_t i = 0; i < lv.a.rows; ++i) t[i] = r[i] - t[i];
  std::vector<double> rc(lv.p.cols);
  spmv_transpose(lv.p, t, rc);
  std::vector<double> zc(lv.p.cols, 0.0);
  cycle(l + 1, rc, zc);
  std::vector<double> up(lv.a.rows);
  spmv(lv.p, zc, up);
  for (index_t i = 0; i < lv.a.rows; ++i) z[i] += up[i];

  smooth(lv, r, z);
}

void AmgHierarchy::vcycle(std::span<const double> r, std::span<double> z) const {
  std::fill(z.begin(), z.end(), 0.0);
  cycle(0, r, z);
}

}  // namespace myo
