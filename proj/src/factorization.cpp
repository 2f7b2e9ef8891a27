#include "myosolve/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace myo {

namespace {

struct PivotBreakdown {};

// Adjacency of the symmetrized pattern, diagonal excluded, neighbor lists
// sorted by (degree, id) so the Cuthill-McKee sweep is deterministic.
std::vector<std::vector<index_t>> symmetric_adjacency(const CsrMatrix& a, index_t n_head) {
  std::vector<std::vector<index_t>> adj(n_head);
  for (index_t r = 0; r < n_head; ++r) {
    for (index_t p = a.ptr[r]; p < a.ptr[r + 1]; ++p) {
      const index_t c = a.col[p];
      if (c == r || c >= n_head) continue;
      adj[r].push_back(c);
      adj[c].push_back(r);
    }
  }
  for (auto& v : adj) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return adj;
}

}  // namespace

std::vector<index_t> rcm_ordering(const CsrMatrix& a, index_t tail) {
  const index_t n = a.rows;
  const index_t nh = n - tail;
  auto adj = symmetric_adjacency(a, nh);

  std::vector<char> visited(nh, 0);
  std::vector<index_t> order;
  order.reserve(n);
  std::vector<index_t> level, next;

  auto bfs_last_level = [&](index_t root) {
    std::vector<char> seen(nh, 0);
    level = {root};
    seen[root] = 1;
    std::vector<index_t> last = level;
    while (!level.empty()) {
      last = level;
      next.clear();
      for (index_t u : level)
        for (index_t v : adj[u])
          if (!seen[v]) {
            seen[v] = 1;
            next.push_back(v);
          }
      level.swap(next);
    }
    return last;
  };

  for (index_t start = 0; start < nh; ++start) {
    if (visited[start]) continue;

    // Pseudo-peripheral root: jump twice to a farthest minimum-degree node.
    index_t root = start;
    for (int it = 0; it < 2; ++it) {
      auto last = bfs_last_level(root);
      index_t best = last.front();
      for (index_t v : last)
        if (adj[v].size() < adj[best].size() || (adj[v].size() == adj[best].size() && v < best))
          best = v;
      root = best;
    }

    // Cuthill-McKee sweep of this component.
    std::vector<index_t> queue = {root};
    visited[root] = 1;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const index_t u = queue[qi];
      order.push_back(u);
      std::vector<index_t> nb;
      for (index_t v : adj[u])
        if (!visited[v]) nb.push_back(v);
      std::sort(nb.begin(), nb.end(), [&](index_t x, index_t y) {
        if (adj[x].size() != adj[y].size()) return adj[x].size() < adj[y].size();
        return x < y;
      });
      for (index_t v : nb) {
        visited[v] = 1;
        queue.push_back(v);
      }
    }
  }

  std::reverse(order.begin(), order.end());
  for (index_t t = nh; t < n; ++t) order.push_back(t);
  return order;
}

void DirectSolver::factor(const CsrMatrix& a, const Options& opts) {
  if (a.rows != a.cols) throw std::invalid_argument("DirectSolver: matrix must be square");
  n_ = a.rows;
  perm_.resize(n_);
  if (opts.reorder) {
    perm_ = rcm_ordering(a, opts.tail);
  } else {
    std::iota(perm_.begin(), perm_.end(), index_t{0});
  }
  const CsrMatrix b = csr_permute_symmetric(a, perm_);

  used_ldlt_ = false;
  if (opts.symmetric) {
    try {
      factor_ldlt(b);
      used_ldlt_ = true;
      if (!residual_ok(a)) {
        used_ldlt_ = false;
        ldl_lp_.clear();
        ldl_li_.clear();
        ldl_lx_.clear();
        ldl_d_.clear();
      }
    } catch (const PivotBreakdown&) {
      used_ldlt_ = false;
    }
  }
  if (!used_ldlt_) factor_lu(b);
}

// Left-looking sparse LU with row partial pivoting over the permuted frame.
// Column k is solved against the current L by a reachability DFS, then the
// largest remaining entry pivots (the natural diagonal wins ties within 10x).
void DirectSolver::factor_lu(const CsrMatrix& b) {
  const index_t n = n_;
  const CsrMatrix bc = csr_transpose(b);  // row r of bc = column r of b

  lp_.assign(1, 0);
  li_.clear();
  lx_.clear();
  up_.assign(1, 0);
  ui_.clear();
  ux_.clear();
  li_.reserve(b.col.size() * 4);
  lx_.reserve(b.col.size() * 4);
  ui_.reserve(b.col.size() * 4);
  ux_.reserve(b.col.size() * 4);

  std::vector<index_t> pinv(n, -1);
  rowof_.assign(n, -1);
  std::vector<double> x(n, 0.0);
  std::vector<index_t> mark(n, -1);
  std::vector<index_t> topo;
  std::vector<index_t> stack, edgepos;

  for (index_t k = 0; k < n; ++k) {
    topo.clear();

    for (index_t p = bc.ptr[k]; p < bc.ptr[k + 1]; ++p) {
      const index_t seed = bc.col[p];
      if (mark[seed] == k) continue;
      stack.assign(1, seed);
      edgepos.assign(1, pinv[seed] >= 0 ? lp_[pinv[seed]] + 1 : 0);
      mark[seed] = k;
      while (!stack.empty()) {
        const index_t i = stack.back();
        const index_t j = pinv[i];
        bool descended = false;
        if (j >= 0) {
          index_t& pos = edgepos.back();
          while (pos < lp_[j + 1]) {
            const index_t r = li_[pos++];
            if (mark[r] != k) {
              mark[r] = k;
              stack.push_back(r);
              edgepos.push_back(pinv[r] >= 0 ? lp_[pinv[r]] + 1 : 0);
              descended = true;
              break;
            }
          }
        }
        if (!descended) {
          topo.push_back(i);
          stack.pop_back();
          edgepos.pop_back();
        }
      }
    }

    for (index_t i : topo) x[i] = 0.0;
    for (index_t p = bc.ptr[k]; p < bc.ptr[k + 1]; ++p) x[bc.col[p]] = bc.val[p];

    // Reverse post-order is topological: x[i] is final when its column fires.
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
      const index_t i = *it;
      const index_t j = pinv[i];
      if (j < 0) continue;
      const double xi = x[i];
      if (xi == 0.0) continue;
      for (index_t p = lp_[j] + 1; p < lp_[j + 1]; ++p) x[li_[p]] -= lx_[p] * xi;
    }

    index_t ip = -1;
    double big = 0.0;
    for (index_t i : topo) {
      if (pinv[i] >= 0) continue;
      const double v = std::fabs(x[i]);
      if (v > big || (v == big && ip >= 0 && i < ip)) {
        big = v;
        ip = i;
      }
    }
    if (ip < 0 || big == 0.0) throw SingularMatrixError("sparse LU: singular column", perm_[k]);
    if (pinv[k] < 0 && mark[k] == k && std::fabs(x[k]) >= 0.1 * big) ip = k;
    const double pv = x[ip];

    for (index_t i : topo) {
      if (pinv[i] >= 0) {
        ui_.push_back(pinv[i]);
        ux_.push_back(x[i]);
      }
    }
    ui_.push_back(k);
    ux_.push_back(pv);
    up_.push_back(static_cast<index_t>(ui_.size()));

    li_.push_back(ip);
    lx_.push_back(1.0);
    for (index_t i : topo) {
      if (pinv[i] < 0 && i != ip) {
        li_.push_back(i);
        lx_.push_back(x[i] / pv);
      }
    }
    lp_.push_back(static_cast<index_t>(li_.size()));

    pinv[ip] = k;
    rowof_[k] = ip;
  }

  for (index_t& r : li_) r = pinv[r];
}

// Up-looking LDL^T (elimination tree + row reach). Throws PivotBreakdown on a
// vanishing pivot; the caller then falls back to LU.
void DirectSolver::factor_ldlt(const CsrMatrix& b) {
  const index_t n = n_;
  std::vector<index_t> parent(n, -1), flag(n, -1), lnz(n, 0);

  for (index_t k = 0; k < n; ++k) {
    flag[k] = k;
    for (index_t p = b.ptr[k]; p < b.ptr[k + 1]; ++p) {
      index_t i = b.col[p];
      if (i >= k) continue;
      while (flag[i] != k) {
        if (parent[i] < 0) parent[i] = k;
        ++lnz[i];
        flag[i] = k;
        i = parent[i];
      }
    }
  }

  ldl_lp_.assign(n + 1, 0);
  for (index_t i = 0; i < n; ++i) ldl_lp_[i + 1] = ldl_lp_[i] + lnz[i];
  ldl_li_.assign(ldl_lp_[n], 0);
  ldl_lx_.assign(ldl_lp_[n], 0.0);
  ldl_d_.assign(n, 0.0);

  std::vector<index_t> fill(ldl_lp_.begin(), ldl_lp_.end() - 1);
  std::vector<double> y(n, 0.0);
  std::vector<index_t> pattern(n), chain(n);
  std::fill(flag.begin(), flag.end(), index_t{-1});

  for (index_t k = 0; k < n; ++k) {
    index_t top = n;
    flag[k] = k;
    for (index_t p = b.ptr[k]; p < b.ptr[k + 1]; ++p) {
      index_t i = b.col[p];
      if (i > k) continue;
      y[i] += b.val[p];
      index_t len = 0;
      while (flag[i] != k) {
        chain[len++] = i;
        flag[i] = k;
        i = parent[i];
      }
      while (len > 0) pattern[--top] = chain[--len];
    }
    ldl_d_[k] = y[k];
    y[k] = 0.0;
    for (index_t p = top; p < n; ++p) {
      const index_t i = pattern[p];
      const double yi = y[i];
      y[i] = 0.0;
      for (index_t q = ldl_lp_[i]; q < fill[i]; ++q) y[ldl_li_[q]] -= ldl_lx_[q] * yi;
      const double lki = yi / ldl_d_[i];
      ldl_d_[k] -= lki * yi;
      ldl_li_[fill[i]] = k;
      ldl_lx_[fill[i]] = lki;
      ++fill[i];
    }
    if (ldl_d_[k] == 0.0) throw PivotBreakdown{};
  }
}

// One fixed-seed random solve; a stable factorization has a tiny backward
// error regardless of conditioning, so a large residual flags breakdown.
bool DirectSolver::residual_ok(const CsrMatrix& a) const {
  std::mt19937 rng(0x5eed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> rhs(n_);
  for (double& v : rhs) v = dist(rng);
  std::vector<double> x(n_);
  solve(rhs, x);
  std::vector<double> r(n_);
  spmv(a, x, r);
  double rn = 0.0, xn = 0.0, bn = 0.0;
  for (index_t i = 0; i < n_; ++i) {
    rn = std::max(rn, std::fabs(r[i] - rhs[i]));
    xn = std::max(xn, std::fabs(x[i]));
    bn = std::max(bn, std::fabs(rhs[i]));
  }
  const double scale = csr_max_abs(a) * xn + bn;
  return rn <= 1e-8 * scale;
}

void DirectSolver::solve(std::span<const double> b, std::span<double> x) const {
  const index_t n = n_;
  std::vector<double> t(n);
  if (used_ldlt_) {
    for (index_t k = 0; k < n; ++k) t[k] = b[perm_[k]];
    for (index_t j = 0; j < n; ++j) {
      const double tj = t[j];
      for (index_t p = ldl_lp_[j]; p < ldl_lp_[j + 1]; ++p) t[ldl_li_[p]] -= ldl_lx_[p] * tj;
    }
    for (index_t j = 0; j < n; ++j) t[j] /= ldl_d_[j];
    for (index_t j = n - 1; j >= 0; --j) {
      double s = t[j];
      for (index_t p = ldl_lp_[j]; p < ldl_lp_[j + 1]; ++p) s -= ldl_lx_[p] * t[ldl_li_[p]];
      t[j] = s;
    }
    for (index_t k = 0; k < n; ++k) x[perm_[k]] = t[k];
    return;
  }

  for (index_t k = 0; k < n; ++k) t[k] = b[perm_[rowof_[k]]];
  for (index_t j = 0; j < n; ++j) {
    const double tj = t[j];
    if (tj == 0.0) continue;
    for (index_t p = lp_[j] + 1; p < lp_[j + 1]; ++p) t[li_[p]] -= lx_[p] * tj;
  }
  for (index_t j = n - 1; j >= 0; --j) {
    double s = t[j] / ux_[up_[j + 1] - 1];
    t[j] = s;
    if (s == 0.0) continue;
    for (index_t p = up_[j]; p < up_[j + 1] - 1; ++p) t[ui_[p]] -= ux_[p] * s;
  }
  for (index_t j = 0; j < n; ++j) x[perm_[j]] = t[j];
}

std::vector<double> DirectSolver::solve(std::span<const double> b) const {
  std::vector<double> x(b.size());
  solve(b, x);
  return x;
}

void DirectSolver::solve_transpose(std::span<const double> b, std::span<double> x) const {
  if (used_ldlt_) {
    solve(b, x);
    return;
  }
  const index_t n = n_;
  std::vector<double> t(n);
  for (index_t j = 0; j < n; ++j) t[j] = b[perm_[j]];
  for (index_t j = 0; j < n; ++j) {
    double s = t[j];
    for (index_t p = up_[j]; p < up_[j + 1] - 1; ++p) s -= ux_[p] * t[ui_[p]];
    t[j] = s / ux_[up_[j + 1] - 1];
  }
  for (index_t j = n - 1; j >= 0; --j) {
    double s = t[j];
    for (index_t p = lp_[j] + 1; p < lp_[j + 1]; ++p) s -= lx_[p] * t[li_[p]];
    t[j] = s;
  }
  for (index_t k = 0; k < n; ++k) x[perm_[rowof_[k]]] = t[k];
}

std::vector<double> DirectSolver::solve_transpose(std::span<const double> b) const {
  std::vector<double> x(b.size());
  solve_transpose(b, x);
  return x;
}

}  // namespace myo
