#include "myosolve/csr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace myo {

double CsrMatrix::at(index_t r, index_t c) const {
  const auto first = col.begin() + ptr[r];
  const auto last = col.begin() + ptr[r + 1];
  const auto it = std::lower_bound(first, last, c);
  if (it == last || *it != c) return 0.0;
  return val[static_cast<std::size_t>(it - col.begin())];
}

CsrMatrix csr_from_triplets(index_t rows, index_t cols, std::vector<Triplet> triplets) {
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    if (a.row != b.row) return a.row < b.row;
    return a.col < b.col;
  });

  CsrMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.ptr.assign(rows + 1, 0);
  m.col.reserve(triplets.size());
  m.val.reserve(triplets.size());

  for (std::size_t i = 0; i < triplets.size();) {
    const index_t r = triplets[i].row;
    const index_t c = triplets[i].col;
    double v = 0.0;
    while (i < triplets.size() && triplets[i].row == r && triplets[i].col == c)
      v += triplets[i++].val;
    m.col.push_back(c);
    m.val.push_back(v);
    ++m.ptr[r + 1];
  }
  for (index_t r = 0; r < rows; ++r) m.ptr[r + 1] += m.ptr[r];
  return m;
}

CsrMatrix csr_identity(index_t n) {
  CsrMatrix m;
  m.rows = m.cols = n;
  m.ptr.resize(n + 1);
  m.col.resize(n);
  m.val.assign(n, 1.0);
  for (index_t i = 0; i <= n; ++i) m.ptr[i] = i;
  for (index_t i = 0; i < n; ++i) m.col[i] = i;
  return m;
}

CsrMatrix csr_transpose(const CsrMatrix& a) {
  CsrMatrix t;
  t.rows = a.cols;
  t.cols = a.rows;
  t.ptr.assign(a.cols + 1, 0);
  t.col.resize(a.col.size());
  t.val.resize(a.val.size());

  for (index_t p = 0; p < a.nnz(); ++p) ++t.ptr[a.col[p] + 1];
  for (index_t c = 0; c < a.cols; ++c) t.ptr[c + 1] += t.ptr[c];

  std::vector<index_t> next(t.ptr.begin(), t.ptr.end() - 1);
  for (index_t r = 0; r < a.rows; ++r) {
    for (index_t p = a.ptr[r]; p < a.ptr[r + 1]; ++p) {
      const index_t q = next[a.col[p]]++;
      t.col[q] = r;
      t.val[q] = a.val[p];
    }
  }
  return t;  // rows of a are scanned in order, so columns stay sorted
}

CsrMatrix csr_matmul(const CsrMatrix& a, const CsrMatrix& b) {
  if (a.cols != b.rows) throw std::invalid_argument("csr_matmul: shape mismatch");
  CsrMatrix m;
  m.rows = a.rows;
  m.cols = b.cols;
  m.ptr.assign(a.rows + 1, 0);

  std::vector<double> acc(b.cols, 0.0);
  std::vector<index_t> mark(b.cols, -1);
  std::vector<index_t> live;
  for (index_t r = 0; r < a.rows; ++r) {
    live.clear();
    for (index_t p = a.ptr[r]; p < a.ptr[r + 1]; ++p) {
      const index_t k = a.col[p];
      const double av = a.val[p];
      for (index_t q = b.ptr[k]; q < b.ptr[k + 1]; ++q) {
        const index_t c = b.col[q];
        if (mark[c] != r) {
          mark[c] = r;
          acc[c] = 0.0;
          live.push_back(c);
        }
        acc[c] += av * b.val[q];
      }
    }
    std::sort(live.begin(), live.end());
    for (index_t c : live) {
      m.col.push_back(c);
      m.val.push_back(acc[c]);
    }
    m.ptr[r + 1] = static_cast<index_t>(m.col.size());
  }
  return m;
}

CsrMatrix csr_add(const CsrMatrix& a, const CsrMatrix& b, double alpha, double beta) {
  if (a.rows != b.rows || a.cols != b.cols) throw std::invalid_argument("csr_add: shape mismatch");
  CsrMatrix m;
  m.rows = a.rows;
  m.cols = a.cols;
  m.ptr.assign(a.rows + 1, 0);
  for (index_t r = 0; r < a.rows; ++r) {
    index_t pa = a.ptr[r], pb = b.ptr[r];
    while (pa < a.ptr[r + 1] || pb < b.ptr[r + 1]) {
      index_t ca = pa < a.ptr[r + 1] ? a.col[pa] : a.cols;
      index_t cb = pb < b.ptr[r + 1] ? b.col[pb] : b.cols;
      if (ca < cb) {
        m.col.push_back(ca);
        m.val.push_back(alpha * a.val[pa++]);
      } else if (cb < ca) {
        m.col.push_back(cb);
        m.val.push_back(beta * b.val[pb++]);
      } else {
        m.col.push_back(ca);
        m.val.push_back(alpha * a.val[pa++] + beta * b.val[pb++]);
      }
    }
    m.ptr[r + 1] = static_cast<index_t>(m.col.size());
  }
  return m;
}

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y, bool accumulate) {
  for (index_t r = 0; r < a.rows; ++r) {
    double s = accumulate ? y[r] : 0.0;
    for (index_t p = a.ptr[r]; p < a.ptr[r + 1]; ++p) s += a.val[p] * x[a.col[p]];
    y[r] = s;
  }
}

void spmv_transpose(const CsrMatrix& a, std::span<const double> x, std::span<double> y,
                    bool accumulate) {
  if (!accumulate) std::fill(y.begin(), y.end(), 0.0);
  for (index_t r = 0; r < a.rows; ++r) {
    const double xr = x[r];
    if (xr == 0.0) continue;
    for (index_t p = a.ptr[r]; p < a.ptr[r + 1]; ++p) y[a.col[p]] += a.val[p] * xr;
  }
}

CsrMatrix csr_extract(const CsrMatrix& a, std::span<const index_t> row_ids,
                      std::span<const index_t> col_ids) {
  std::vector<index_t> col_pos(a.cols, -1);
  for (std::size_t i = 0; i < col_ids.size(); ++i) col_pos[col_ids[i]] = static_cast<index_t>(i);

  CsrMatrix m;
  m.rows = static_cast<index_t>(row_ids.size());
  m.cols = static_cast<index_t>(col_ids.size());
  m.ptr.assign(m.rows + 1, 0);
  for (index_t i = 0; i < m.rows; ++i) {
    const index_t r = row_ids[i];
    for (index_t p = a.ptr[r]; p < a.ptr[r + 1]; ++p) {
      const index_t c = col_pos[a.col[p]];
      if (c < 0) continue;
      m.col.push_back(c);
      m.val.push_back(a.val[p]);
    }
    // col_ids is sorted when callers pass index subsets in ascending order;
    // sort defensively so the invariant holds for arbitrary orderings.
    const index_t b0 = m.ptr[i], b1 = static_cast<index_t>(m.col.size());
    std::vector<index_t> order(b1 - b0);
    for (index_t k = 0; k < b1 - b0; ++k) order[k] = k;
    std::sort(order.begin(), order.end(),
              [&](index_t x, index_t y) { return m.col[b0 + x] < m.col[b0 + y]; });
    std::vector<index_t> tc(b1 - b0);
    std::vector<double> tv(b1 - b0);
    for (index_t k = 0; k < b1 - b0; ++k) {
      tc[k] = m.col[b0 + order[k]];
      tv[k] = m.val[b0 + order[k]];
    }
    std::copy(tc.begin(), tc.end(), m.col.begin() + b0);
    std::copy(tv.begin(), tv.end(), m.val.begin() + b0);
    m.ptr[i + 1] = b1;
  }
  return m;
}

CsrMatrix csr_permute_symmetric(const CsrMatrix& a, std::span<const index_t> perm) {
  std::vector<index_t> inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = static_cast<index_t>(i);

  std::vector<Triplet> trips;
  trips.reserve(a.col.size());
  for (index_t r = 0; r < a.rows; ++r)
    for (index_t p = a.ptr[r]; p < a.ptr[r + 1]; ++p)
      trips.push_back({inv[r], inv[a.col[p]], a.val[p]});
  return csr_from_triplets(a.rows, a.cols, std::move(trips));
}

double csr_max_abs(const CsrMatrix& a) {
  double m = 0.0;
  for (double v : a.val) m = std::max(m, std::fabs(v));
  return m;
}

void write_matrix_market(const std::string& path, const CsrMatrix& a) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  std::fprintf(f, "%%%%MatrixMarket matrix coordinate real general\n");
  std::fprintf(f, "%d %d %d\n", a.rows, a.cols, a.nnz());
  for (index_t r = 0; r < a.rows; ++r)
    for (index_t p = a.ptr[r]; p < a.ptr[r + 1]; ++p)
      std::fprintf(f, "%d %d %.17g\n", r + 1, a.col[p] + 1, a.val[p]);
  std::fclose(f);
}

}  // namespace myo
