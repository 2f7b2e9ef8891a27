#include "myosolve/dense.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace myo {

DenseMatrix dense_from_csr(const CsrMatrix& m) {
  DenseMatrix d(m.rows, m.cols);
  for (index_t r = 0; r < m.rows; ++r)
    for (index_t p = m.ptr[r]; p < m.ptr[r + 1]; ++p) d(r, m.col[p]) = m.val[p];
  return d;
}

DenseMatrix dense_matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.rows) throw std::invalid_argument("dense_matmul: shape mismatch");
  DenseMatrix c(a.rows, b.cols);
  for (index_t i = 0; i < a.rows; ++i)
    for (index_t k = 0; k < a.cols; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (index_t j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

DenseMatrix dense_transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols, a.rows);
  for (index_t i = 0; i < a.rows; ++i)
    for (index_t j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
  return t;
}

void dense_matvec(const DenseMatrix& a, std::span<const double> x, std::span<double> y) {
  for (index_t i = 0; i < a.rows; ++i) {
    double s = 0.0;
    for (index_t j = 0; j < a.cols; ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
}

void DenseLu::factor(DenseMatrix a) {
  if (a.rows != a.cols) throw std::invalid_argument("DenseLu: matrix must be square");
  const index_t n = a.rows;
  lu_ = std::move(a);
  piv_.resize(n);
  for (index_t k = 0; k < n; ++k) {
    index_t p = k;
    double best = std::fabs(lu_(k, k));
    for (index_t i = k + 1; i < n; ++i) {
      const double v = std::fabs(lu_(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best == 0.0) throw SingularMatrixError("DenseLu: zero pivot", k);
    piv_[k] = p;
    if (p != k)
      for (index_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
    const double inv = 1.0 / lu_(k, k);
    for (index_t i = k + 1; i < n; ++i) {
      const double m = lu_(i, k) * inv;
      lu_(i, k) = m;
      if (m == 0.0) continue;
      for (index_t j = k + 1; j < n; ++j) lu_(i, j) -= m * lu_(k, j);
    }
  }
}

void DenseLu::solve(std::span<double> x) const {
  const index_t n = lu_.rows;
  // row swaps first: the factor swaps whole rows, so the multipliers stored
  // below the diagonal belong to the final row positions
  for (index_t k = 0; k < n; ++k)
    if (piv_[k] != k) std::swap(x[k], x[piv_[k]]);
  for (index_t k = 0; k < n; ++k)
    for (index_t i = k + 1; i < n; ++i) x[i] -= lu_(i, k) * x[k];
  for (index_t k = n - 1; k >= 0; --k) {
    for (index_t j = k + 1; j < n; ++j) x[k] -= lu_(k, j) * x[j];
    x[k] /= lu_(k, k);
  }
}

std::vector<double> DenseLu::solve(std::span<const double> b) const {
  std::vector<double> x(b.begin(), b.end());
  solve(std::span<double>(x));
  return x;
}

DenseMatrix dense_inverse(const DenseMatrix& a) {
  const index_t n = a.rows;
  DenseLu lu;
  lu.factor(a);
  DenseMatrix inv(n, n);
  std::vector<double> e(n);
  for (index_t j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    lu.solve(std::span<double>(e));
    for (index_t i = 0; i < n; ++i) inv(i, j) = e[i];
  }
  return inv;
}

ThinQr thin_qr(const DenseMatrix& a, double drop_tol) {
  const index_t m = a.rows;
  ThinQr out;
  out.q = DenseMatrix(m, 0);
  std::vector<std::vector<double>> qcols;
  std::vector<std::vector<double>> rcols;  // coefficients against kept columns

  for (index_t j = 0; j < a.cols; ++j) {
    std::vector<double> v(m);
    for (index_t i = 0; i < m; ++i) v[i] = a(i, j);
    double norm0 = 0.0;
    for (double x : v) norm0 += x * x;
    norm0 = std::sqrt(norm0);

    std::vector<double> coef(qcols.size(), 0.0);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < qcols.size(); ++k) {
        double d = 0.0;
        for (index_t i = 0; i < m; ++i) d += qcols[k][i] * v[i];
        coef[k] += d;
        for (index_t i = 0; i < m; ++i) v[i] -= d * qcols[k][i];
      }
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm0 == 0.0 || norm <= drop_tol * norm0) continue;

    for (double& x : v) x /= norm;
    qcols.push_back(std::move(v));
    coef.push_back(norm);
    rcols.push_back(std::move(coef));
    out.kept.push_back(j);
  }

  const index_t r = static_cast<index_t>(qcols.size());
  out.q = DenseMatrix(m, r);
  out.r = DenseMatrix(r, r);
  for (index_t k = 0; k < r; ++k) {
    for (index_t i = 0; i < m; ++i) out.q(i, k) = qcols[k][i];
    for (index_t i = 0; i < static_cast<index_t>(rcols[k].size()); ++i) out.r(i, k) = rcols[k][i];
  }
  return out;
}

}  // namespace myo
