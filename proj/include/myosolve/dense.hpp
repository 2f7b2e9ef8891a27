#pragma once

#include <span>
#include <vector>

#include "myosolve/csr.hpp"

namespace myo {

/// Row-major dense matrix for coarse problems and reference computations.
struct DenseMatrix {
  index_t rows = 0;
  index_t cols = 0;
  std::vector<double> a;

  DenseMatrix() = default;
  DenseMatrix(index_t r, index_t c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(index_t i, index_t j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(index_t i, index_t j) const {
    return a[static_cast<std::size_t>(i) * cols + j];
  }
};

DenseMatrix dense_from_csr(const CsrMatrix& m);
DenseMatrix dense_matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix dense_transpose(const DenseMatrix& a);

void dense_matvec(const DenseMatrix& a, std::span<const double> x, std::span<double> y);

/// LU with partial pivoting, factored once and reusable.
class DenseLu {
 public:
  void factor(DenseMatrix a);
  void solve(std::span<double> x) const;  // in place
  std::vector<double> solve(std::span<const double> b) const;

 private:
  DenseMatrix lu_;
  std::vector<index_t> piv_;
};

DenseMatrix dense_inverse(const DenseMatrix& a);

/// Thin QR by modified Gram-Schmidt with a second orthogonalization pass.
/// Columns whose residual drops below `drop_tol` times their original norm are
/// rank-deficient and omitted; `kept` lists the surviving column indices.
struct ThinQr {
  DenseMatrix q;               // rows x kept.size(), orthonormal columns
  DenseMatrix r;               // kept.size() x kept.size(), upper triangular
  std::vector<index_t> kept;
};

ThinQr thin_qr(const DenseMatrix& a, double drop_tol = 1e-10);

}  // namespace myo
