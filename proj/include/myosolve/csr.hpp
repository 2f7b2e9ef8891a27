#pragma once

#include <span>
#include <string>
#include <vector>

#include "myosolve/core.hpp"

namespace myo {

/// Compressed sparse row matrix. Column indices are sorted and unique within
/// every row; all routines here preserve that invariant.
struct CsrMatrix {
  index_t rows = 0;
  index_t cols = 0;
  std::vector<index_t> ptr;  // size rows+1
  std::vector<index_t> col;
  std::vector<double> val;

  index_t nnz() const { return static_cast<index_t>(col.size()); }

  /// Value at (r, c); zero when the entry is not stored.
  double at(index_t r, index_t c) const;
};

struct Triplet {
  index_t row;
  index_t col;
  double val;
};

/// Builds CSR from an unordered triplet list; duplicate entries are summed.
CsrMatrix csr_from_triplets(index_t rows, index_t cols, std::vector<Triplet> triplets);

CsrMatrix csr_identity(index_t n);
CsrMatrix csr_transpose(const CsrMatrix& a);
CsrMatrix csr_matmul(const CsrMatrix& a, const CsrMatrix& b);

/// alpha*a + beta*b; patterns may differ.
CsrMatrix csr_add(const CsrMatrix& a, const CsrMatrix& b, double alpha = 1.0, double beta = 1.0);

/// y = A x, or y += A x when `accumulate`.
void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y,
          bool accumulate = false);

/// y (+)= A^T x without forming the transpose.
void spmv_transpose(const CsrMatrix& a, std::span<const double> x, std::span<double> y,
                    bool accumulate = false);

/// Submatrix on sorted index subsets. `row_ids`/`col_ids` select and order the
/// result; entries outside the subsets are dropped.
CsrMatrix csr_extract(const CsrMatrix& a, std::span<const index_t> row_ids,
                      std::span<const index_t> col_ids);

/// A(p,p) for a symmetric reordering: result(i,j) = a(perm[i], perm[j]).
CsrMatrix csr_permute_symmetric(const CsrMatrix& a, std::span<const index_t> perm);

double csr_max_abs(const CsrMatrix& a);

/// MatrixMarket coordinate format, general, 1-based.
void write_matrix_market(const std::string& path, const CsrMatrix& a);

}  // namespace myo
