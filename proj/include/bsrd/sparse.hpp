#pragma once

// Compressed sparse row matrices and the kernels the solvers need.

#include <iosfwd>
#include <vector>

namespace bsrd {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

struct CsrMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> row_ptr{0};
  std::vector<int> col_idx;
  std::vector<double> values;

  int nnz() const noexcept { return static_cast<int>(col_idx.size()); }
  /// Storage position of (i, j), or -1 when the entry is not in the pattern.
  int find(int i, int j) const noexcept;
  /// Value at (i, j); 0 outside the pattern.
  double at(int i, int j) const noexcept;
};

/// Sums duplicates in insertion order, so the result is deterministic for a
/// given triplet sequence. Column indices are sorted within each row.
CsrMatrix from_triplets(int rows, int cols, const std::vector<Triplet>& triplets);

/// Same pattern as `pattern`, all values zero.
CsrMatrix zeros_like(const CsrMatrix& pattern);

/// Adds `scale * src` into `dst`; every entry of src must exist in dst's pattern.
void add_into(CsrMatrix& dst, const CsrMatrix& src, double scale = 1.0);

CsrMatrix transpose(const CsrMatrix& a);

/// Exact (tol = 0) or tolerance-based structural and numerical symmetry.
bool is_symmetric(const CsrMatrix& a, double tol = 0.0);

std::vector<double> row_sums(const CsrMatrix& a);

/// y = A x, one row at a time. Reference kernel.
void spmv_serial(const CsrMatrix& a, const double* x, double* y);
/// y = A x with rows split across OpenMP threads; same per-row summation order
/// as the serial kernel, so results are bit-identical.
void spmv_omp(const CsrMatrix& a, const double* x, double* y);

/// Convenience wrapper around spmv_omp.
std::vector<double> multiply(const CsrMatrix& a, const std::vector<double>& x);

/// Matrix Market coordinate real general.
void write_matrix_market(std::ostream& os, const CsrMatrix& a);

}  // namespace bsrd
