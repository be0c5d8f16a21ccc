#include "bsrd/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>

#include "bsrd/errors.hpp"

namespace bsrd {

int CsrMatrix::find(int i, int j) const noexcept {
  if (i < 0 || i >= rows) return -1;
  const auto first = col_idx.begin() + row_ptr[static_cast<std::size_t>(i)];
  const auto last = col_idx.begin() + row_ptr[static_cast<std::size_t>(i) + 1];
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return -1;
  return static_cast<int>(it - col_idx.begin());
}

double CsrMatrix::at(int i, int j) const noexcept {
  const int p = find(i, j);
  return p < 0 ? 0.0 : values[static_cast<std::size_t>(p)];
}

CsrMatrix from_triplets(int rows, int cols, const std::vector<Triplet>& t) {
  if (rows < 0 || cols < 0) throw PreconditionError("negative matrix dimensions");
  std::vector<std::size_t> order(t.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (const auto& e : t)
    if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols)
      throw PreconditionError("triplet (" + std::to_string(e.row) + "," + std::to_string(e.col) +
                              ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return t[a].row != t[b].row ? t[a].row < t[b].row : t[a].col < t[b].col;
  });

  CsrMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.row_ptr.assign(static_cast<std::size_t>(rows) + 1, 0);
  for (std::size_t k = 0; k < order.size(); ++k) {
    const Triplet& e = t[order[k]];
    if (!m.col_idx.empty() && k > 0 && t[order[k - 1]].row == e.row &&
        t[order[k - 1]].col == e.col) {
      m.values.back() += e.value;
      continue;
    }
    m.col_idx.push_back(e.col);
    m.values.push_back(e.value);
    ++m.row_ptr[static_cast<std::size_t>(e.row) + 1];
  }
  for (int i = 0; i < rows; ++i)
    m.row_ptr[static_cast<std::size_t>(i) + 1] += m.row_ptr[static_cast<std::size_t>(i)];
  return m;
}

CsrMatrix zeros_like(const CsrMatrix& p) {
  CsrMatrix m = p;
  std::fill(m.values.begin(), m.values.end(), 0.0);
  return m;
}

void add_into(CsrMatrix& dst, const CsrMatrix& src, double scale) {
  if (dst.rows != src.rows || dst.cols != src.cols)
    throw PreconditionError("add_into: dimension mismatch");
  for (int i = 0; i < src.rows; ++i) {
    for (int p = src.row_ptr[i]; p < src.row_ptr[i + 1]; ++p) {
      const int q = dst.find(i, src.col_idx[p]);
      if (q < 0) throw PreconditionError("add_into: entry outside destination pattern");
      dst.values[q] += scale * src.values[p];
    }
  }
}

CsrMatrix transpose(const CsrMatrix& a) {
  std::vector<Triplet> t;
  t.reserve(a.col_idx.size());
  for (int i = 0; i < a.rows; ++i)
    for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p)
      t.push_back({a.col_idx[p], i, a.values[p]});
  return from_triplets(a.cols, a.rows, t);
}

bool is_symmetric(const CsrMatrix& a, double tol) {
  if (a.rows != a.cols) return false;
  for (int i = 0; i < a.rows; ++i) {
    for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) {
      const int j = a.col_idx[p];
      const int q = a.find(j, i);
      const double other = q < 0 ? 0.0 : a.values[q];
      if (q < 0 && a.values[p] != 0.0 && tol == 0.0) return false;
      if (std::abs(a.values[p] - other) > tol) return false;
    }
  }
  return true;
}

std::vector<double> row_sums(const CsrMatrix& a) {
  std::vector<double> s(static_cast<std::size_t>(a.rows), 0.0);
  for (int i = 0; i < a.rows; ++i)
    for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) s[i] += a.values[p];
  return s;
}

void spmv_serial(const CsrMatrix& a, const double* x, double* y) {
  for (int i = 0; i < a.rows; ++i) {
    double acc = 0.0;
    for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) acc += a.values[p] * x[a.col_idx[p]];
    y[i] = acc;
  }
}

void spmv_omp(const CsrMatrix& a, const double* x, double* y) {
  const int n = a.rows;
  const int* rp = a.row_ptr.data();
  const int* ci = a.col_idx.data();
  const double* v = a.values.data();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int p = rp[i]; p < rp[i + 1]; ++p) acc += v[p] * x[ci[p]];
    y[i] = acc;
  }
}

std::vector<double> multiply(const CsrMatrix& a, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != a.cols)
    throw PreconditionError("multiply: vector of size " + std::to_string(x.size()) +
                            " for matrix with " + std::to_string(a.cols) + " columns");
  std::vector<double> y(static_cast<std::size_t>(a.rows));
  spmv_omp(a, x.data(), y.data());
  return y;
}

void write_matrix_market(std::ostream& os, const CsrMatrix& a) {
  const auto prec = os.precision();
  os << std::setprecision(17);
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << a.rows << ' ' << a.cols << ' ' << a.nnz() << '\n';
  for (int i = 0; i < a.rows; ++i)
    for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p)
      os << i + 1 << ' ' << a.col_idx[p] + 1 << ' ' << a.values[p] << '\n';
  os.precision(prec);
}

}  // namespace bsrd
