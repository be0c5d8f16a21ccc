#include "bsrd/linear_solver.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>

#include "bsrd/errors.hpp"

namespace bsrd {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  const int n = static_cast<int>(a.size());
  double s = 0.0;
#pragma omp parallel for reduction(+ : s) schedule(static)
  for (int i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

double residual_norm(const CsrMatrix& a, const std::vector<double>& b,
                     const std::vector<double>& x, std::vector<double>& r) {
  spmv_omp(a, x.data(), r.data());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return norm2(r);
}

}  // namespace

struct LinearSolver::DirectCache {
  Eigen::SparseLU<Eigen::SparseMatrix<double, Eigen::ColMajor>, Eigen::COLAMDOrdering<int>> lu;
  std::vector<int> row_ptr, col_idx;
  bool analyzed = false;
};

LinearSolver::LinearSolver(LinearSolverKind kind, double tol, int max_iterations)
    : kind_(kind), tol_(tol), max_iterations_(max_iterations) {
  if (!(tol > 0.0)) throw PreconditionError("linear tolerance must be positive");
  if (max_iterations <= 0) throw PreconditionError("iteration cap must be positive");
}
LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

LinearSolveStats LinearSolver::solve(const CsrMatrix& a, const std::vector<double>& b,
                                     std::vector<double>& x) {
  const int n = a.rows;
  if (a.rows != a.cols) throw PreconditionError("linear solve needs a square matrix");
  if (static_cast<int>(b.size()) != n)
    throw PreconditionError("right-hand side has " + std::to_string(b.size()) +
                            " entries, expected " + std::to_string(n));
  if (static_cast<int>(x.size()) != n) x.assign(static_cast<std::size_t>(n), 0.0);

  const double bnorm = norm2(b);
  if (!std::isfinite(bnorm)) throw SolverError("non-finite right-hand side", bnorm);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return {};
  }
  std::vector<double> r(static_cast<std::size_t>(n));
  LinearSolveStats stats;

  if (kind_ == LinearSolverKind::SparseLU) {
    if (!direct_) direct_ = std::make_unique<DirectCache>();
    Eigen::Map<const Eigen::SparseMatrix<double, Eigen::RowMajor>> view(
        n, n, a.nnz(), a.row_ptr.data(), a.col_idx.data(), a.values.data());
    Eigen::SparseMatrix<double, Eigen::ColMajor> m = view;
    if (!direct_->analyzed || direct_->row_ptr != a.row_ptr || direct_->col_idx != a.col_idx) {
      direct_->lu.analyzePattern(m);
      direct_->row_ptr = a.row_ptr;
      direct_->col_idx = a.col_idx;
      direct_->analyzed = true;
    }
    direct_->lu.factorize(m);
    if (direct_->lu.info() != Eigen::Success)
      throw SolverError("sparse LU factorization failed: " + direct_->lu.lastErrorMessage(),
                        std::numeric_limits<double>::infinity());
    Eigen::Map<const Eigen::VectorXd> bv(b.data(), n);
    Eigen::VectorXd sol = direct_->lu.solve(bv);
    std::copy(sol.data(), sol.data() + n, x.begin());
    stats.iterations = 1;
    stats.relative_residual = residual_norm(a, b, x, r) / bnorm;
    if (!(stats.relative_residual <= tol_))
      throw SolverError("direct solve residual " + std::to_string(stats.relative_residual) +
                            " above tolerance (singular or ill-conditioned system)",
                        stats.relative_residual);
    return stats;
  }

  // Jacobi-preconditioned BiCGSTAB.
  std::vector<double> dinv(static_cast<std::size_t>(n), 1.0);
  for (int i = 0; i < n; ++i) {
    const double d = a.at(i, i);
    if (d != 0.0 && std::isfinite(d)) dinv[i] = 1.0 / d;
  }
  std::vector<double> rhat(static_cast<std::size_t>(n)), p(static_cast<std::size_t>(n), 0.0),
      vv(static_cast<std::size_t>(n), 0.0), y(static_cast<std::size_t>(n)),
      z(static_cast<std::size_t>(n)), s(static_cast<std::size_t>(n)),
      t(static_cast<std::size_t>(n));

  double rnorm = residual_norm(a, b, x, r);
  stats.relative_residual = rnorm / bnorm;
  if (stats.relative_residual <= tol_) return stats;
  rhat = r;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  double best = stats.relative_residual;
  int since_best = 0;
  for (int it = 1; it <= max_iterations_; ++it) {
    const double rho_new = dot(rhat, r);
    if (rho_new == 0.0 || !std::isfinite(rho_new))
      throw SolverError("BiCGSTAB breakdown (rho = 0)", stats.relative_residual);
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
      p[i] = r[i] + beta * (p[i] - omega * vv[i]);
      y[i] = dinv[i] * p[i];
    }
    spmv_omp(a, y.data(), vv.data());
    const double rv = dot(rhat, vv);
    if (rv == 0.0 || !std::isfinite(rv))
      throw SolverError("BiCGSTAB breakdown (rhat . v = 0)", stats.relative_residual);
    alpha = rho / rv;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
      s[i] = r[i] - alpha * vv[i];
      z[i] = dinv[i] * s[i];
    }
    if (norm2(s) / bnorm <= tol_) {
#pragma omp parallel for schedule(static)
      for (int i = 0; i < n; ++i) x[i] += alpha * y[i];
      stats.iterations = it;
      stats.relative_residual = residual_norm(a, b, x, r) / bnorm;
      if (stats.relative_residual <= tol_) return stats;
      rhat = r;
      rho = alpha = omega = 1.0;
      std::fill(p.begin(), p.end(), 0.0);
      std::fill(vv.begin(), vv.end(), 0.0);
      continue;
    }
    spmv_omp(a, z.data(), t.data());
    const double tt = dot(t, t);
    if (tt == 0.0) throw SolverError("BiCGSTAB breakdown (t = 0)", stats.relative_residual);
    omega = dot(t, s) / tt;
    if (omega == 0.0 || !std::isfinite(omega))
      throw SolverError("BiCGSTAB breakdown (omega = 0)", stats.relative_residual);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * y[i] + omega * z[i];
      r[i] = s[i] - omega * t[i];
    }
    stats.iterations = it;
    stats.relative_residual = norm2(r) / bnorm;
    if (stats.relative_residual <= tol_) {
      // Guard against drift of the recursive residual.
      stats.relative_residual = residual_norm(a, b, x, r) / bnorm;
      if (stats.relative_residual <= tol_) return stats;
      rhat = r;
      rho = alpha = omega = 1.0;
      std::fill(p.begin(), p.end(), 0.0);
      std::fill(vv.begin(), vv.end(), 0.0);
    }
    if (stats.relative_residual < 0.5 * best) {
      best = stats.relative_residual;
      since_best = 0;
    } else if (++since_best > 200) {
      throw SolverError("BiCGSTAB stagnated at relative residual " +
                            std::to_string(stats.relative_residual),
                        stats.relative_residual);
    }
  }
  throw SolverError("BiCGSTAB reached the iteration cap at relative residual " +
                        std::to_string(stats.relative_residual),
                    stats.relative_residual);
}

std::vector<double> solve_linear(const CsrMatrix& a, const std::vector<double>& b, double tol,
                                 LinearSolverKind kind) {
  LinearSolver solver(kind, tol);
  std::vector<double> x(b.size(), 0.0);
  solver.solve(a, b, x);
  return x;
}

}  // namespace bsrd
