#pragma once

#include <memory>
#include <vector>

#include "bsrd/sparse.hpp"

namespace bsrd {

enum class LinearSolverKind {
  BiCGStab,  // Jacobi-preconditioned, OpenMP kernels
  SparseLU,  // direct factorization; symbolic analysis reused while the pattern is fixed
};

struct LinearSolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Solves A x = b to ||b - A x|| <= tol ||b||. Every result is checked against
/// the true residual; failure (breakdown, stagnation, iteration cap, singular
/// factorization) throws SolverError carrying the residual reached.
class LinearSolver {
 public:
  explicit LinearSolver(LinearSolverKind kind = LinearSolverKind::BiCGStab, double tol = 1e-10,
                        int max_iterations = 2000);
  ~LinearSolver();
  LinearSolver(LinearSolver&&) noexcept;
  LinearSolver& operator=(LinearSolver&&) noexcept;

  /// `x` is used as the initial guess for the iterative solver.
  LinearSolveStats solve(const CsrMatrix& a, const std::vector<double>& b, std::vector<double>& x);

  LinearSolverKind kind() const noexcept { return kind_; }
  double tolerance() const noexcept { return tol_; }

 private:
  struct DirectCache;
  LinearSolverKind kind_;
  double tol_;
  int max_iterations_;
  std::unique_ptr<DirectCache> direct_;
};

/// One-shot convenience wrapper.
std::vector<double> solve_linear(const CsrMatrix& a, const std::vector<double>& b,
                                 double tol = 1e-10,
                                 LinearSolverKind kind = LinearSolverKind::BiCGStab);

}  // namespace bsrd
