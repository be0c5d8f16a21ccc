#pragma once

// Fractional-step theta time integration of M y' = F(y) with Newton's method
// on each implicit substep.

#include <vector>

#include "bsrd/linear_solver.hpp"
#include "bsrd/sparse.hpp"

namespace bsrd {

/// Semi-discrete system M y' = F(y).
class ImplicitSystem {
 public:
  virtual ~ImplicitSystem() = default;
  virtual int size() const = 0;
  virtual void rhs(const std::vector<double>& y, std::vector<double>& f) = 0;
  virtual void apply_mass(const std::vector<double>& x, std::vector<double>& out) = 0;
  /// mass_coef * M - rhs_coef * dF/dy(y); the returned matrix stays valid
  /// until the next call.
  virtual const CsrMatrix& newton_matrix(const std::vector<double>& y, double mass_coef,
                                         double rhs_coef) = 0;
  /// Positive per-unknown weights; Newton residuals are measured as max |G_i| / w_i.
  virtual const std::vector<double>& residual_weights() const = 0;
};

struct SchemeConfig {
  double dt = 1e-4;
  double theta = 0.29289321881345248;  // 1 - 1/sqrt(2)
  double alpha = 0.58578643762690485;  // 2 - sqrt(2)
  double newton_tol = 1e-8;
  int newton_max = 20;
  double linear_tol = 1e-10;
  int max_halvings = 10;
  LinearSolverKind linear_solver = LinearSolverKind::BiCGStab;
};

/// Throws ParameterError unless dt > 0, 0 < theta < 1/2, 1/2 < alpha <= 1,
/// tolerances > 0, newton_max > 0 and max_halvings >= 0.
void validate(const SchemeConfig& s);

struct StepReport {
  int newton_iterations = 0;
  int linear_iterations = 0;
  int halvings = 0;  // deepest dt halving used
  double max_newton_residual = 0.0;
  /// Scaled residual history of every Newton solve, in order.
  std::vector<std::vector<double>> newton_histories;

  void merge(const StepReport& other);
};

class FractionalStepTheta {
 public:
  FractionalStepTheta(ImplicitSystem& system, const SchemeConfig& cfg);

  /// One step of size dt without retries. Throws SolverError on failure and
  /// leaves y unchanged.
  StepReport step(std::vector<double>& y, double dt);

  /// One step of size dt; on SolverError the interval is covered by two
  /// half steps, recursively, up to max_halvings levels.
  StepReport advance(std::vector<double>& y, double dt);

  const SchemeConfig& config() const noexcept { return cfg_; }

 private:
  // Solves M (y - y0) = h_imp F(y) + h_exp f0 for y, starting from y0.
  // On return f holds F(y).
  void substep(const std::vector<double>& y0, const std::vector<double>& f0, double h_imp,
               double h_exp, std::vector<double>& y, std::vector<double>& f, StepReport& rep);
  StepReport advance_level(std::vector<double>& y, double dt, int level);

  ImplicitSystem& sys_;
  SchemeConfig cfg_;
  LinearSolver solver_;
  std::vector<double> work_m_, work_g_, work_d_, work_y0_;
};

}  // namespace bsrd
