#include "bsrd/timestep.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bsrd/errors.hpp"

namespace bsrd {

void validate(const SchemeConfig& s) {
  auto bad = [](const std::string& m) { throw ParameterError("scheme: " + m); };
  if (!(s.dt > 0.0) || !std::isfinite(s.dt)) bad("dt must be finite and > 0");
  if (!(s.theta > 0.0 && s.theta < 0.5)) bad("theta must lie in (0, 1/2)");
  if (!(s.alpha > 0.5 && s.alpha <= 1.0)) bad("alpha must lie in (1/2, 1]");
  if (!(s.newton_tol > 0.0)) bad("newton_tol must be > 0");
  if (!(s.linear_tol > 0.0)) bad("linear_tol must be > 0");
  if (s.newton_max <= 0) bad("newton_max must be > 0");
  if (s.max_halvings < 0) bad("max_halvings must be >= 0");
}

void StepReport::merge(const StepReport& o) {
  newton_iterations += o.newton_iterations;
  linear_iterations += o.linear_iterations;
  halvings = std::max(halvings, o.halvings);
  max_newton_residual = std::max(max_newton_residual, o.max_newton_residual);
  newton_histories.insert(newton_histories.end(), o.newton_histories.begin(),
                          o.newton_histories.end());
}

FractionalStepTheta::FractionalStepTheta(ImplicitSystem& system, const SchemeConfig& cfg)
    : sys_(system), cfg_(cfg), solver_(cfg.linear_solver, cfg.linear_tol) {
  validate(cfg_);
}

void FractionalStepTheta::substep(const std::vector<double>& y0, const std::vector<double>& f0,
                                  double h_imp, double h_exp, std::vector<double>& y,
                                  std::vector<double>& f, StepReport& rep) {
  const std::size_t n = y0.size();
  const auto& w = sys_.residual_weights();
  work_m_.resize(n);
  work_g_.resize(n);
  work_d_.assign(n, 0.0);
  y = y0;
  std::vector<double> history;
  for (int it = 0;; ++it) {
    sys_.rhs(y, f);
    for (std::size_t i = 0; i < n; ++i) work_d_[i] = y[i] - y0[i];
    sys_.apply_mass(work_d_, work_m_);
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      work_g_[i] = work_m_[i] - h_imp * f[i] - h_exp * f0[i];
      res = std::max(res, std::abs(work_g_[i]) / w[i]);
    }
    if (!std::isfinite(res)) {
      for (std::size_t i = 0; i < n && std::isfinite(res); ++i) res = std::abs(work_g_[i]);
      throw SolverError("Newton produced a non-finite residual", res);
    }
    history.push_back(res);
    rep.max_newton_residual = std::max(rep.max_newton_residual, res);
    if (res <= cfg_.newton_tol) break;
    if (it >= cfg_.newton_max) {
      std::ostringstream os;
      os << "Newton did not converge in " << cfg_.newton_max << " iterations (residual " << res
         << ")";
      throw SolverError(os.str(), res);
    }
    const CsrMatrix& jac = sys_.newton_matrix(y, 1.0, h_imp);
    for (auto& g : work_g_) g = -g;
    std::fill(work_d_.begin(), work_d_.end(), 0.0);
    const auto ls = solver_.solve(jac, work_g_, work_d_);
    rep.linear_iterations += ls.iterations;
    ++rep.newton_iterations;
    for (std::size_t i = 0; i < n; ++i) y[i] += work_d_[i];
  }
  rep.newton_histories.push_back(std::move(history));
}

StepReport FractionalStepTheta::step(std::vector<double>& y, double dt) {
  if (!(dt > 0.0)) throw PreconditionError("step size must be positive");
  if (static_cast<int>(y.size()) != sys_.size())
    throw PreconditionError("state has " + std::to_string(y.size()) + " unknowns, system has " +
                            std::to_string(sys_.size()));
  const double th = cfg_.theta;
  const double th_mid = 1.0 - 2.0 * th;
  const double a = cfg_.alpha;
  const double b = 1.0 - a;

  StepReport rep;
  const std::size_t n = y.size();
  std::vector<double> f0(n), y1(n), f1(n), y2(n), f2(n), y3(n), f3(n);
  sys_.rhs(y, f0);
  substep(y, f0, a * th * dt, b * th * dt, y1, f1, rep);
  substep(y1, f1, b * th_mid * dt, a * th_mid * dt, y2, f2, rep);
  substep(y2, f2, a * th * dt, b * th * dt, y3, f3, rep);
  y.swap(y3);
  return rep;
}

StepReport FractionalStepTheta::advance_level(std::vector<double>& y, double dt, int level) {
  try {
    StepReport rep = step(y, dt);
    rep.halvings = level;
    return rep;
  } catch (const SolverError&) {
    if (level >= cfg_.max_halvings) throw;
  }
  StepReport rep = advance_level(y, 0.5 * dt, level + 1);
  rep.merge(advance_level(y, 0.5 * dt, level + 1));
  return rep;
}

StepReport FractionalStepTheta::advance(std::vector<double>& y, double dt) {
  return advance_level(y, dt, 0);
}

}  // namespace bsrd
