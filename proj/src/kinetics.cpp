#include "bsrd/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bsrd/errors.hpp"

namespace bsrd {

namespace {

void require_finite(double x, const char* name) {
  if (!std::isfinite(x)) {
    std::ostringstream os;
    os << "parameter " << name << " is not finite (" << x << ")";
    throw ParameterError(os.str());
  }
}

void require_positive(double x, const char* name) {
  require_finite(x, name);
  if (!(x > 0.0)) {
    std::ostringstream os;
    os << "parameter " << name << " must be > 0 (got " << x << ")";
    throw ParameterError(os.str());
  }
}

}  // namespace

CouplingParams CouplingParams::reference() {
  CouplingParams c;
  c.alpha1 = 5.0 / 12.0;
  c.beta1 = 5.0 / 12.0;
  c.alpha2 = 5.0;
  c.kappa2 = 5.0;
  return c;
}

void validate(const KineticParams& p) {
  require_positive(p.a, "a");
  require_positive(p.b, "b");
  require_positive(p.gamma_bulk, "gamma_bulk");
  require_positive(p.gamma_surf, "gamma_surf");
}

void validate(const CouplingParams& c) {
  require_finite(c.alpha1, "alpha1");
  require_finite(c.alpha2, "alpha2");
  require_finite(c.beta1, "beta1");
  require_finite(c.beta2, "beta2");
  require_finite(c.kappa1, "kappa1");
  require_finite(c.kappa2, "kappa2");
}

void validate(const DiffusionParams& d) {
  require_positive(d.d_bulk, "d_bulk");
  require_positive(d.d_surf, "d_surf");
}

ModelParams ModelParams::reference(double d_bulk, double d_surf) {
  ModelParams m;
  m.coupling = CouplingParams::reference();
  m.diffusion = {d_bulk, d_surf};
  return m;
}

void validate(const ModelParams& m) {
  validate(m.kinetics);
  validate(m.coupling);
  validate(m.diffusion);
}

Mat2 reaction_derivatives(double u, double v) noexcept {
  return {-1.0 + 2.0 * u * v, u * u, -2.0 * u * v, -u * u};
}

std::array<double, 4> eval_kinetics(const KineticParams& p, const CouplingParams& c,
                                    const Species& w) noexcept {
  const auto [h1, h2] = eval_coupling(c, w);
  return {p.gamma_bulk * reaction_f(p.a, w.u, w.v),
          p.gamma_bulk * reaction_g(p.b, w.u, w.v),
          p.gamma_surf * (reaction_f(p.a, w.r, w.s) - h1),
          p.gamma_surf * (reaction_g(p.b, w.r, w.s) - h2)};
}

std::array<double, 2> eval_coupling(const CouplingParams& c, const Species& w) noexcept {
  return {c.alpha1 * w.r - c.beta1 * w.u - c.kappa1 * w.v,
          c.alpha2 * w.s - c.beta2 * w.u - c.kappa2 * w.v};
}

SteadyState steady_state(const KineticParams& p) {
  require_finite(p.a, "a");
  require_finite(p.b, "b");
  const double sum = p.a + p.b;
  if (sum == 0.0) {
    throw ParameterError("degenerate kinetics: a + b = 0 admits no steady state");
  }
  const double v = p.b / (sum * sum);
  return {sum, v, sum, v};
}

double compatibility_residual(const CouplingParams& c) noexcept {
  return (c.beta1 - c.alpha1) * (c.kappa2 - c.alpha2) - c.kappa1 * c.beta2;
}

void require_compatible(const CouplingParams& c) {
  const double res = compatibility_residual(c);
  if (res != 0.0) {
    std::ostringstream os;
    os.precision(17);
    os << "coupling violates the compatibility condition "
          "(beta1 - alpha1)(kappa2 - alpha2) - kappa1*beta2 = 0 (residual "
       << res << "); no uniform steady state exists";
    throw CompatibilityError(os.str(), res);
  }
}

double steady_coupling_residual(const KineticParams& p, const CouplingParams& c) {
  const auto ss = steady_state(p);
  const auto h = eval_coupling(c, ss);
  return std::max(std::abs(h[0]), std::abs(h[1]));
}

void require_compatible(const KineticParams& p, const CouplingParams& c) {
  require_compatible(c);
  const auto ss = steady_state(p);
  const auto h = eval_coupling(c, ss);
  const double scale1 = std::abs(c.alpha1 * ss.r) + std::abs(c.beta1 * ss.u) + std::abs(c.kappa1 * ss.v);
  const double scale2 = std::abs(c.alpha2 * ss.s) + std::abs(c.beta2 * ss.u) + std::abs(c.kappa2 * ss.v);
  if (std::abs(h[0]) > 1e-12 * scale1 || std::abs(h[1]) > 1e-12 * scale2) {
    std::ostringstream os;
    os.precision(17);
    os << "coupling does not vanish at the steady state (h1, h2) = (" << h[0] << ", " << h[1]
       << ") at (u*, v*) = (" << ss.u << ", " << ss.v
       << "); the bulk and surface steady states cannot coincide";
    throw CompatibilityError(os.str(), std::max(std::abs(h[0]), std::abs(h[1])));
  }
}

std::array<std::array<double, 4>, 4> JacobianBlocks::full() const noexcept {
  return {{{j_bulk.a11, j_bulk.a12, 0.0, 0.0},
           {j_bulk.a21, j_bulk.a22, 0.0, 0.0},
           {j_cross.a11, j_cross.a12, j_surf.a11, j_surf.a12},
           {j_cross.a21, j_cross.a22, j_surf.a21, j_surf.a22}}};
}

JacobianBlocks jacobian_at(const KineticParams& p, const CouplingParams& c,
                           const Species& w) noexcept {
  JacobianBlocks j;
  j.j_bulk = reaction_derivatives(w.u, w.v).scaled(p.gamma_bulk);

  Mat2 surf = reaction_derivatives(w.r, w.s);
  surf.a11 -= c.alpha1;
  surf.a22 -= c.alpha2;
  j.j_surf = surf.scaled(p.gamma_surf);

  // f3 = gs(... + beta1 u + kappa1 v), f4 = gs(... + beta2 u + kappa2 v)
  j.j_cross = Mat2{c.beta1, c.kappa1, c.beta2, c.kappa2}.scaled(p.gamma_surf);
  return j;
}

}  // namespace bsrd
