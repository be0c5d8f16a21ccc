#pragma once

// Activator-depleted reaction kinetics with linear Robin-type coupling
// between the bulk species (u, v) and the surface species (r, s).

#include <array>

namespace bsrd {

/// Dense 2x2 matrix, row-major: [[a11, a12], [a21, a22]].
struct Mat2 {
  double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

  double trace() const noexcept { return a11 + a22; }
  double det() const noexcept { return a11 * a22 - a12 * a21; }
  Mat2 scaled(double c) const noexcept { return {c * a11, c * a12, c * a21, c * a22}; }
  friend bool operator==(const Mat2&, const Mat2&) = default;
};

struct KineticParams {
  double a = 0.1;
  double b = 0.9;
  double gamma_bulk = 500.0;
  double gamma_surf = 500.0;
};

struct CouplingParams {
  double alpha1 = 0.0, alpha2 = 0.0;
  double beta1 = 0.0, beta2 = 0.0;
  double kappa1 = 0.0, kappa2 = 0.0;

  /// alpha1 = beta1 = 5/12, alpha2 = kappa2 = 5, kappa1 = beta2 = 0.
  static CouplingParams reference();
};

struct DiffusionParams {
  double d_bulk = 1.0;
  double d_surf = 1.0;
};

/// The full parameter point of the model.
struct ModelParams {
  KineticParams kinetics;
  CouplingParams coupling;
  DiffusionParams diffusion;

  /// a = 0.1, b = 0.9, gamma = 500 on both, reference coupling, given ratios.
  static ModelParams reference(double d_bulk, double d_surf);
};

/// Throws ParameterError unless a, b and both scale factors are finite and > 0.
void validate(const KineticParams& p);
/// Throws ParameterError on non-finite coefficients.
void validate(const CouplingParams& c);
/// Throws ParameterError unless both ratios are finite and > 0.
void validate(const DiffusionParams& d);

/// Validates all three parameter groups (not the compatibility condition).
void validate(const ModelParams& m);

/// Concentrations (u, v) in the bulk and (r, s) on the surface at one point.
struct Species {
  double u = 0.0, v = 0.0, r = 0.0, s = 0.0;
};

using SteadyState = Species;

/// f = a - u + u^2 v, g = b - u^2 v (unscaled).
inline double reaction_f(double a, double u, double v) noexcept { return a - u + u * u * v; }
inline double reaction_g(double b, double u, double v) noexcept { return b - u * u * v; }

/// Per-gamma partial derivatives [[f_u, f_v], [g_u, g_v]] at (u, v).
Mat2 reaction_derivatives(double u, double v) noexcept;

/// (f1, f2, f3, f4) including the gamma scale factors and the coupling terms.
std::array<double, 4> eval_kinetics(const KineticParams& p, const CouplingParams& c,
                                    const Species& w) noexcept;

/// Unscaled (h1, h2); callers apply gamma_surf.
std::array<double, 2> eval_coupling(const CouplingParams& c, const Species& w) noexcept;

/// (a+b, b/(a+b)^2, a+b, b/(a+b)^2). Throws ParameterError when a+b = 0 or non-finite.
SteadyState steady_state(const KineticParams& p);

/// (beta1 - alpha1)(kappa2 - alpha2) - kappa1*beta2.
double compatibility_residual(const CouplingParams& c) noexcept;

/// Throws CompatibilityError when the residual is not exactly zero.
void require_compatible(const CouplingParams& c);

/// max(|h1|, |h2|) at (u*, v*, u*, v*). The residual above only says h = 0 has
/// a nonzero solution; this checks that the kinetic steady state is one.
double steady_coupling_residual(const KineticParams& p, const CouplingParams& c);

/// Both checks; the steady-state one allows 1e-12 relative rounding.
void require_compatible(const KineticParams& p, const CouplingParams& c);

struct JacobianBlocks {
  Mat2 j_bulk;   // d(f1,f2)/d(u,v)
  Mat2 j_surf;   // d(f3,f4)/d(r,s)
  Mat2 j_cross;  // d(f3,f4)/d(u,v)

  /// Full 4x4 Jacobian in (u, v, r, s) order; the upper-right block is zero.
  std::array<std::array<double, 4>, 4> full() const noexcept;
};

JacobianBlocks jacobian_at(const KineticParams& p, const CouplingParams& c,
                           const Species& w) noexcept;

}  // namespace bsrd
