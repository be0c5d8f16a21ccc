#pragma once

// Linear stability of the uniform steady state: Routh-Hurwitz conditions on
// the quartic characteristic polynomial, spherical-mode dispersion relations,
// critical diffusion ratios and the four-regime classifier.

#include <array>
#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "bsrd/kinetics.hpp"

namespace bsrd {

/// lambda^4 + a1 lambda^3 + a2 lambda^2 + a3 lambda + a4.
struct QuarticCoeffs {
  double a1 = 0.0, a2 = 0.0, a3 = 0.0, a4 = 0.0;
};

/// Monic quadratic lambda^2 + b lambda + c.
struct Quadratic {
  double b = 0.0, c = 0.0;
};

QuarticCoeffs quartic_coeffs(const JacobianBlocks& j) noexcept;

/// (lambda^2 - Tr_bulk lambda + Det_bulk, lambda^2 - Tr_surf lambda + Det_surf).
std::array<Quadratic, 2> quartic_factors(const JacobianBlocks& j) noexcept;

/// Coefficients of the product of two monic quadratics.
QuarticCoeffs expand(const Quadratic& p, const Quadratic& q) noexcept;

/// Roots of lambda^2 + b lambda + c, computed without cancellation.
std::array<std::complex<double>, 2> quadratic_roots(const Quadratic& q) noexcept;

enum class Outcome { Holds, Fails, Marginal };

/// One strict inequality "value > 0" evaluated in floating point. Values with
/// |value| <= kMarginalRel * scale are reported as Marginal.
struct Condition {
  double value = 0.0;
  double scale = 0.0;
  Outcome outcome = Outcome::Fails;

  bool holds() const noexcept { return outcome == Outcome::Holds; }
};

inline constexpr double kMarginalRel = 1e-10;

/// Classifies value > 0 given the magnitude of the terms that produced it.
Condition positive(double value, double scale) noexcept;

/// Routh-Hurwitz analysis of the kinetics-only (homogeneous) problem.
struct HomogeneousStability {
  double trace_full = 0.0, trace_bulk = 0.0, trace_surf = 0.0;
  double det_bulk = 0.0, det_surf = 0.0;
  QuarticCoeffs coeffs;

  /// cond[0..5]: Tr < 0, a2 > 0, a3 > 0, Det_bulk*Det_surf > 0,
  /// a1 a2 - a3 > 0, a3(a1 a2 - a3) - a1^2 a4 > 0, each written in Tr/Det form
  /// and stored as a "value > 0" test (cond[0].value = -Tr, cond[2].value = a3).
  std::array<Condition, 6> cond;

  /// Closed forms of the last two conditions as they are usually quoted in
  /// Tr/Det notation; kept as a diagnostic, they are not Hurwitz-equivalent.
  Condition cond5_quoted;
  Condition cond6_quoted;

  std::array<std::complex<double>, 4> eigenvalues;
  /// a4 == 0: lambda = 0 is a root and the equivalence with Re(lambda) < 0 is suspended.
  bool zero_root = false;

  bool all_hold() const noexcept;
  double max_real_eigenvalue() const noexcept;
};

HomogeneousStability routh_hurwitz(const JacobianBlocks& j) noexcept;

struct DispersionRow {
  int l = 0;
  long long k2 = 0;  // l(l+1)
  std::array<std::complex<double>, 2> lambda_bulk;
  std::array<std::complex<double>, 2> lambda_surf;
  double max_re_bulk = 0.0;
  double max_re_surf = 0.0;
};

struct DispersionTable {
  std::vector<DispersionRow> rows;

  std::vector<int> unstable_bulk_modes() const;
  std::vector<int> unstable_surf_modes() const;
  /// Row index with the largest max_re_surf (or max_re_bulk).
  const DispersionRow& fastest_surf() const;
  const DispersionRow& fastest_bulk() const;
};

/// Per-gamma derivative blocks [[f_u, f_v], [g_u, g_v]] for bulk and surface.
struct ReducedJacobian {
  Mat2 bulk;
  Mat2 surf;
};

/// Per-gamma blocks at the steady state; coupled = true subtracts alpha1, alpha2
/// from the surface diagonal, coupled = false gives the bare kinetics.
ReducedJacobian reduced_jacobian(const KineticParams& p, const CouplingParams& c, bool coupled);

/// Tr(M) and Det(M) of one branch at modal eigenvalue k2.
Quadratic mode_quadratic(const Mat2& per_gamma, double gamma, double d, double k2) noexcept;

inline constexpr int kDefaultLMax = 50;

DispersionTable dispersion_scan(const ReducedJacobian& j, const DiffusionParams& d,
                                const KineticParams& p, int l_max = kDefaultLMax);

/// Open interval of k2 with Det(M) < 0, if any.
struct UnstableBand {
  bool empty = true;
  double lower = 0.0, upper = 0.0;
};

UnstableBand unstable_band(const Mat2& per_gamma, double gamma, double d) noexcept;

struct CriticalDiffusion {
  double value = 0.0;  // +inf when no finite critical ratio exists
  bool finite = false;
  std::string note;
};

/// Larger root d_c of (d f_u + g_v)^2 = 4 d Det with d f_u + g_v > 0.
/// Throws PreconditionError unless Tr < 0 and Det > 0.
CriticalDiffusion critical_diffusion(const Mat2& per_gamma);

/// d f_u + g_v > 0 and (d f_u + g_v)^2 - 4 d Det > 0, per-gamma derivatives.
struct TuringPair {
  Condition first;
  Condition second;
  bool holds() const noexcept { return first.holds() && second.holds(); }
};

TuringPair turing_conditions(const Mat2& per_gamma, double d) noexcept;

enum class Regime { NoPattern, BulkOnly, SurfaceOnly, Both, HomogeneousUnstable };

std::string to_string(Regime r);
Regime regime_from_string(const std::string& s);

/// Stability analysis for one Jacobian evaluation (coupled or bare surface kinetics).
struct RegimeAnalysis {
  ReducedJacobian reduced;
  HomogeneousStability homogeneous;
  TuringPair turing_bulk;
  TuringPair turing_surf;
  CriticalDiffusion dc_bulk;
  CriticalDiffusion dc_surf;
  Regime regime = Regime::NoPattern;
};

struct StabilityReport {
  ModelParams params;
  SteadyState steady;
  double compatibility = 0.0;
  RegimeAnalysis coupled;    // decides the regime
  RegimeAnalysis uncoupled;  // bare surface kinetics, informational
  Regime regime = Regime::NoPattern;
};

RegimeAnalysis analyze_regime(const ModelParams& m, bool coupled);

/// Throws CompatibilityError when the coupling residual is nonzero.
StabilityReport classify_regime(const ModelParams& m);

// Text and CSV serialisation.
void write_report_text(std::ostream& os, const StabilityReport& r);
void write_report_csv(std::ostream& os, const StabilityReport& r);
void write_dispersion_csv(std::ostream& os, const DispersionTable& t);

}  // namespace bsrd
