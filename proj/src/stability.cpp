#include "bsrd/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bsrd/errors.hpp"

namespace bsrd {

namespace {

// Magnitudes of the terms behind Tr and Det, used to size the marginal band.
double trace_scale(const Mat2& m) { return std::abs(m.a11) + std::abs(m.a22); }
double det_scale(const Mat2& m) { return std::abs(m.a11 * m.a22) + std::abs(m.a12 * m.a21); }

}  // namespace

QuarticCoeffs quartic_coeffs(const JacobianBlocks& j) noexcept {
  const double tb = j.j_bulk.trace(), ts = j.j_surf.trace();
  const double db = j.j_bulk.det(), ds = j.j_surf.det();
  return {-(tb + ts), db + ds + tb * ts, -(db * ts + ds * tb), db * ds};
}

std::array<Quadratic, 2> quartic_factors(const JacobianBlocks& j) noexcept {
  return {Quadratic{-j.j_bulk.trace(), j.j_bulk.det()},
          Quadratic{-j.j_surf.trace(), j.j_surf.det()}};
}

QuarticCoeffs expand(const Quadratic& p, const Quadratic& q) noexcept {
  return {p.b + q.b, p.c + q.c + p.b * q.b, p.b * q.c + p.c * q.b, p.c * q.c};
}

std::array<std::complex<double>, 2> quadratic_roots(const Quadratic& q) noexcept {
  using C = std::complex<double>;
  const double disc = q.b * q.b - 4.0 * q.c;
  if (disc < 0.0) {
    const double re = -0.5 * q.b;
    const double im = 0.5 * std::sqrt(-disc);
    return {C(re, im), C(re, -im)};
  }
  const double sq = std::sqrt(disc);
  const double t = -0.5 * (q.b + std::copysign(sq, q.b));
  if (t == 0.0) return {C(0.0), C(0.0)};
  const double r1 = t;
  const double r2 = q.c / t;
  return {C(std::max(r1, r2)), C(std::min(r1, r2))};
}

Condition positive(double value, double scale) noexcept {
  Condition c;
  c.value = value;
  c.scale = scale;
  if (std::abs(value) <= kMarginalRel * scale) {
    c.outcome = Outcome::Marginal;
  } else {
    c.outcome = value > 0.0 ? Outcome::Holds : Outcome::Fails;
  }
  return c;
}

bool HomogeneousStability::all_hold() const noexcept {
  return std::all_of(cond.begin(), cond.end(), [](const Condition& c) { return c.holds(); });
}

double HomogeneousStability::max_real_eigenvalue() const noexcept {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& e : eigenvalues) m = std::max(m, e.real());
  return m;
}

HomogeneousStability routh_hurwitz(const JacobianBlocks& j) noexcept {
  HomogeneousStability h;
  const Mat2& B = j.j_bulk;
  const Mat2& S = j.j_surf;
  const double to = B.trace(), tg = S.trace(), t = to + tg;
  const double dO = B.det(), dG = S.det();
  h.trace_bulk = to;
  h.trace_surf = tg;
  h.trace_full = t;
  h.det_bulk = dO;
  h.det_surf = dG;
  h.coeffs = quartic_coeffs(j);

  const double sto = trace_scale(B), stg = trace_scale(S), st = sto + stg;
  const double sdo = det_scale(B), sdg = det_scale(S);

  h.cond[0] = positive(-t, st);
  h.cond[1] = positive(dO + dG + to * tg, sdo + sdg + sto * stg);
  h.cond[2] = positive(-(dO * tg + dG * to), sdo * stg + sdg * sto);
  h.cond[3] = positive(dO * dG, sdo * sdg);
  // a1 a2 - a3
  h.cond[4] = positive(-(to * tg * t + dO * to + dG * tg), sto * stg * st + sdo * sto + sdg * stg);
  // a3 (a1 a2 - a3) - a1^2 a4
  h.cond[5] = positive(to * tg * ((dO - dG) * (dO - dG) + (dO * tg + dG * to) * t),
                       sto * stg * ((sdo + sdg) * (sdo + sdg) + (sdo * stg + sdg * sto) * st));

  h.cond5_quoted = positive((tg * t - 2.0 * dO) * to + (to * t - 2.0 * dG) * tg,
                            (stg * st + 2.0 * sdo) * sto + (sto * st + 2.0 * sdg) * stg);
  h.cond6_quoted = positive(((dO + dG) * (dO + dG) - (dO * tg + dG * to) * t) * to * tg,
                            ((sdo + sdg) * (sdo + sdg) + (sdo * stg + sdg * sto) * st) * sto * stg);

  h.zero_root = (h.coeffs.a4 == 0.0);

  const auto f = quartic_factors(j);
  const auto rb = quadratic_roots(f[0]);
  const auto rs = quadratic_roots(f[1]);
  h.eigenvalues = {rb[0], rb[1], rs[0], rs[1]};
  return h;
}

std::vector<int> DispersionTable::unstable_bulk_modes() const {
  std::vector<int> out;
  for (const auto& r : rows)
    if (r.max_re_bulk > 0.0) out.push_back(r.l);
  return out;
}

std::vector<int> DispersionTable::unstable_surf_modes() const {
  std::vector<int> out;
  for (const auto& r : rows)
    if (r.max_re_surf > 0.0) out.push_back(r.l);
  return out;
}

const DispersionRow& DispersionTable::fastest_surf() const {
  if (rows.empty()) throw PreconditionError("empty dispersion table");
  return *std::max_element(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.max_re_surf < b.max_re_surf;
  });
}

const DispersionRow& DispersionTable::fastest_bulk() const {
  if (rows.empty()) throw PreconditionError("empty dispersion table");
  return *std::max_element(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.max_re_bulk < b.max_re_bulk;
  });
}

ReducedJacobian reduced_jacobian(const KineticParams& p, const CouplingParams& c, bool coupled) {
  const SteadyState w = steady_state(p);
  ReducedJacobian j;
  j.bulk = reaction_derivatives(w.u, w.v);
  j.surf = reaction_derivatives(w.r, w.s);
  if (coupled) {
    j.surf.a11 -= c.alpha1;
    j.surf.a22 -= c.alpha2;
  }
  return j;
}

Quadratic mode_quadratic(const Mat2& j, double gamma, double d, double k2) noexcept {
  const double tr = (d + 1.0) * k2 - gamma * j.trace();
  const double det = d * k2 * k2 - gamma * (d * j.a11 + j.a22) * k2 + gamma * gamma * j.det();
  return {tr, det};
}

DispersionTable dispersion_scan(const ReducedJacobian& j, const DiffusionParams& d,
                                const KineticParams& p, int l_max) {
  if (l_max < 0) throw PreconditionError("l_max must be >= 0");
  DispersionTable t;
  t.rows.resize(static_cast<std::size_t>(l_max) + 1);
  // Modes are independent; each row is written by exactly one iteration.
#pragma omp parallel for schedule(static)
  for (int l = 0; l <= l_max; ++l) {
    DispersionRow& row = t.rows[static_cast<std::size_t>(l)];
    row.l = l;
    row.k2 = static_cast<long long>(l) * (l + 1);
    const double k2 = static_cast<double>(row.k2);
    row.lambda_bulk = quadratic_roots(mode_quadratic(j.bulk, p.gamma_bulk, d.d_bulk, k2));
    row.lambda_surf = quadratic_roots(mode_quadratic(j.surf, p.gamma_surf, d.d_surf, k2));
    row.max_re_bulk = std::max(row.lambda_bulk[0].real(), row.lambda_bulk[1].real());
    row.max_re_surf = std::max(row.lambda_surf[0].real(), row.lambda_surf[1].real());
  }
  return t;
}

UnstableBand unstable_band(const Mat2& j, double gamma, double d) noexcept {
  // Det(M)(k2) = d k2^2 - gamma (d f_u + g_v) k2 + gamma^2 Det
  const auto roots = quadratic_roots(
      Quadratic{-gamma * (d * j.a11 + j.a22) / d, gamma * gamma * j.det() / d});
  UnstableBand band;
  if (roots[0].imag() != 0.0) return band;
  const double hi = roots[0].real(), lo = roots[1].real();
  if (hi <= 0.0 || hi == lo) return band;
  band.empty = false;
  band.lower = std::max(lo, 0.0);
  band.upper = hi;
  return band;
}

CriticalDiffusion critical_diffusion(const Mat2& j) {
  const double tr = j.trace(), det = j.det();
  if (!(tr < 0.0) || !(det > 0.0)) {
    throw PreconditionError(
        "critical diffusion requires f_u + g_v < 0 and f_u g_v - f_v g_u > 0 "
        "(Tr = " + std::to_string(tr) + ", Det = " + std::to_string(det) + ")");
  }
  CriticalDiffusion out;
  const double fu = j.a11, gv = j.a22;
  if (fu <= 0.0) {
    out.value = std::numeric_limits<double>::infinity();
    out.finite = false;
    out.note = "f_u <= 0: d f_u + g_v < 0 for every d > 0, no finite critical ratio";
    return out;
  }
  // fu^2 d^2 + (2 fu gv - 4 Det) d + gv^2 = 0, larger root
  const double A = fu * fu;
  const double B = 2.0 * fu * gv - 4.0 * det;
  const double C = gv * gv;
  const double disc = B * B - 4.0 * A * C;
  if (disc < 0.0) {
    out.value = std::numeric_limits<double>::infinity();
    out.note = "discriminant condition never holds";
    return out;
  }
  // B < 0 here (gv < 0 < fu, det > 0), so -B + sqrt(disc) has no cancellation.
  out.value = (-B + std::sqrt(disc)) / (2.0 * A);
  out.finite = true;
  return out;
}

TuringPair turing_conditions(const Mat2& j, double d) noexcept {
  TuringPair t;
  const double lin = d * j.a11 + j.a22;
  const double lin_scale = std::abs(d * j.a11) + std::abs(j.a22);
  t.first = positive(lin, lin_scale);
  t.second = positive(lin * lin - 4.0 * d * j.det(),
                      lin_scale * lin_scale + 4.0 * d * det_scale(j));
  return t;
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::NoPattern: return "NoPattern";
    case Regime::BulkOnly: return "BulkOnly";
    case Regime::SurfaceOnly: return "SurfaceOnly";
    case Regime::Both: return "Both";
    case Regime::HomogeneousUnstable: return "HomogeneousUnstable";
  }
  return "?";
}

Regime regime_from_string(const std::string& s) {
  for (Regime r : {Regime::NoPattern, Regime::BulkOnly, Regime::SurfaceOnly, Regime::Both,
                   Regime::HomogeneousUnstable}) {
    if (to_string(r) == s) return r;
  }
  throw ParameterError("unknown regime '" + s + "'");
}

namespace {

CriticalDiffusion try_critical(const Mat2& j) {
  try {
    return critical_diffusion(j);
  } catch (const PreconditionError& e) {
    CriticalDiffusion c;
    c.value = std::numeric_limits<double>::quiet_NaN();
    c.note = e.what();
    return c;
  }
}

}  // namespace

RegimeAnalysis analyze_regime(const ModelParams& m, bool coupled) {
  RegimeAnalysis a;
  const SteadyState w = steady_state(m.kinetics);
  a.reduced = reduced_jacobian(m.kinetics, m.coupling, coupled);

  JacobianBlocks jb = jacobian_at(m.kinetics, m.coupling, w);
  if (!coupled) jb.j_surf = a.reduced.surf.scaled(m.kinetics.gamma_surf);
  a.homogeneous = routh_hurwitz(jb);

  a.turing_bulk = turing_conditions(a.reduced.bulk, m.diffusion.d_bulk);
  a.turing_surf = turing_conditions(a.reduced.surf, m.diffusion.d_surf);
  a.dc_bulk = try_critical(a.reduced.bulk);
  a.dc_surf = try_critical(a.reduced.surf);

  if (!a.homogeneous.all_hold()) {
    a.regime = Regime::HomogeneousUnstable;
  } else {
    const bool bulk = a.turing_bulk.holds();
    const bool surf = a.turing_surf.holds();
    a.regime = bulk && surf ? Regime::Both
               : bulk       ? Regime::BulkOnly
               : surf       ? Regime::SurfaceOnly
                            : Regime::NoPattern;
  }
  return a;
}

StabilityReport classify_regime(const ModelParams& m) {
  validate(m);
  require_compatible(m.kinetics, m.coupling);
  StabilityReport r;
  r.params = m;
  r.steady = steady_state(m.kinetics);
  r.compatibility = compatibility_residual(m.coupling);
  r.coupled = analyze_regime(m, true);
  r.uncoupled = analyze_regime(m, false);
  r.regime = r.coupled.regime;
  return r;
}

}  // namespace bsrd
