#include <iomanip>
#include <ostream>

#include "bsrd/stability.hpp"

namespace bsrd {

namespace {

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Holds: return "holds";
    case Outcome::Fails: return "fails";
    case Outcome::Marginal: return "marginal";
  }
  return "?";
}

constexpr const char* kCondLabels[6] = {
    "a1 = -Tr(J) > 0",
    "Det_O + Det_G + Tr_O Tr_G > 0",
    "a3 = -(Det_O Tr_G + Det_G Tr_O) > 0",
    "Det_O Det_G > 0",
    "a1 a2 - a3 > 0",
    "a3 (a1 a2 - a3) - a1^2 a4 > 0",
};

void text_block(std::ostream& os, const char* title, const RegimeAnalysis& a,
                const DiffusionParams& d) {
  const auto& h = a.homogeneous;
  os << "== " << title << " ==\n";
  os << "  per-gamma bulk  [f_u f_v; g_u g_v] = [" << a.reduced.bulk.a11 << ' '
     << a.reduced.bulk.a12 << "; " << a.reduced.bulk.a21 << ' ' << a.reduced.bulk.a22 << "]\n";
  os << "  per-gamma surf  [f_r f_s; g_r g_s] = [" << a.reduced.surf.a11 << ' '
     << a.reduced.surf.a12 << "; " << a.reduced.surf.a21 << ' ' << a.reduced.surf.a22 << "]\n";
  os << "  Tr = " << h.trace_full << "  Tr_O = " << h.trace_bulk << "  Tr_G = " << h.trace_surf
     << "  Det_O = " << h.det_bulk << "  Det_G = " << h.det_surf << '\n';
  os << "  quartic a1..a4 = " << h.coeffs.a1 << ", " << h.coeffs.a2 << ", " << h.coeffs.a3
     << ", " << h.coeffs.a4 << '\n';
  for (int i = 0; i < 6; ++i) {
    os << "  cond" << i + 1 << "  " << std::left << std::setw(34) << kCondLabels[i]
       << std::right << " value = " << std::setw(14) << h.cond[i].value << "  "
       << outcome_name(h.cond[i].outcome) << '\n';
  }
  os << "  cond5 (quoted form) value = " << h.cond5_quoted.value << "  "
     << outcome_name(h.cond5_quoted.outcome) << '\n';
  os << "  cond6 (quoted form) value = " << h.cond6_quoted.value << "  "
     << outcome_name(h.cond6_quoted.outcome) << '\n';
  if (h.zero_root) os << "  marginal: zero eigenvalue (a4 = 0)\n";
  os << "  eigenvalues:";
  for (const auto& e : h.eigenvalues) os << "  " << e.real() << (e.imag() < 0 ? "-" : "+")
                                         << std::abs(e.imag()) << "i";
  os << "\n  max Re(lambda) = " << h.max_real_eigenvalue() << '\n';
  os << "  bulk Turing   (d_O = " << d.d_bulk << "): d f_u + g_v = " << a.turing_bulk.first.value
     << " [" << outcome_name(a.turing_bulk.first.outcome) << "], discriminant = "
     << a.turing_bulk.second.value << " [" << outcome_name(a.turing_bulk.second.outcome)
     << "]\n";
  os << "  surface Turing (d_G = " << d.d_surf << "): d f_r + g_s = "
     << a.turing_surf.first.value << " [" << outcome_name(a.turing_surf.first.outcome)
     << "], discriminant = " << a.turing_surf.second.value << " ["
     << outcome_name(a.turing_surf.second.outcome) << "]\n";
  auto dc = [&](const char* name, const CriticalDiffusion& c) {
    os << "  " << name << " = ";
    if (c.finite) os << std::setprecision(8) << c.value << std::setprecision(6);
    else os << c.value;
    if (!c.note.empty()) os << "  (" << c.note << ")";
    os << '\n';
  };
  dc("d_crit bulk", a.dc_bulk);
  dc("d_crit surface", a.dc_surf);
  os << "  predicted regime: " << to_string(a.regime) << '\n';
}

void csv_block(std::ostream& os, const char* eval, const RegimeAnalysis& a) {
  const auto& h = a.homogeneous;
  auto row = [&](const std::string& name, double value, const std::string& status) {
    os << eval << ',' << name << ',' << value << ',' << status << '\n';
  };
  row("trace_full", h.trace_full, "");
  row("trace_bulk", h.trace_bulk, "");
  row("trace_surf", h.trace_surf, "");
  row("det_bulk", h.det_bulk, "");
  row("det_surf", h.det_surf, "");
  row("a1", h.coeffs.a1, "");
  row("a2", h.coeffs.a2, "");
  row("a3", h.coeffs.a3, "");
  row("a4", h.coeffs.a4, "");
  for (int i = 0; i < 6; ++i)
    row("cond" + std::to_string(i + 1), h.cond[i].value, outcome_name(h.cond[i].outcome));
  row("cond5_quoted", h.cond5_quoted.value, outcome_name(h.cond5_quoted.outcome));
  row("cond6_quoted", h.cond6_quoted.value, outcome_name(h.cond6_quoted.outcome));
  row("zero_root", h.zero_root ? 1.0 : 0.0, h.zero_root ? "marginal" : "");
  for (int i = 0; i < 4; ++i) {
    row("eig" + std::to_string(i + 1) + "_re", h.eigenvalues[i].real(), "");
    row("eig" + std::to_string(i + 1) + "_im", h.eigenvalues[i].imag(), "");
  }
  row("max_re_lambda", h.max_real_eigenvalue(), "");
  row("turing_bulk_linear", a.turing_bulk.first.value, outcome_name(a.turing_bulk.first.outcome));
  row("turing_bulk_discriminant", a.turing_bulk.second.value,
      outcome_name(a.turing_bulk.second.outcome));
  row("turing_surf_linear", a.turing_surf.first.value, outcome_name(a.turing_surf.first.outcome));
  row("turing_surf_discriminant", a.turing_surf.second.value,
      outcome_name(a.turing_surf.second.outcome));
  row("d_crit_bulk", a.dc_bulk.value, a.dc_bulk.finite ? "finite" : "none");
  row("d_crit_surf", a.dc_surf.value, a.dc_surf.finite ? "finite" : "none");
  os << eval << ",regime,," << to_string(a.regime) << '\n';
}

}  // namespace

void write_report_text(std::ostream& os, const StabilityReport& r) {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(6);
  const auto& p = r.params;
  os << "parameters: a = " << p.kinetics.a << ", b = " << p.kinetics.b
     << ", gamma_bulk = " << p.kinetics.gamma_bulk << ", gamma_surf = " << p.kinetics.gamma_surf
     << ", d_bulk = " << p.diffusion.d_bulk << ", d_surf = " << p.diffusion.d_surf << '\n';
  os << "coupling: alpha1 = " << p.coupling.alpha1 << ", alpha2 = " << p.coupling.alpha2
     << ", beta1 = " << p.coupling.beta1 << ", beta2 = " << p.coupling.beta2
     << ", kappa1 = " << p.coupling.kappa1 << ", kappa2 = " << p.coupling.kappa2 << '\n';
  os << "compatibility residual: " << r.compatibility << '\n';
  os << "steady state (u, v, r, s) = (" << r.steady.u << ", " << r.steady.v << ", "
     << r.steady.r << ", " << r.steady.s << ")\n";
  text_block(os, "coupled surface Jacobian", r.coupled, p.diffusion);
  text_block(os, "uncoupled surface kinetics", r.uncoupled, p.diffusion);
  os << "regime: " << to_string(r.regime) << " (uncoupled evaluation: "
     << to_string(r.uncoupled.regime) << ")\n";
  os.flags(flags);
  os.precision(prec);
}

void write_report_csv(std::ostream& os, const StabilityReport& r) {
  const auto prec = os.precision();
  os << std::setprecision(17);
  os << "evaluation,quantity,value,status\n";
  os << "model,compatibility_residual," << r.compatibility << ",\n";
  os << "model,u_star," << r.steady.u << ",\n";
  os << "model,v_star," << r.steady.v << ",\n";
  csv_block(os, "coupled", r.coupled);
  csv_block(os, "uncoupled", r.uncoupled);
  os << "model,regime,," << to_string(r.regime) << '\n';
  os.precision(prec);
}

void write_dispersion_csv(std::ostream& os, const DispersionTable& t) {
  const auto prec = os.precision();
  os << std::setprecision(17);
  os << "l,k2,bulk_re1,bulk_im1,bulk_re2,bulk_im2,surf_re1,surf_im1,surf_re2,surf_im2,"
        "max_re_bulk,max_re_surf\n";
  for (const auto& r : t.rows) {
    os << r.l << ',' << r.k2 << ',' << r.lambda_bulk[0].real() << ',' << r.lambda_bulk[0].imag()
       << ',' << r.lambda_bulk[1].real() << ',' << r.lambda_bulk[1].imag() << ','
       << r.lambda_surf[0].real() << ',' << r.lambda_surf[0].imag() << ','
       << r.lambda_surf[1].real() << ',' << r.lambda_surf[1].imag() << ',' << r.max_re_bulk
       << ',' << r.max_re_surf << '\n';
  }
  os.precision(prec);
}

}  // namespace bsrd
