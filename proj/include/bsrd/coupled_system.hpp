#pragma once

// Monolithic four-field semi-discrete system on a bulk-surface mesh.
// Unknown layout: [u (bulk), v (bulk), r (surface), s (surface)].

#include <vector>

#include "bsrd/fem.hpp"
#include "bsrd/kinetics.hpp"
#include "bsrd/timestep.hpp"

namespace bsrd {

struct SystemState {
  double t = 0.0;
  std::vector<double> u, v;  // bulk vertices
  std::vector<double> r, s;  // surface DOFs
};

std::vector<double> pack(const SystemState& st);
/// Throws PreconditionError when y does not have 2 nb + 2 ns entries.
void unpack(const std::vector<double>& y, int num_bulk, int num_surface, SystemState& st);

enum class KineticsMode {
  Nonlinear,   // full reaction terms
  Linearized,  // Jacobian at the uniform steady state
  Off,         // diffusion and coupling only
};

struct SystemOptions {
  KineticsMode kinetics = KineticsMode::Nonlinear;
  bool lumped_mass = false;
};

class BulkSurfaceSystem final : public ImplicitSystem {
 public:
  /// Validates the model parameters; Linearized mode also needs the steady state.
  BulkSurfaceSystem(const CoupledSystemOperators& ops, const ModelParams& params,
                    SystemOptions opts = {});

  int size() const override { return 2 * nb_ + 2 * ns_; }
  void rhs(const std::vector<double>& y, std::vector<double>& f) override;
  void apply_mass(const std::vector<double>& x, std::vector<double>& out) override;
  const CsrMatrix& newton_matrix(const std::vector<double>& y, double mass_coef,
                                 double rhs_coef) override;
  const std::vector<double>& residual_weights() const override { return lumped_; }

  int num_bulk() const noexcept { return nb_; }
  int num_surface() const noexcept { return ns_; }
  /// Diffusion and coupling part of F; F(y) = L y + kinetic terms.
  const CsrMatrix& linear_operator() const noexcept { return linear_; }
  /// Block-diagonal mass (consistent or lumped per options).
  const CsrMatrix& mass() const noexcept { return mass_; }

 private:
  void kinetic_terms(const std::vector<double>& y, std::vector<double>& f) const;

  ModelParams params_;
  SystemOptions opts_;
  int nb_ = 0;
  int ns_ = 0;
  SteadyState steady_{};
  CsrMatrix linear_;
  CsrMatrix mass_;
  std::vector<double> lumped_;  // per unknown
  CsrMatrix newton_;            // union pattern
  std::vector<double> linear_on_pattern_, mass_on_pattern_;
  // Positions in newton_ of the nodal 2x2 kinetic Jacobian, per node pair.
  std::vector<std::array<int, 4>> kin_pos_;
};

/// One adaptive step of the full model; builds a system for the call.
SystemState step(const SystemState& state, const CoupledSystemOperators& ops,
                 const ModelParams& params, const SchemeConfig& scheme);

}  // namespace bsrd
