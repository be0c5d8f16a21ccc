#include "bsrd/coupled_system.hpp"

#include <algorithm>

#include "bsrd/errors.hpp"

namespace bsrd {

std::vector<double> pack(const SystemState& st) {
  std::vector<double> y;
  y.reserve(st.u.size() + st.v.size() + st.r.size() + st.s.size());
  y.insert(y.end(), st.u.begin(), st.u.end());
  y.insert(y.end(), st.v.begin(), st.v.end());
  y.insert(y.end(), st.r.begin(), st.r.end());
  y.insert(y.end(), st.s.begin(), st.s.end());
  return y;
}

void unpack(const std::vector<double>& y, int nb, int ns, SystemState& st) {
  if (static_cast<long long>(y.size()) != 2LL * nb + 2LL * ns)
    throw PreconditionError("packed state has " + std::to_string(y.size()) + " entries, expected " +
                            std::to_string(2LL * nb + 2LL * ns));
  auto it = y.begin();
  st.u.assign(it, it + nb);
  it += nb;
  st.v.assign(it, it + nb);
  it += nb;
  st.r.assign(it, it + ns);
  it += ns;
  st.s.assign(it, it + ns);
}

BulkSurfaceSystem::BulkSurfaceSystem(const CoupledSystemOperators& ops, const ModelParams& params,
                                     SystemOptions opts)
    : params_(params), opts_(opts), nb_(ops.num_bulk()), ns_(ops.num_surface()) {
  validate(params_);
  if (opts_.kinetics == KineticsMode::Linearized) steady_ = steady_state(params_.kinetics);

  const int U = 0, V = nb_, R = 2 * nb_, S = 2 * nb_ + ns_;
  const int n = size();
  const auto& c = params_.coupling;
  const double gs = params_.kinetics.gamma_surf;
  const auto& ids = ops.surface_vertex_ids;

  std::vector<Triplet> lin;
  auto add_block = [&](const CsrMatrix& m, double coef, int roff, int coff, bool rows_bulk,
                       bool cols_bulk) {
    if (coef == 0.0) return;
    for (int i = 0; i < m.rows; ++i)
      for (int p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p) {
        const int j = m.col_idx[p];
        const int gi = roff + (rows_bulk ? ids[i] : i);
        const int gj = coff + (cols_bulk ? ids[j] : j);
        lin.push_back({gi, gj, coef * m.values[p]});
      }
  };
  auto add_bulk = [&](const CsrMatrix& m, double coef, int off) {
    for (int i = 0; i < m.rows; ++i)
      for (int p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p)
        lin.push_back({off + i, off + m.col_idx[p], coef * m.values[p]});
  };

  // Bulk rows: diffusion plus gamma_surf * trace-mass * h (Robin flux).
  add_bulk(ops.stiffness_bulk, -1.0, U);
  add_block(ops.mass_trace, -gs * c.beta1, U, U, true, true);
  add_block(ops.mass_trace, -gs * c.kappa1, U, V, true, true);
  add_block(ops.mass_trace, gs * c.alpha1, U, R, true, false);
  add_bulk(ops.stiffness_bulk, -params_.diffusion.d_bulk, V);
  add_block(ops.mass_trace, -gs * c.beta2, V, U, true, true);
  add_block(ops.mass_trace, -gs * c.kappa2, V, V, true, true);
  add_block(ops.mass_trace, gs * c.alpha2, V, S, true, false);
  // Surface rows: Laplace-Beltrami minus gamma_surf * mass * h.
  add_block(ops.stiffness_surf, -1.0, R, R, false, false);
  add_block(ops.mass_surf, -gs * c.alpha1, R, R, false, false);
  add_block(ops.mass_surf, gs * c.beta1, R, U, false, true);
  add_block(ops.mass_surf, gs * c.kappa1, R, V, false, true);
  add_block(ops.stiffness_surf, -params_.diffusion.d_surf, S, S, false, false);
  add_block(ops.mass_surf, -gs * c.alpha2, S, S, false, false);
  add_block(ops.mass_surf, gs * c.beta2, S, U, false, true);
  add_block(ops.mass_surf, gs * c.kappa2, S, V, false, true);
  linear_ = from_triplets(n, n, lin);

  const auto mb = row_sums(ops.mass_bulk);
  const auto ms = row_sums(ops.mass_surf);
  lumped_.resize(static_cast<std::size_t>(n));
  std::copy(mb.begin(), mb.end(), lumped_.begin() + U);
  std::copy(mb.begin(), mb.end(), lumped_.begin() + V);
  std::copy(ms.begin(), ms.end(), lumped_.begin() + R);
  std::copy(ms.begin(), ms.end(), lumped_.begin() + S);

  std::vector<Triplet> mt;
  if (opts_.lumped_mass) {
    for (int i = 0; i < n; ++i) mt.push_back({i, i, lumped_[i]});
  } else {
    auto add_mass = [&](const CsrMatrix& m, int off) {
      for (int i = 0; i < m.rows; ++i)
        for (int p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p)
          mt.push_back({off + i, off + m.col_idx[p], m.values[p]});
    };
    add_mass(ops.mass_bulk, U);
    add_mass(ops.mass_bulk, V);
    add_mass(ops.mass_surf, R);
    add_mass(ops.mass_surf, S);
  }
  mass_ = from_triplets(n, n, mt);

  // Union pattern for Newton matrices: L, M and the nodal 2x2 kinetic blocks.
  std::vector<Triplet> all;
  all.reserve(lin.size() + mt.size() + 4 * static_cast<std::size_t>(nb_ + ns_));
  for (const auto& t : lin) all.push_back({t.row, t.col, 0.0});
  for (const auto& t : mt) all.push_back({t.row, t.col, 0.0});
  auto node_pairs = [&](auto&& fn) {
    for (int i = 0; i < nb_; ++i) fn(U + i, V + i);
    for (int j = 0; j < ns_; ++j) fn(R + j, S + j);
  };
  node_pairs([&](int a, int b) {
    all.push_back({a, a, 0.0});
    all.push_back({a, b, 0.0});
    all.push_back({b, a, 0.0});
    all.push_back({b, b, 0.0});
  });
  newton_ = from_triplets(n, n, all);
  auto on_pattern = [&](const CsrMatrix& m) {
    std::vector<double> v(newton_.values.size(), 0.0);
    for (int i = 0; i < m.rows; ++i)
      for (int p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p)
        v[static_cast<std::size_t>(newton_.find(i, m.col_idx[p]))] = m.values[p];
    return v;
  };
  linear_on_pattern_ = on_pattern(linear_);
  mass_on_pattern_ = on_pattern(mass_);
  node_pairs([&](int a, int b) {
    kin_pos_.push_back({newton_.find(a, a), newton_.find(a, b), newton_.find(b, a),
                        newton_.find(b, b)});
  });
}

void BulkSurfaceSystem::kinetic_terms(const std::vector<double>& y, std::vector<double>& f) const {
  if (opts_.kinetics == KineticsMode::Off) return;
  const auto& k = params_.kinetics;
  const int total = nb_ + ns_;
#pragma omp parallel for schedule(static)
  for (int node = 0; node < total; ++node) {
    const bool bulk = node < nb_;
    const int a = bulk ? node : 2 * nb_ + (node - nb_);
    const int b = bulk ? nb_ + node : 2 * nb_ + ns_ + (node - nb_);
    const double scale = (bulk ? k.gamma_bulk : k.gamma_surf) * lumped_[a];
    const double p = y[a], q = y[b];
    double fa, fb;
    if (opts_.kinetics == KineticsMode::Nonlinear) {
      fa = reaction_f(k.a, p, q);
      fb = reaction_g(k.b, p, q);
    } else {
      const double p0 = bulk ? steady_.u : steady_.r;
      const double q0 = bulk ? steady_.v : steady_.s;
      const Mat2 j = reaction_derivatives(p0, q0);
      fa = reaction_f(k.a, p0, q0) + j.a11 * (p - p0) + j.a12 * (q - q0);
      fb = reaction_g(k.b, p0, q0) + j.a21 * (p - p0) + j.a22 * (q - q0);
    }
    f[a] += scale * fa;
    f[b] += scale * fb;
  }
}

void BulkSurfaceSystem::rhs(const std::vector<double>& y, std::vector<double>& f) {
  if (static_cast<int>(y.size()) != size())
    throw PreconditionError("state size mismatch in rhs evaluation");
  f.resize(y.size());
  spmv_omp(linear_, y.data(), f.data());
  kinetic_terms(y, f);
}

void BulkSurfaceSystem::apply_mass(const std::vector<double>& x, std::vector<double>& out) {
  out.resize(x.size());
  spmv_omp(mass_, x.data(), out.data());
}

const CsrMatrix& BulkSurfaceSystem::newton_matrix(const std::vector<double>& y, double mass_coef,
                                                  double rhs_coef) {
  auto& v = newton_.values;
  const std::size_t nnz = v.size();
  for (std::size_t p = 0; p < nnz; ++p)
    v[p] = mass_coef * mass_on_pattern_[p] - rhs_coef * linear_on_pattern_[p];
  if (opts_.kinetics == KineticsMode::Off) return newton_;
  const auto& k = params_.kinetics;
  const int total = nb_ + ns_;
  for (int node = 0; node < total; ++node) {
    const bool bulk = node < nb_;
    const int a = bulk ? node : 2 * nb_ + (node - nb_);
    const int b = bulk ? nb_ + node : 2 * nb_ + ns_ + (node - nb_);
    const double scale = (bulk ? k.gamma_bulk : k.gamma_surf) * lumped_[a];
    const Mat2 j = opts_.kinetics == KineticsMode::Nonlinear
                       ? reaction_derivatives(y[a], y[b])
                       : (bulk ? reaction_derivatives(steady_.u, steady_.v)
                               : reaction_derivatives(steady_.r, steady_.s));
    const auto& pos = kin_pos_[static_cast<std::size_t>(node)];
    v[pos[0]] -= rhs_coef * scale * j.a11;
    v[pos[1]] -= rhs_coef * scale * j.a12;
    v[pos[2]] -= rhs_coef * scale * j.a21;
    v[pos[3]] -= rhs_coef * scale * j.a22;
  }
  return newton_;
}

SystemState step(const SystemState& state, const CoupledSystemOperators& ops,
                 const ModelParams& params, const SchemeConfig& scheme) {
  BulkSurfaceSystem sys(ops, params);
  FractionalStepTheta integrator(sys, scheme);
  auto y = pack(state);
  if (static_cast<int>(y.size()) != sys.size() ||
      static_cast<int>(state.u.size()) != sys.num_bulk() ||
      static_cast<int>(state.r.size()) != sys.num_surface())
    throw PreconditionError("state sizes do not match the operators");
  integrator.advance(y, scheme.dt);
  SystemState out;
  unpack(y, sys.num_bulk(), sys.num_surface(), out);
  out.t = state.t + scheme.dt;
  return out;
}

}  // namespace bsrd
