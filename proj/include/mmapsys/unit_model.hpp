#pragma once

#include "mmapsys/config.hpp"

namespace mmapsys {

struct Selectors {
  Matrix U1, U2, V1, V2;
};

/// Minor/major indicator diagonals. Internal phases 1..n1 and damage levels 1..d1 are minor;
/// the remaining indices are major.
inline Selectors build_selectors(const OnlineUnitSpec& spec) {
  Selectors s;
  const Index m = spec.m();
  const Index d = spec.d();
  s.U1 = Matrix::Zero(m, m);
  s.U2 = Matrix::Zero(m, m);
  for (Index i = 0; i < m; ++i) (i < spec.n1 ? s.U1 : s.U2)(i, i) = 1.0;
  s.V1 = Matrix::Zero(d, d);
  s.V2 = Matrix::Zero(d, d);
  for (Index h = 0; h < d; ++h) (h < spec.d1 ? s.V1 : s.V2)(h, h) = 1.0;
  return s;
}

namespace detail {

/// Reinitialization factor: the init row when a spare goes online, a ones column (collapse) otherwise.
struct Restart {
  Matrix alpha, omega, eta;
};

inline Restart restart_factors(const OnlineUnitSpec& spec, bool has_spare) {
  if (has_spare) {
    return {spec.internal.init_row(), Matrix(spec.damage_init), spec.inspection.init_row()};
  }
  return {Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Ones(1, 1)};
}

/// L0*gamma, the shock clock's renewal jump.
inline Matrix shock_jump(const OnlineUnitSpec& spec) { return spec.shock.exit_col() * spec.shock.init_row(); }

}  // namespace detail

/// Transitions of the online unit that trigger no event.
inline Matrix build_H0(const OnlineUnitSpec& spec, bool pm) {
  const Index t = spec.t(), d = spec.d(), e = spec.eps();
  const Selectors sel = build_selectors(spec);
  const Matrix shock = detail::shock_jump(spec) * (1.0 - spec.omega0);
  const Matrix M0eta = spec.inspection.exit_col() * spec.inspection.init_row();
  Matrix h0 = kron(kron_sum(spec.internal.subgen(), spec.shock.subgen()), identity(d), identity(e)) +
              kron(identity(spec.m()), identity(t), identity(d), spec.inspection.subgen()) +
              kron(spec.W, shock, spec.damage_matrix, identity(e));
  if (pm) {
    h0 += kron(sel.U1, identity(t), sel.V1, M0eta);
  } else {
    h0 += kron(identity(spec.m()), identity(t), identity(d), M0eta);
  }
  return h0;
}

/// Repairable failure. Without a spare the result keeps only the shock phase (t columns).
inline Matrix build_HA(const OnlineUnitSpec& spec, bool has_spare) {
  const auto r = detail::restart_factors(spec, has_spare);
  const Index t = spec.t(), d = spec.d(), e = spec.eps();
  const Matrix shock = detail::shock_jump(spec) * (1.0 - spec.omega0);
  const Matrix survive = spec.damage_matrix * ones_col(d);
  return kron(kron(spec.Tr0 * r.alpha, identity(t), ones_col(d) * r.omega) +
                  kron(spec.Wr0 * r.alpha, shock, survive * r.omega),
              ones_col(e) * r.eta);
}

/// Positive inspection (major damage found), sending the unit to preventive maintenance.
inline Matrix build_HB(const OnlineUnitSpec& spec, bool has_spare, bool pm) {
  const auto r = detail::restart_factors(spec, has_spare);
  const Index m = spec.m(), t = spec.t(), d = spec.d(), e = spec.eps();
  if (!pm) {
    return Matrix::Zero(m * t * d * e, r.alpha.cols() * t * r.omega.cols() * r.eta.cols());
  }
  const Selectors sel = build_selectors(spec);
  const Matrix M0eta = spec.inspection.exit_col() * r.eta;
  return kron(sel.U2 * ones_col(m) * r.alpha, identity(t), ones_col(d) * r.omega, M0eta) +
         kron(sel.U1 * ones_col(m) * r.alpha, identity(t), sel.V2 * ones_col(d) * r.omega, M0eta);
}

/// Non-repairable failure.
inline Matrix build_HC(const OnlineUnitSpec& spec, bool has_spare) {
  const auto r = detail::restart_factors(spec, has_spare);
  const Index m = spec.m(), t = spec.t(), d = spec.d(), e = spec.eps();
  const Matrix jump = detail::shock_jump(spec);
  const Matrix survive = spec.damage_matrix * ones_col(d);
  const Matrix one_alpha = ones_col(m) * r.alpha;
  return kron(kron(spec.Tnr0 * r.alpha, identity(t), ones_col(d) * r.omega) +
                  kron(spec.Wnr0 * r.alpha, jump * (1.0 - spec.omega0), survive * r.omega) +
                  kron(one_alpha, jump * (1.0 - spec.omega0), spec.damage_exit * r.omega) +
                  kron(one_alpha, jump * spec.omega0, ones_col(d) * r.omega),
              ones_col(e) * r.eta);
}

/// theta = alpha ⊗ I ⊗ omega ⊗ eta: a repaired unit fills an empty online place.
inline Matrix build_theta(const OnlineUnitSpec& spec) {
  return kron(spec.internal.init_row(), identity(spec.t()), Matrix(spec.damage_init),
              spec.inspection.init_row());
}

struct UnitBlocks {
  Matrix H0, HA, HB, HC;
  Matrix HA_p, HB_p, HC_p;
  Matrix theta;
  Matrix shock_renewal;  // L + L0*gamma, the only clock running while every unit is down
  bool pm = true;
};

inline UnitBlocks build_unit_blocks(const OnlineUnitSpec& spec, bool pm) {
  UnitBlocks b;
  b.pm = pm;
  b.H0 = build_H0(spec, pm);
  b.HA = build_HA(spec, true);
  b.HB = build_HB(spec, true, pm);
  b.HC = build_HC(spec, true);
  b.HA_p = build_HA(spec, false);
  b.HB_p = build_HB(spec, false, pm);
  b.HC_p = build_HC(spec, false);
  b.theta = build_theta(spec);
  b.shock_renewal = spec.shock.renewal_generator();
  return b;
}

}  // namespace mmapsys
