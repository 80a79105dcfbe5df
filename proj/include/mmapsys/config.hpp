#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "mmapsys/ph.hpp"

namespace mmapsys {

/// Everything describing the single online unit: internal wear, shocks, damage, inspection.
struct OnlineUnitSpec {
  PhDistribution internal;  // (alpha, T)
  Vector Tr0;               // repairable internal exit
  Vector Tnr0;              // non-repairable internal exit
  PhDistribution shock;     // (gamma, L), inter-shock times
  double omega0 = 0.0;      // probability a shock is immediately fatal
  Matrix W;                 // internal phase after a survivable shock
  Vector Wr0;
  Vector Wnr0;
  RowVector damage_init;    // omega
  Matrix damage_matrix;     // substochastic damage chain per shock
  Vector damage_exit;       // D0
  PhDistribution inspection;  // (eta, M)
  int n1 = 1;  // internal phases 1..n1 are minor
  int d1 = 1;  // damage levels 1..d1 are minor

  Index m() const { return internal.order(); }
  Index t() const { return shock.order(); }
  Index d() const { return damage_matrix.rows(); }
  Index eps() const { return inspection.order(); }
  /// Online phase count m*t*d*eps.
  Index online_order() const { return m() * t() * d() * eps(); }

  void validate() const;
};

struct CostBlock {
  double B = 0, C = 0, H = 0, F = 0, G = 0;
  double fcr = 0, fmi = 0, fnu = 0;
  Vector c0;   // per internal phase
  Vector cd;   // per damage level
  Vector cr1;  // per corrective-repair phase
  Vector cr2;  // per PM phase
};

enum class VacationFamily { exponential, erlang2 };

inline const char* family_name(VacationFamily f) {
  return f == VacationFamily::exponential ? "exp" : "erlang2";
}

inline VacationFamily parse_family(const std::string& s) {
  if (s == "exp" || s == "exponential") return VacationFamily::exponential;
  if (s == "erlang2" || s == "erlang") return VacationFamily::erlang2;
  throw ConfigError("unknown vacation family '" + s + "'");
}

inline Index family_dimension(VacationFamily f) { return f == VacationFamily::exponential ? 1 : 2; }

/// Exponential: V=[-a]. Generalized Erlang: upsilon=(1,0), V=[[-a,a],[0,-b]].
inline PhDistribution vacation_from_parameters(VacationFamily f, const Vector& x) {
  if (x.size() != family_dimension(f)) {
    throw DimensionError(std::string("vacation parameters: ") + family_name(f) + " expects " +
                         std::to_string(family_dimension(f)) + " values");
  }
  for (Index i = 0; i < x.size(); ++i) {
    if (!(x(i) > 0.0) || !std::isfinite(x(i))) throw ConfigError("vacation parameters must be positive");
  }
  if (f == VacationFamily::exponential) return exponential_ph(x(0), "vacation");
  RowVector init(2);
  init << 1.0, 0.0;
  Matrix v(2, 2);
  v << -x(0), x(0), 0.0, -x(1);
  return PhDistribution(init, v, "vacation");
}

struct ModelConfig {
  OnlineUnitSpec unit;
  PhDistribution repair1;  // (beta1, S1), corrective
  PhDistribution repair2;  // (beta2, S2), preventive
  PhDistribution vacation; // (upsilon, V)
  VacationFamily family = VacationFamily::erlang2;
  int n = 1;
  int R = 1;
  bool pm = true;
  CostBlock costs;
  Vector vacation_params;  // parameters the vacation was built from

  const PhDistribution& repair(int type) const { return type == 1 ? repair1 : repair2; }

  void set_vacation(const Vector& x) {
    vacation = vacation_from_parameters(family, x);
    vacation_params = x;
  }

  void validate() const;
};

namespace detail {

inline void check_len(const Vector& v, Index n, const std::string& what) {
  if (v.size() != n) {
    throw DimensionError(what + ": expected length " + std::to_string(n) + ", got " +
                         std::to_string(v.size()));
  }
}

inline void check_nonneg(const Matrix& a, const std::string& what) {
  if ((a.array() < -PhDistribution::kTolerance).any()) throw ConfigError(what + ": negative entry");
}

}  // namespace detail

inline void OnlineUnitSpec::validate() const {
  using detail::check_len;
  using detail::check_nonneg;
  const double tol = PhDistribution::kTolerance;
  const Index mm = m();
  check_len(Tr0, mm, "Tr0");
  check_len(Tnr0, mm, "Tnr0");
  check_nonneg(Tr0, "Tr0");
  check_nonneg(Tnr0, "Tnr0");
  const Vector split = internal.subgen() * Vector::Ones(mm) + Tr0 + Tnr0;
  if (split.cwiseAbs().maxCoeff() > tol) throw ConfigError("T*1 + Tr0 + Tnr0 must vanish");

  require_same_dims(W, mm, mm, "W");
  check_len(Wr0, mm, "Wr0");
  check_len(Wnr0, mm, "Wnr0");
  check_nonneg(W, "W");
  check_nonneg(Wr0, "Wr0");
  check_nonneg(Wnr0, "Wnr0");
  const Vector wsum = W * Vector::Ones(mm) + Wr0 + Wnr0;
  if ((wsum.array() - 1.0).abs().maxCoeff() > tol) throw ConfigError("rows of [W Wr0 Wnr0] must sum to 1");

  if (omega0 < 0.0 || omega0 > 1.0) throw ConfigError("omega0 must be a probability");

  const Index dd = damage_matrix.rows();
  if (dd < 1) throw ConfigError("damage chain needs at least one level");
  require_same_dims(damage_matrix, dd, dd, "damage_matrix");
  if (damage_init.size() != dd) throw DimensionError("damage_init length must match damage_matrix");
  check_len(damage_exit, dd, "damage_exit");
  check_nonneg(damage_matrix, "damage_matrix");
  check_nonneg(damage_exit, "damage_exit");
  const Vector dsum = damage_matrix * Vector::Ones(dd) + damage_exit;
  if ((dsum.array() - 1.0).abs().maxCoeff() > tol) throw ConfigError("damage_matrix*1 + D0 must be 1");
  if (std::abs(damage_init(0) - 1.0) > tol || std::abs(damage_init.sum() - 1.0) > tol) {
    throw ConfigError("damage_init must be (1, 0, ...)");
  }

  if (n1 < 1 || n1 > mm) throw ConfigError("n1 must lie in 1..m");
  if (d1 < 1 || d1 > dd) throw ConfigError("d1 must lie in 1..d");
}

inline void ModelConfig::validate() const {
  unit.validate();
  if (n < 1) throw ConfigError("n must be at least 1");
  if (R < 1 || R > n) throw ConfigError("R must lie in 1..n");
  detail::check_len(costs.c0, unit.m(), "c0");
  detail::check_len(costs.cd, unit.d(), "cd");
  detail::check_len(costs.cr1, repair1.order(), "cr1");
  detail::check_len(costs.cr2, repair2.order(), "cr2");
  for (double c : {costs.B, costs.C, costs.H, costs.F, costs.G, costs.fcr, costs.fmi, costs.fnu}) {
    if (c < 0.0) throw ConfigError("scalar costs must be non-negative");
  }
}

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  const Index r = static_cast<Index>(rows.size());
  const Index c = static_cast<Index>(rows.begin()->size());
  Matrix out(r, c);
  Index i = 0;
  for (const auto& row : rows) {
    Index j = 0;
    for (double v : row) out(i, j++) = v;
    ++i;
  }
  return out;
}

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

inline RowVector rowvec(std::initializer_list<double> v) { return vec(v).transpose(); }

/// Optimum Erlang vacation parameters reported for the four-unit, R=3 system.
inline Vector reference_erlang_parameters() { return vec({0.8297104, 0.8297099}); }

/// The numerical example: four units, R=3, PM on, Erlang vacation at the reported optimum.
inline ModelConfig reference_config() {
  ModelConfig c;
  OnlineUnitSpec& u = c.unit;
  u.internal = PhDistribution(rowvec({1, 0, 0, 0}),
                              mat({{-0.04, 0.02, 0, 0}, {0, -0.03, 0.02, 0}, {0, 0, -0.1, 0.04}, {0, 0, 0, -0.4}}),
                              "internal");
  u.Tr0 = vec({0.016, 0.008, 0.048, 0.32});
  u.Tnr0 = vec({0.004, 0.002, 0.012, 0.08});
  u.shock = PhDistribution(rowvec({1, 0}), mat({{-0.1, 0.06}, {0, -0.5}}), "shock");
  u.omega0 = 0.2;
  u.W = mat({{0.1, 0.05, 0.2, 0.05}, {0, 0.05, 0.2, 0.05}, {0, 0, 0.2, 0.05}, {0, 0, 0, 0.05}});
  u.Wr0 = vec({0.6, 0.6, 0.65, 0.65});
  u.Wnr0 = vec({0, 0.1, 0.1, 0.3});
  u.damage_init = rowvec({1, 0});
  u.damage_matrix = mat({{0, 1}, {0, 0}});
  u.damage_exit = vec({0, 1});
  u.inspection = PhDistribution(rowvec({1, 0}), mat({{-0.2, 0.15}, {0.5, -0.6}}), "inspection");
  u.n1 = 2;
  u.d1 = 1;
  c.repair1 = PhDistribution(rowvec({1, 0, 0}), mat({{-0.8, 0.5, 0.2}, {0.3, -0.8, 0.4}, {0.4, 0.1, -0.7}}),
                             "corrective");
  c.repair2 = PhDistribution(rowvec({1, 0, 0}), mat({{-0.8, 0.2, 0.05}, {0.05, -0.9, 0.2}, {0.1, 0.1, -0.8}}),
                             "preventive");
  c.family = VacationFamily::erlang2;
  c.set_vacation(reference_erlang_parameters());
  c.n = 4;
  c.R = 3;
  c.pm = true;
  CostBlock& k = c.costs;
  k.B = 70;
  k.C = 70;
  k.H = 20;
  k.F = 4;
  k.G = 5;
  k.fcr = 10;
  k.fmi = 4;
  k.fnu = 150;
  k.c0 = vec({6, 14, 32, 42});
  k.cd = vec({1, 2});
  k.cr1 = vec({20, 20, 20});
  k.cr2 = vec({10, 10, 10});
  c.validate();
  return c;
}

}  // namespace mmapsys
