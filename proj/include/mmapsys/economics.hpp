#pragma once

#include "mmapsys/measures.hpp"

namespace mmapsys {

struct RewardVectors {
  Vector nr;  // online-unit rewards and costs
  Vector nc;  // repair facility cost
  Vector c() const { return nr - nc; }
};

/// Net reward per phase. Operational: (B - presence cost) - c0 ⊗ 1 - 1 ⊗ cd ⊗ 1.
/// All units down: -(C + presence cost).
inline Vector build_nr(const ModelConfig& cfg, const StateSpaceLayout& layout) {
  const auto& k = cfg.costs;
  const Index t = layout.t(), d = layout.d(), e = layout.eps(), m = layout.m();
  Vector nr(layout.dimension());
  for (const auto& ms : layout.states()) {
    const double presence = ms.key.x == Presence::nv ? k.H : k.F;
    const Index f = ms.facility;
    Matrix block;
    if (ms.key.s < ms.key.k) {
      block = (k.B - presence) * ones_col(ms.count()) - kron(Matrix(k.c0), ones_col(t * d * e * f)) -
              kron(ones_col(m * t), Matrix(k.cd), ones_col(e * f));
    } else {
      block = -(k.C + presence) * ones_col(ms.count());
    }
    nr.segment(ms.offset, ms.count()) = block.col(0);
  }
  return nr;
}

/// Repair cost per phase: 1 ⊗ cr_head while the repairperson serves, zero otherwise.
inline Vector build_nc(const ModelConfig& cfg, const StateSpaceLayout& layout) {
  Vector nc = Vector::Zero(layout.dimension());
  for (const auto& ms : layout.states()) {
    if (ms.key.x != Presence::nv || ms.key.s == 0) continue;
    const Vector& cr = ms.key.queue.head() == 1 ? cfg.costs.cr1 : cfg.costs.cr2;
    nc.segment(ms.offset, ms.count()) = kron(ones_col(ms.online), Matrix(cr)).col(0);
  }
  return nc;
}

inline RewardVectors build_rewards(const ModelConfig& cfg, const StateSpaceLayout& layout) {
  return {build_nr(cfg, layout), build_nc(cfg, layout)};
}

struct Profit {
  double phi_w = 0;   // π·nr
  double phi_rf = 0;  // π·nc
  double phi = 0;
};

inline double fixed_costs(const ModelConfig& cfg, const EventRates& r) {
  const auto& k = cfg.costs;
  return r.rep * k.fcr + r.mi * k.fmi + (r.ret + r.retbe) * k.G;
}

/// Φ = Φ_w - Φ_rf - Λ^NS·n·fnu - Λ^rep·fcr - Λ^mi·fmi - (Λ^ret + Λ^retbe)·G.
inline Profit profit_stationary(const RowVector& pi, const RewardVectors& v, const EventRates& r,
                                const ModelConfig& cfg) {
  Profit p;
  p.phi_w = pi.dot(v.nr.transpose());
  p.phi_rf = pi.dot(v.nc.transpose());
  p.phi = p.phi_w - p.phi_rf - r.ns * cfg.n * cfg.costs.fnu - fixed_costs(cfg, r);
  return p;
}

/// Accumulated profit up to t; the initial fleet is charged once at time zero.
inline Profit profit_transient(const RowVector& integral, const RewardVectors& v, const EventRates& counts,
                               const ModelConfig& cfg) {
  Profit p;
  p.phi_w = integral.dot(v.nr.transpose());
  p.phi_rf = integral.dot(v.nc.transpose());
  p.phi = p.phi_w - p.phi_rf - (1.0 + counts.ns) * cfg.n * cfg.costs.fnu - fixed_costs(cfg, counts);
  return p;
}

}  // namespace mmapsys
