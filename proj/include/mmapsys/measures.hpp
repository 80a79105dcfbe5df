#pragma once

#include <iomanip>
#include <map>
#include <ostream>
#include <tuple>

#include "mmapsys/solvers.hpp"

namespace mmapsys {

/// Ψ^x_{k,s}: mass (stationary) or expected time (transient) per second-level macro-state.
struct OccupancyTable {
  std::map<std::tuple<int, int, Presence>, double> cells;

  double at(int k, int s, Presence x) const {
    auto it = cells.find({k, s, x});
    return it == cells.end() ? 0.0 : it->second;
  }
  double ks(int k, int s) const { return at(k, s, Presence::v) + at(k, s, Presence::nv); }
  double level(int k) const {
    double sum = 0.0;
    for (const auto& [key, val] : cells) {
      if (std::get<0>(key) == k) sum += val;
    }
    return sum;
  }
  double total() const {
    double sum = 0.0;
    for (const auto& [key, val] : cells) sum += val;
    return sum;
  }
};

inline OccupancyTable occupancy(const RowVector& mass, const StateSpaceLayout& layout) {
  OccupancyTable tab;
  for (const auto& ms : layout.states()) {
    tab.cells[{ms.key.k, ms.key.s, ms.key.x}] += mass.segment(ms.offset, ms.count()).sum();
  }
  return tab;
}

/// 1 minus the mass on every macro-state with all units failed.
inline double availability(const RowVector& p, const StateSpaceLayout& layout) {
  double down = 0.0;
  for (int k = 1; k <= layout.n(); ++k) {
    for (Presence x : {Presence::v, Presence::nv}) {
      if (!layout.has_second_level(k, k, x)) continue;
      const IndexRange r = layout.second_level(k, k, x);
      down += p.segment(r.start, r.count).sum();
    }
  }
  return 1.0 - down;
}

inline double availability_transient(const RowVector& p_t, const StateSpaceLayout& layout) {
  return availability(p_t, layout);
}
inline double availability_stationary(const RowVector& pi, const StateSpaceLayout& layout) {
  return availability(pi, layout);
}

/// Σ_k Σ_{s<k} Ψ_{k,s}.
inline double operational_mass(const OccupancyTable& tab, int n) {
  double sum = 0.0;
  for (int k = 1; k <= n; ++k) {
    for (int s = 0; s < k; ++s) sum += tab.ks(k, s);
  }
  return sum;
}

inline double mean_operational_time(const OccupancyTable& occupancy_t, int n) {
  return operational_mass(occupancy_t, n);
}

/// Rates (stationary) or cumulative counts (transient) of the grouped events.
struct EventRates {
  double rep = 0, mi = 0, nr = 0, ret = 0, retbe = 0, after = 0, ns = 0;
};

/// Per-label flows mass·D^Y·1.
inline std::array<double, 9> label_flows(const RowVector& mass, const MmapGenerators& g) {
  std::array<double, 9> out{};
  for (Event e : kAllEvents) {
    out[static_cast<size_t>(e)] = e == Event::O ? 0.0 : (mass * g[e]).sum();
  }
  return out;
}

inline EventRates group_rates(const std::array<double, 9>& f) {
  auto at = [&](Event e) { return f[static_cast<size_t>(e)]; };
  EventRates r;
  r.rep = at(Event::A);
  r.mi = at(Event::B);
  r.nr = at(Event::C) + at(Event::CD) + at(Event::NS);
  r.ret = at(Event::D) + at(Event::CD);
  r.retbe = at(Event::E);
  r.after = at(Event::F);
  r.ns = at(Event::NS);
  return r;
}

inline EventRates event_rates_stationary(const RowVector& pi, const MmapGenerators& g) {
  return group_rates(label_flows(pi, g));
}

/// Cumulative counts up to t from the precomputed ∫_0^t p.
inline EventRates event_counts_transient(const RowVector& integral, const MmapGenerators& g) {
  return group_rates(label_flows(integral, g));
}

inline void write_occupancy_csv(std::ostream& os, const OccupancyTable& tab) {
  os << "k,s,x,psi\n" << std::setprecision(6);
  for (auto it = tab.cells.rbegin(); it != tab.cells.rend(); ++it) {
    const auto& [key, val] = *it;
    os << std::get<0>(key) << ',' << std::get<1>(key) << ',' << presence_name(std::get<2>(key)) << ',' << val
       << '\n';
  }
}

inline void write_rates_csv(std::ostream& os, double avail, const EventRates& r) {
  os << "availability,rep,mi,nr,ret,retbe,after,ns\n" << std::setprecision(6);
  os << avail << ',' << r.rep << ',' << r.mi << ',' << r.nr << ',' << r.ret << ',' << r.retbe << ',' << r.after
     << ',' << r.ns << '\n';
}

}  // namespace mmapsys
