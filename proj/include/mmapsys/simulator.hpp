#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "mmapsys/config.hpp"

// The simulator deliberately knows nothing about layouts, unit blocks or generators: it walks the
// system rules phase by phase so it can serve as an independent oracle for the matrix code.

namespace mmapsys {

/// Labels match the generator labels; kept separate so the simulator stays independent.
enum class SimEvent { none, A, B, C, D, CD, E, F, NS };
inline constexpr int kSimEventCount = 9;

struct SimState {
  int k = 0;
  int s = 0;
  bool vacation = true;     // repairperson away
  std::vector<int> queue;   // repair types, head first
  int i = -1, j = -1, h = -1, u = -1;  // online unit (i, h, u absent when s == k)
  int w = -1;  // vacation phase
  int r = -1;  // service phase of the head

  friend bool operator==(const SimState&, const SimState&) = default;
};

struct SimTransition {
  double rate;
  SimState next;
  SimEvent label;
};

/// Throws if the state breaks a structural rule.
inline void check_sim_state(const ModelConfig& cfg, const SimState& x) {
  auto fail = [&](const std::string& why) { throw SolverError("invalid simulator state: " + why); };
  if (x.k < 1 || x.k > cfg.n) fail("k out of range");
  if (x.s < 0 || x.s > x.k) fail("s out of range");
  if (static_cast<int>(x.queue.size()) != x.s) fail("queue length differs from s");
  for (int q : x.queue)
    if (q != 1 && q != 2) fail("bad queue mark");
  if (x.vacation && x.k < cfg.R) fail("vacation with fewer than R units");
  if (!x.vacation && x.k >= cfg.R && x.s < x.k - cfg.R + 1) fail("repairperson present below threshold");
  if (x.j < 0 || x.j >= cfg.unit.t()) fail("shock phase");
  const bool online = x.s < x.k;
  if (online != (x.i >= 0) || online != (x.h >= 0) || online != (x.u >= 0)) fail("online phases");
  if (x.vacation != (x.w >= 0)) fail("vacation phase");
  if ((!x.vacation && x.s >= 1) != (x.r >= 0)) fail("service phase");
}

namespace detail {

struct Weighted {
  int idx;
  double p;
};

inline std::vector<Weighted> support(const RowVector& v) {
  std::vector<Weighted> out;
  for (Index a = 0; a < v.size(); ++a)
    if (v(a) > 0.0) out.push_back({static_cast<int>(a), v(a)});
  return out;
}

}  // namespace detail

/// Every competing phase-level transition out of x, derived from the system rules.
inline std::vector<SimTransition> sim_transitions(const ModelConfig& cfg, const SimState& x) {
  using detail::support;
  std::vector<SimTransition> out;
  const auto& U = cfg.unit;
  const Matrix& T = U.internal.subgen();
  const Matrix& L = U.shock.subgen();
  const Vector L0 = U.shock.exit();
  const Matrix& M = U.inspection.subgen();
  const Vector M0 = U.inspection.exit();
  const auto gamma = support(U.shock.init());
  const auto alpha = support(U.internal.init());
  const auto omega = support(U.damage_init);
  const auto eta = support(U.inspection.init());
  const auto upsilon = support(cfg.vacation.init());
  const int N = x.k - cfg.R + 1;

  auto emit = [&](double rate, const SimState& y, SimEvent e) {
    if (rate <= 0.0) return;
    if (e == SimEvent::none && y == x) return;
    out.push_back({rate, y, e});
  };

  // With `fresh`, a new unit goes online and branches multiply by alpha, omega, eta.
  auto with_fresh_unit = [&](double rate, SimState y, bool fresh, SimEvent e, auto&& then) {
    if (!fresh) {
      then(rate, y, e);
      return;
    }
    for (auto a : alpha)
      for (auto o : omega)
        for (auto n : eta) {
          SimState z = y;
          z.i = a.idx;
          z.h = o.idx;
          z.u = n.idx;
          then(rate * a.p * o.p * n.p, z, e);
        }
  };
  auto start_service = [&](double rate, SimState y, SimEvent e) {
    for (auto b : support(cfg.repair(y.queue.front()).init())) {
      SimState z = y;
      z.r = b.idx;
      emit(rate * b.p, z, e);
    }
  };
  auto start_vacation = [&](double rate, SimState y, SimEvent e) {
    for (auto v : upsilon) {
      SimState z = y;
      z.w = v.idx;
      emit(rate * v.p, z, e);
    }
  };

  // The online unit goes to the repair facility with mark `type`; new shock phase j2.
  auto to_facility = [&](double rate, int type, int j2) {
    SimState y = x;
    y.j = j2;
    y.queue.push_back(type);
    y.s += 1;
    if (y.s == y.k) y.i = y.h = y.u = -1;
    const SimEvent e = type == 1 ? SimEvent::A : SimEvent::B;
    with_fresh_unit(rate, y, y.s < y.k, e, [&](double r2, SimState z, SimEvent ev) {
      if (!z.vacation && x.s == 0) {
        start_service(r2, z, ev);
      } else {
        emit(r2, z, ev);
      }
    });
  };

  // The online unit is lost.
  auto lose_unit = [&](double rate, int j2) {
    SimState y = x;
    y.j = j2;
    if (x.k == 1) {
      y.k = cfg.n;
      y.s = 0;
      y.queue.clear();
      y.vacation = true;
      y.r = -1;
      with_fresh_unit(rate, y, true, SimEvent::NS,
                      [&](double r2, SimState z, SimEvent ev) { start_vacation(r2, z, ev); });
      return;
    }
    y.k -= 1;
    if (x.s == y.k) y.i = y.h = y.u = -1;
    const bool interrupt = x.vacation && x.k == cfg.R;
    with_fresh_unit(rate, y, x.s < y.k, interrupt ? SimEvent::CD : SimEvent::C,
                    [&](double r2, SimState z, SimEvent ev) {
                      if (interrupt) {
                        z.vacation = false;
                        z.w = -1;
                        if (z.s >= 1) {
                          start_service(r2, z, ev);
                          return;
                        }
                      }
                      emit(r2, z, ev);
                    });
  };

  if (x.s < x.k) {
    const int i = x.i, j = x.j, h = x.h, uu = x.u;
    for (Index i2 = 0; i2 < T.rows(); ++i2) {
      if (i2 == i) continue;
      SimState y = x;
      y.i = static_cast<int>(i2);
      emit(T(i, i2), y, SimEvent::none);
    }
    to_facility(U.Tr0(i), 1, j);
    lose_unit(U.Tnr0(i), j);
    for (Index j2 = 0; j2 < L.rows(); ++j2) {
      if (j2 == j) continue;
      SimState y = x;
      y.j = static_cast<int>(j2);
      emit(L(j, j2), y, SimEvent::none);
    }
    for (auto g : gamma) {
      const double shock = L0(j) * g.p;
      if (shock <= 0.0) continue;
      lose_unit(shock * U.omega0, g.idx);
      const double hit = shock * (1.0 - U.omega0);
      lose_unit(hit * U.damage_exit(h), g.idx);
      for (Index h2 = 0; h2 < U.damage_matrix.cols(); ++h2) {
        const double survive = hit * U.damage_matrix(h, h2);
        if (survive <= 0.0) continue;
        to_facility(survive * U.Wr0(i), 1, g.idx);
        lose_unit(survive * U.Wnr0(i), g.idx);
        for (Index i2 = 0; i2 < U.W.cols(); ++i2) {
          SimState y = x;
          y.i = static_cast<int>(i2);
          y.j = g.idx;
          y.h = static_cast<int>(h2);
          emit(survive * U.W(i, i2), y, SimEvent::none);
        }
      }
    }
    for (Index u2 = 0; u2 < M.rows(); ++u2) {
      if (u2 == uu) continue;
      SimState y = x;
      y.u = static_cast<int>(u2);
      emit(M(uu, u2), y, SimEvent::none);
    }
    const bool major = i >= U.n1 || h >= U.d1;
    if (cfg.pm && major) {
      to_facility(M0(uu), 2, j);
    } else {
      for (auto e : eta) {
        SimState y = x;
        y.u = e.idx;
        emit(M0(uu) * e.p, y, SimEvent::none);
      }
    }
  } else {
    // Every unit is down: only the environment's shock clock runs, without effect.
    for (Index j2 = 0; j2 < L.rows(); ++j2) {
      double rate = j2 == x.j ? 0.0 : L(x.j, j2);
      for (auto g : gamma)
        if (g.idx == j2) rate += L0(x.j) * g.p;
      SimState y = x;
      y.j = static_cast<int>(j2);
      emit(rate, y, SimEvent::none);
    }
  }

  if (x.vacation) {
    const Matrix& V = cfg.vacation.subgen();
    const Vector V0 = cfg.vacation.exit();
    for (Index w2 = 0; w2 < V.rows(); ++w2) {
      if (w2 == x.w) continue;
      SimState y = x;
      y.w = static_cast<int>(w2);
      emit(V(x.w, w2), y, SimEvent::none);
    }
    if (x.s < N) {
      start_vacation(V0(x.w), x, SimEvent::E);
    } else {
      SimState y = x;
      y.vacation = false;
      y.w = -1;
      start_service(V0(x.w), y, SimEvent::D);
    }
  } else if (x.s >= 1) {
    const PhDistribution& svc = cfg.repair(x.queue.front());
    const Matrix& S = svc.subgen();
    const Vector S0 = svc.exit();
    for (Index r2 = 0; r2 < S.rows(); ++r2) {
      if (r2 == x.r) continue;
      SimState y = x;
      y.r = static_cast<int>(r2);
      emit(S(x.r, r2), y, SimEvent::none);
    }
    SimState y = x;
    y.queue.erase(y.queue.begin());
    y.s -= 1;
    y.r = -1;
    const bool new_vacation = x.k >= cfg.R && x.s == N;
    with_fresh_unit(S0(x.r), y, x.s == x.k, new_vacation ? SimEvent::F : SimEvent::none,
                    [&](double r2, SimState z, SimEvent ev) {
                      if (new_vacation) {
                        z.vacation = true;
                        start_vacation(r2, z, ev);
                      } else if (z.s >= 1) {
                        start_service(r2, z, ev);
                      } else {
                        emit(r2, z, ev);
                      }
                    });
  }
  return out;
}

/// Initial state sampled as the analytic initial distribution: fresh unit, stationary shock
/// phase, repairperson on vacation.
template <typename Rng>
SimState sample_initial_state(const ModelConfig& cfg, Rng& rng) {
  auto draw = [&](const RowVector& p) {
    std::discrete_distribution<int> dist(p.data(), p.data() + p.size());
    return dist(rng);
  };
  SimState x;
  x.k = cfg.n;
  x.s = 0;
  x.vacation = true;
  x.i = draw(cfg.unit.internal.init());
  x.j = draw(renewal_stationary(cfg.unit.shock));
  x.h = draw(cfg.unit.damage_init);
  x.u = draw(cfg.unit.inspection.init());
  x.w = draw(cfg.vacation.init());
  return x;
}

/// Reward rate nr - nc of a state.
inline double sim_reward_rate(const ModelConfig& cfg, const SimState& x) {
  const auto& c = cfg.costs;
  const double presence = x.vacation ? c.F : c.H;
  double rate = x.s < x.k ? c.B - presence - c.c0(x.i) - c.cd(x.h) : -(c.C + presence);
  if (!x.vacation && x.s >= 1) rate -= (x.queue.front() == 1 ? c.cr1 : c.cr2)(x.r);
  return rate;
}

/// Absorption time of a PH distribution, simulated phase by phase.
template <typename Rng>
double sample_ph(const PhDistribution& d, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const RowVector& init = d.init();
  double acc = 0.0, draw = unif(rng);
  int phase = -1;
  for (Index a = 0; a < init.size(); ++a) {
    acc += init(a);
    if (draw < acc) {
      phase = static_cast<int>(a);
      break;
    }
  }
  double t = 0.0;
  const Vector exit = d.exit();
  while (phase >= 0) {
    const double out = -d.subgen()(phase, phase);
    t += std::exponential_distribution<double>(out)(rng);
    double pick = unif(rng) * out;
    int next = -1;
    for (Index b = 0; b < d.order(); ++b) {
      if (b == phase) continue;
      pick -= d.subgen()(phase, b);
      if (pick < 0.0) {
        next = static_cast<int>(b);
        break;
      }
    }
    phase = next;  // -1 means absorption through the exit vector
  }
  return t;
}

struct SimEstimate {
  double mean = 0;
  double se = 0;
  long samples = 0;
  std::uint64_t seed = 0;
};

struct SimEstimates {
  SimEstimate availability, rep, mi, nr, ret, retbe, after, ns, phi;
  std::map<std::tuple<int, int, bool>, SimEstimate> occupancy;  // (k, s, vacation)
  long events = 0;
};

struct SimOptions {
  double horizon = 1e6;
  int replications = 20;
  std::uint64_t seed = 1;
  int batches = 20;  // per replication
  unsigned threads = 1;
};

namespace detail {

struct BatchTotals {
  double up = 0, reward = 0;
  std::array<double, kSimEventCount> counts{};
  std::map<std::tuple<int, int, bool>, double> occ;
};

struct StateKeyHash {
  size_t operator()(const std::vector<int>& v) const {
    size_t h = 1469598103934665603ull;
    for (int x : v) h = (h ^ static_cast<size_t>(x + 7)) * 1099511628211ull;
    return h;
  }
};

inline std::vector<int> sim_key(const SimState& x) {
  std::vector<int> key{x.k, x.s, x.vacation ? 1 : 0, x.i, x.j, x.h, x.u, x.w, x.r};
  key.insert(key.end(), x.queue.begin(), x.queue.end());
  return key;
}

struct CachedState {
  SimState state;
  double total = 0;
  double reward = 0;
  bool up = false;
  std::vector<double> cumulative;
  std::vector<int> targets;
  std::vector<SimEvent> labels;
};

/// One replication on the phase-level chain, with transitions cached per visited state.
inline std::vector<BatchTotals> run_replication(const ModelConfig& cfg, const SimOptions& opt, std::uint64_t seed,
                                                long& events) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<CachedState> cache;
  std::unordered_map<std::vector<int>, int, StateKeyHash> index;
  auto intern = [&](const SimState& x) -> int {
    auto key = sim_key(x);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    check_sim_state(cfg, x);
    const int id = static_cast<int>(cache.size());
    index.emplace(std::move(key), id);
    CachedState c;
    c.state = x;
    c.reward = sim_reward_rate(cfg, x);
    c.up = x.s < x.k;
    cache.push_back(std::move(c));
    return id;
  };
  auto expand = [&](int id) {
    if (!cache[static_cast<size_t>(id)].cumulative.empty()) return;
    const SimState x = cache[static_cast<size_t>(id)].state;
    const auto trans = sim_transitions(cfg, x);
    if (trans.empty()) throw SolverError("absorbing simulator state");
    std::vector<double> cum;
    std::vector<int> tg;
    std::vector<SimEvent> lb;
    double acc = 0.0;
    for (const auto& t : trans) {
      acc += t.rate;
      cum.push_back(acc);
      tg.push_back(intern(t.next));
      lb.push_back(t.label);
    }
    CachedState& c = cache[static_cast<size_t>(id)];
    c.total = acc;
    c.cumulative = std::move(cum);
    c.targets = std::move(tg);
    c.labels = std::move(lb);
  };

  const double batch_len = opt.horizon / opt.batches;
  std::vector<BatchTotals> batches(static_cast<size_t>(opt.batches));
  int cur = intern(sample_initial_state(cfg, rng));
  double now = 0.0;
  int b = 0;
  while (true) {
    expand(cur);
    const CachedState& c = cache[static_cast<size_t>(cur)];
    double dt = std::exponential_distribution<double>(c.total)(rng);
    // Spread the sojourn over batch boundaries.
    while (b < opt.batches && now + dt >= (b + 1) * batch_len) {
      const double part = (b + 1) * batch_len - now;
      auto& bt = batches[static_cast<size_t>(b)];
      bt.up += c.up ? part : 0.0;
      bt.reward += c.reward * part;
      bt.occ[{c.state.k, c.state.s, c.state.vacation}] += part;
      now += part;
      dt -= part;
      ++b;
    }
    if (b >= opt.batches) break;
    auto& bt = batches[static_cast<size_t>(b)];
    bt.up += c.up ? dt : 0.0;
    bt.reward += c.reward * dt;
    bt.occ[{c.state.k, c.state.s, c.state.vacation}] += dt;
    now += dt;
    const double pick = unif(rng) * c.total;
    size_t idx = static_cast<size_t>(std::upper_bound(c.cumulative.begin(), c.cumulative.end(), pick) -
                                     c.cumulative.begin());
    idx = std::min(idx, c.cumulative.size() - 1);
    bt.counts[static_cast<size_t>(c.labels[idx])] += 1.0;
    cur = c.targets[idx];
    ++events;
  }
  return batches;
}

inline SimEstimate summarize(const std::vector<double>& xs, std::uint64_t seed) {
  SimEstimate e;
  e.samples = static_cast<long>(xs.size());
  e.seed = seed;
  double sum = 0.0;
  for (double x : xs) sum += x;
  e.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - e.mean) * (x - e.mean);
    e.se = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  }
  return e;
}

}  // namespace detail

/// Monte Carlo estimates with batch-means standard errors. Replication r uses seed + r.
inline SimEstimates simulate(const ModelConfig& cfg, const SimOptions& opt) {
  if (!(opt.horizon > 0.0)) throw ConfigError("simulation horizon must be positive");
  if (opt.replications < 1) throw ConfigError("at least one replication is required");
  if (opt.batches < 1) throw ConfigError("at least one batch is required");
  cfg.validate();
  std::vector<std::vector<detail::BatchTotals>> reps(static_cast<size_t>(opt.replications));
  std::vector<long> events(static_cast<size_t>(opt.replications), 0);
  std::atomic<int> next{0};
  std::vector<std::string> errors(reps.size());
  auto worker = [&]() {
    for (int r = next++; r < opt.replications; r = next++) {
      try {
        reps[static_cast<size_t>(r)] =
            detail::run_replication(cfg, opt, opt.seed + static_cast<std::uint64_t>(r), events[static_cast<size_t>(r)]);
      } catch (const std::exception& e) {
        errors[static_cast<size_t>(r)] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < std::max(1u, opt.threads); ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (!e.empty()) throw SolverError(e);

  const double len = opt.horizon / opt.batches;
  const auto& c = cfg.costs;
  std::vector<double> av, rep, mi, nr, ret, retbe, after, ns, phi;
  std::map<std::tuple<int, int, bool>, std::vector<double>> occ;
  SimEstimates out;
  for (size_t r = 0; r < reps.size(); ++r) {
    out.events += events[r];
    for (const auto& b : reps[r]) {
      auto cnt = [&](SimEvent e) { return b.counts[static_cast<size_t>(e)] / len; };
      av.push_back(b.up / len);
      rep.push_back(cnt(SimEvent::A));
      mi.push_back(cnt(SimEvent::B));
      nr.push_back(cnt(SimEvent::C) + cnt(SimEvent::CD) + cnt(SimEvent::NS));
      ret.push_back(cnt(SimEvent::D) + cnt(SimEvent::CD));
      retbe.push_back(cnt(SimEvent::E));
      after.push_back(cnt(SimEvent::F));
      ns.push_back(cnt(SimEvent::NS));
      phi.push_back(b.reward / len - ns.back() * cfg.n * c.fnu - rep.back() * c.fcr - mi.back() * c.fmi -
                    (ret.back() + retbe.back()) * c.G);
      for (const auto& [key, val] : b.occ) occ[key];
    }
  }
  // Cells never visited in some batch count as zero there.
  for (auto& [key, vals] : occ) {
    for (size_t r = 0; r < reps.size(); ++r) {
      for (const auto& b : reps[r]) {
        auto it = b.occ.find(key);
        vals.push_back(it == b.occ.end() ? 0.0 : it->second / len);
      }
    }
  }
  const auto seed = opt.seed;
  out.availability = detail::summarize(av, seed);
  out.rep = detail::summarize(rep, seed);
  out.mi = detail::summarize(mi, seed);
  out.nr = detail::summarize(nr, seed);
  out.ret = detail::summarize(ret, seed);
  out.retbe = detail::summarize(retbe, seed);
  out.after = detail::summarize(after, seed);
  out.ns = detail::summarize(ns, seed);
  out.phi = detail::summarize(phi, seed);
  for (const auto& [key, vals] : occ) out.occupancy[key] = detail::summarize(vals, seed);
  return out;
}

struct ValidationLine {
  std::string quantity;
  double analytic = 0;
  double simulated = 0;
  double se = 0;
  bool pass = false;
};

struct ValidationReport {
  std::vector<ValidationLine> lines;
  bool pass() const {
    return std::all_of(lines.begin(), lines.end(), [](const ValidationLine& l) { return l.pass; });
  }
};

/// Flags analytic values outside the simulator's band of `width` standard errors.
inline ValidationReport validate(double availability, double rep, double mi, double ns, double phi,
                                 const SimEstimates& sim, double width = 3.0) {
  ValidationReport out;
  auto line = [&](const char* name, double a, const SimEstimate& e) {
    out.lines.push_back({name, a, e.mean, e.se, std::abs(a - e.mean) <= width * e.se});
  };
  line("availability", availability, sim.availability);
  line("rep", rep, sim.rep);
  line("mi", mi, sim.mi);
  line("ns", ns, sim.ns);
  line("phi", phi, sim.phi);
  return out;
}

}  // namespace mmapsys
