#pragma once

#include <array>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "mmapsys/state_space.hpp"
#include "mmapsys/unit_model.hpp"

namespace mmapsys {

enum class Event { O, A, B, C, D, CD, E, F, NS };

inline constexpr std::array<Event, 9> kAllEvents = {Event::O, Event::A, Event::B, Event::C, Event::D,
                                                    Event::CD, Event::E, Event::F, Event::NS};

inline const char* event_name(Event e) {
  switch (e) {
    case Event::O: return "O";
    case Event::A: return "A";
    case Event::B: return "B";
    case Event::C: return "C";
    case Event::D: return "D";
    case Event::CD: return "CD";
    case Event::E: return "E";
    case Event::F: return "F";
    case Event::NS: return "NS";
  }
  return "?";
}

struct MmapGenerators {
  std::array<SparseMatrix, 9> by_event;
  SparseMatrix D;

  const SparseMatrix& operator[](Event e) const { return by_event[static_cast<size_t>(e)]; }
  SparseMatrix& operator[](Event e) { return by_event[static_cast<size_t>(e)]; }
  Index dimension() const { return D.rows(); }
};

/// Everything the block builders need, computed once per model.
struct AssemblyContext {
  const ModelConfig* cfg = nullptr;
  const StateSpaceLayout* layout = nullptr;
  UnitBlocks unit;

  AssemblyContext(const ModelConfig& c, const StateSpaceLayout& l)
      : cfg(&c), layout(&l), unit(build_unit_blocks(c.unit, c.pm)) {}

  const PhDistribution& service(int type) const { return cfg->repair(type); }
  int N(int k) const { return k - cfg->R + 1; }
};

namespace detail {

inline void put(std::vector<Triplet>& out, const MacroState& from, const MacroState& to, const Matrix& block) {
  if (block.rows() != from.count() || block.cols() != to.count()) {
    throw DimensionError("block " + from.key.str() + " -> " + to.key.str() + " is " +
                         std::to_string(block.rows()) + "x" + std::to_string(block.cols()) + ", expected " +
                         std::to_string(from.count()) + "x" + std::to_string(to.count()));
  }
  place_block(out, from.offset, to.offset, block);
}

/// Online-unit block for failure-type events: fresh unit if a spare remains, shock phase only otherwise.
inline const Matrix& failure_block(const UnitBlocks& u, Event e, bool has_spare) {
  switch (e) {
    case Event::A: return has_spare ? u.HA : u.HA_p;
    case Event::B: return has_spare ? u.HB : u.HB_p;
    default: return has_spare ? u.HC : u.HC_p;
  }
}

/// Identity on the facility factor of a macro-state.
inline Matrix facility_identity(const MacroState& ms) { return identity(ms.facility); }

}  // namespace detail

/// No-event transitions: diagonal clocks plus service completions that keep the repairperson.
inline std::vector<Triplet> assemble_event_O(const AssemblyContext& ctx) {
  std::vector<Triplet> out;
  const auto& L = *ctx.layout;
  const auto& u = ctx.unit;
  for (const auto& ms : L.states()) {
    const auto& key = ms.key;
    const Matrix& online = key.s < key.k ? u.H0 : u.shock_renewal;
    if (key.x == Presence::v) {
      detail::put(out, ms, ms, kron_sum(online, ctx.cfg->vacation.subgen()));
    } else if (key.s >= 1) {
      detail::put(out, ms, ms, kron_sum(online, ctx.service(key.queue.head()).subgen()));
      if (key.k >= ctx.cfg->R && key.s == ctx.N(key.k)) continue;  // completion is an F event
      const MacroStateKey dest{key.k, key.s - 1, Presence::nv, key.queue.pop()};
      const MacroState& to = L.state(dest);
      const Matrix on = key.s == key.k ? u.theta : identity(ms.online);
      Matrix fac = ctx.service(key.queue.head()).exit_col();
      if (dest.s >= 1) fac = fac * ctx.service(dest.queue.head()).init_row();
      detail::put(out, ms, to, kron(on, fac));
    } else {
      detail::put(out, ms, ms, online);
    }
  }
  return out;
}

/// Repairable failure (A) or positive inspection (B): unit joins the queue tail.
inline std::vector<Triplet> assemble_event_AB(const AssemblyContext& ctx, Event e) {
  std::vector<Triplet> out;
  const int type = e == Event::A ? 1 : 2;
  if (e == Event::B && !ctx.cfg->pm) return out;
  const auto& L = *ctx.layout;
  for (const auto& ms : L.states()) {
    const auto& key = ms.key;
    if (key.s >= key.k) continue;
    const MacroStateKey dest{key.k, key.s + 1, key.x, key.queue.push(type)};
    const MacroState& to = L.state(dest);
    const Matrix& on = detail::failure_block(ctx.unit, e, key.s + 1 < key.k);
    Matrix fac;
    if (key.x == Presence::nv && key.s == 0) {
      fac = ctx.service(type).init_row();
    } else {
      fac = detail::facility_identity(ms);
    }
    detail::put(out, ms, to, kron(on, fac));
  }
  return out;
}

inline std::vector<Triplet> assemble_event_A(const AssemblyContext& ctx) {
  return assemble_event_AB(ctx, Event::A);
}
inline std::vector<Triplet> assemble_event_B(const AssemblyContext& ctx) {
  return assemble_event_AB(ctx, Event::B);
}

namespace detail {

/// Shared walk over non-repairable failures; `which` selects C, CD or NS.
inline std::vector<Triplet> assemble_nonrepairable(const AssemblyContext& ctx, Event which) {
  std::vector<Triplet> out;
  const auto& L = *ctx.layout;
  const int R = ctx.cfg->R;
  for (const auto& ms : L.states()) {
    const auto& key = ms.key;
    if (key.s >= key.k) continue;
    if (key.k == 1) {
      if (which != Event::NS) continue;
      const MacroState& to = L.state({L.n(), 0, Presence::v, Queue{}});
      Matrix fac = ctx.cfg->vacation.init_row();
      if (key.x == Presence::v) fac = ones_col(ms.facility) * fac;
      put(out, ms, to, kron(ctx.unit.HC, fac));
      continue;
    }
    const Matrix& on = failure_block(ctx.unit, Event::C, key.s + 1 < key.k);
    const bool interrupts = key.x == Presence::v && key.k == R;
    if (interrupts) {
      if (which != Event::CD) continue;
      const MacroState& to = L.state({key.k - 1, key.s, Presence::nv, key.queue});
      Matrix fac = ones_col(ms.facility);
      if (key.s >= 1) fac = fac * ctx.service(key.queue.head()).init_row();
      put(out, ms, to, kron(on, fac));
    } else {
      if (which != Event::C) continue;
      const MacroState& to = L.state({key.k - 1, key.s, key.x, key.queue});
      put(out, ms, to, kron(on, facility_identity(ms)));
    }
  }
  return out;
}

}  // namespace detail

inline std::vector<Triplet> assemble_event_C(const AssemblyContext& ctx) {
  return detail::assemble_nonrepairable(ctx, Event::C);
}
inline std::vector<Triplet> assemble_event_CD(const AssemblyContext& ctx) {
  return detail::assemble_nonrepairable(ctx, Event::CD);
}
inline std::vector<Triplet> assemble_event_NS(const AssemblyContext& ctx) {
  return detail::assemble_nonrepairable(ctx, Event::NS);
}

/// Vacation ends: with at least N units waiting the repairperson stays (D), otherwise leaves again (E).
inline std::vector<Triplet> assemble_vacation_exit(const AssemblyContext& ctx, Event which) {
  std::vector<Triplet> out;
  const auto& L = *ctx.layout;
  const auto& vac = ctx.cfg->vacation;
  for (const auto& ms : L.states()) {
    const auto& key = ms.key;
    if (key.x != Presence::v) continue;
    const Matrix on = identity(ms.online);
    if (key.s < ctx.N(key.k)) {
      if (which != Event::E) continue;
      detail::put(out, ms, ms, kron(on, vac.exit_col() * vac.init_row()));
    } else {
      if (which != Event::D) continue;
      const MacroState& to = L.state({key.k, key.s, Presence::nv, key.queue});
      detail::put(out, ms, to, kron(on, vac.exit_col() * ctx.service(key.queue.head()).init_row()));
    }
  }
  return out;
}

inline std::vector<Triplet> assemble_event_D(const AssemblyContext& ctx) {
  return assemble_vacation_exit(ctx, Event::D);
}
inline std::vector<Triplet> assemble_event_E(const AssemblyContext& ctx) {
  return assemble_vacation_exit(ctx, Event::E);
}

/// Service completion leaving exactly R operational units: new vacation starts.
inline std::vector<Triplet> assemble_event_F(const AssemblyContext& ctx) {
  std::vector<Triplet> out;
  const auto& L = *ctx.layout;
  for (const auto& ms : L.states()) {
    const auto& key = ms.key;
    if (key.x != Presence::nv || key.k < ctx.cfg->R || key.s != ctx.N(key.k)) continue;
    const MacroState& to = L.state({key.k, key.s - 1, Presence::v, key.queue.pop()});
    const Matrix on = key.s == key.k ? ctx.unit.theta : identity(ms.online);
    const Matrix fac = ctx.service(key.queue.head()).exit_col() * ctx.cfg->vacation.init_row();
    detail::put(out, ms, to, kron(on, fac));
  }
  return out;
}

inline std::vector<Triplet> assemble_event(const AssemblyContext& ctx, Event e) {
  switch (e) {
    case Event::O: return assemble_event_O(ctx);
    case Event::A: return assemble_event_A(ctx);
    case Event::B: return assemble_event_B(ctx);
    case Event::C: return assemble_event_C(ctx);
    case Event::D: return assemble_event_D(ctx);
    case Event::CD: return assemble_event_CD(ctx);
    case Event::E: return assemble_event_E(ctx);
    case Event::F: return assemble_event_F(ctx);
    case Event::NS: return assemble_event_NS(ctx);
  }
  return {};
}

inline constexpr double kConservationTolerance = 1e-10;

inline double max_row_sum_residual(const SparseMatrix& d) { return row_sums(d).cwiseAbs().maxCoeff(); }

/// Sign and conservation checks; throws naming the offending row and label.
inline void check_generators(const MmapGenerators& g, const StateSpaceLayout& layout) {
  for (Event e : kAllEvents) {
    const SparseMatrix& m = g[e];
    for (Index col = 0; col < m.outerSize(); ++col) {
      for (SparseMatrix::InnerIterator it(m, col); it; ++it) {
        const bool diag = it.row() == it.col();
        if (it.value() < 0.0 && !(e == Event::O && diag)) {
          throw SolverError(std::string("negative entry in D^") + event_name(e) + " at row " +
                            std::to_string(it.row()) + " " + layout.key_of(it.row()).str());
        }
      }
    }
  }
  const Vector rs = row_sums(g.D);
  for (Index i = 0; i < rs.size(); ++i) {
    if (std::abs(rs(i)) > kConservationTolerance) {
      throw SolverError("row " + std::to_string(i) + " " + layout.key_of(i).str() + " has row sum " +
                        std::to_string(rs(i)));
    }
  }
}

inline MmapGenerators assemble_all(const ModelConfig& cfg, const StateSpaceLayout& layout, bool check = true) {
  const AssemblyContext ctx(cfg, layout);
  MmapGenerators g;
  const Index n = layout.dimension();
  std::vector<Triplet> all;
  for (Event e : kAllEvents) {
    auto trips = assemble_event(ctx, e);
    g[e] = sparse_from_triplets(n, trips);
    all.insert(all.end(), trips.begin(), trips.end());
  }
  g.D = sparse_from_triplets(n, all);
  if (check) check_generators(g, layout);
  return g;
}

inline void write_sparse(std::ostream& os, const SparseMatrix& m) {
  os << "# dimension " << m.rows() << ' ' << m.cols() << " nnz " << m.nonZeros() << '\n';
  os << std::setprecision(17);
  for (Index col = 0; col < m.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(m, col); it; ++it) {
      os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    }
  }
}

}  // namespace mmapsys
