#pragma once

#include <map>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "mmapsys/config.hpp"

namespace mmapsys {

enum class Presence { v, nv };

inline const char* presence_name(Presence x) { return x == Presence::v ? "v" : "nv"; }

/// Repair queue (i1, ..., is) packed as bits, head most significant; bit 0 = corrective, 1 = PM.
/// Numeric order of the code is the lexicographic order of the queue with 1 < 2.
struct Queue {
  int size = 0;
  unsigned code = 0;

  int at(int pos) const { return static_cast<int>((code >> (size - 1 - pos)) & 1u) + 1; }
  int head() const { return at(0); }
  Queue push(int type) const { return {size + 1, (code << 1) | static_cast<unsigned>(type - 1)}; }
  Queue pop() const { return {size - 1, size > 1 ? code & ((1u << (size - 1)) - 1u) : 0u}; }

  std::string str() const {
    std::string out;
    for (int i = 0; i < size; ++i) out += static_cast<char>('0' + at(i));
    return out.empty() ? "-" : out;
  }

  friend bool operator==(const Queue&, const Queue&) = default;
};

struct MacroStateKey {
  int k = 0;
  int s = 0;
  Presence x = Presence::v;
  Queue queue;

  auto tie() const { return std::make_tuple(k, s, static_cast<int>(x), queue.size, queue.code); }
  friend bool operator==(const MacroStateKey& a, const MacroStateKey& b) { return a.tie() == b.tie(); }
  friend bool operator<(const MacroStateKey& a, const MacroStateKey& b) { return a.tie() < b.tie(); }

  std::string str() const {
    return "(k=" + std::to_string(k) + ",s=" + std::to_string(s) + "," + presence_name(x) +
           ",q=" + queue.str() + ")";
  }
};

struct IndexRange {
  Index start = 0;
  Index count = 0;
  Index end() const { return start + count; }
};

/// A third-level macro-state: key, global offset and its phase structure
/// (online phases x facility phases, facility fastest).
struct MacroState {
  MacroStateKey key;
  Index offset = 0;
  Index online = 0;    // m*t*d*eps when s<k, t when s=k
  Index facility = 1;  // vacation order, head service order, or 1 when idle
  Index count() const { return online * facility; }
  IndexRange range() const { return {offset, count()}; }
};

/// Decoded phase tuple; -1 marks a component absent in this macro-state.
struct PhaseTuple {
  MacroStateKey key;
  int i = -1, j = -1, h = -1, u = -1;
  int w = -1;  // vacation phase (x=v)
  int r = -1;  // service phase (x=nv, s>=1)
};

class StateSpaceLayout {
 public:
  StateSpaceLayout() = default;

  static StateSpaceLayout enumerate(const ModelConfig& cfg) {
    if (cfg.n < 1) throw ConfigError("n must be at least 1");
    if (cfg.R < 1 || cfg.R > cfg.n) throw ConfigError("R must lie in 1..n");
    StateSpaceLayout L;
    L.n_ = cfg.n;
    L.R_ = cfg.R;
    L.m_ = cfg.unit.m();
    L.t_ = cfg.unit.t();
    L.d_ = cfg.unit.d();
    L.e_ = cfg.unit.eps();
    L.v_ = cfg.vacation.order();
    L.z1_ = cfg.repair1.order();
    L.z2_ = cfg.repair2.order();
    Index offset = 0;
    L.levels_.assign(static_cast<size_t>(cfg.n) + 1, IndexRange{});
    for (int k = cfg.n; k >= 1; --k) {
      const Index level_start = offset;
      std::vector<std::pair<Presence, int>> seconds;
      if (k >= cfg.R) {
        for (int s = 0; s <= k; ++s) seconds.emplace_back(Presence::v, s);
        for (int s = k - cfg.R + 1; s <= k; ++s) seconds.emplace_back(Presence::nv, s);
      } else {
        for (int s = 0; s <= k; ++s) seconds.emplace_back(Presence::nv, s);
      }
      for (auto [x, s] : seconds) {
        const Index second_start = offset;
        for (unsigned code = 0; code < (1u << s); ++code) {
          MacroState ms;
          ms.key = {k, s, x, Queue{s, code}};
          ms.offset = offset;
          ms.online = s < k ? L.online_order() : L.t_;
          if (x == Presence::v) {
            ms.facility = L.v_;
          } else if (s >= 1) {
            ms.facility = ms.key.queue.head() == 1 ? L.z1_ : L.z2_;
          } else {
            ms.facility = 1;
          }
          L.lookup_[ms.key] = L.states_.size();
          L.states_.push_back(ms);
          offset += ms.count();
        }
        L.seconds_[{k, s, static_cast<int>(x)}] = {second_start, offset - second_start};
      }
      L.levels_[static_cast<size_t>(k)] = {level_start, offset - level_start};
    }
    L.dim_ = offset;
    return L;
  }

  Index dimension() const { return dim_; }
  int n() const { return n_; }
  int R() const { return R_; }
  Index online_order() const { return m_ * t_ * d_ * e_; }
  Index m() const { return m_; }
  Index t() const { return t_; }
  Index d() const { return d_; }
  Index eps() const { return e_; }
  Index vacation_order() const { return v_; }
  Index service_order(int type) const { return type == 1 ? z1_ : z2_; }

  const std::vector<MacroState>& states() const { return states_; }

  bool contains(const MacroStateKey& key) const { return lookup_.count(key) != 0; }

  const MacroState& state(const MacroStateKey& key) const {
    auto it = lookup_.find(key);
    if (it == lookup_.end()) throw ConfigError("no macro-state " + key.str() + " in this layout");
    return states_[it->second];
  }

  IndexRange index_of(const MacroStateKey& key) const { return state(key).range(); }

  /// Range I_s^{k,x} spanning all queues.
  IndexRange second_level(int k, int s, Presence x) const {
    auto it = seconds_.find({k, s, static_cast<int>(x)});
    if (it == seconds_.end()) {
      throw ConfigError("no macro-state E_" + std::to_string(s) + "^{" + std::to_string(k) + "," +
                        presence_name(x) + "} in this layout");
    }
    return it->second;
  }

  bool has_second_level(int k, int s, Presence x) const {
    return seconds_.count({k, s, static_cast<int>(x)}) != 0;
  }

  /// All phases with k units in the system.
  IndexRange level(int k) const { return levels_.at(static_cast<size_t>(k)); }

  const MacroState& macro_state_at(Index global) const {
    if (global < 0 || global >= dim_) throw ConfigError("index out of range");
    size_t lo = 0, hi = states_.size();
    while (hi - lo > 1) {
      const size_t mid = (lo + hi) / 2;
      if (states_[mid].offset <= global) lo = mid; else hi = mid;
    }
    return states_[lo];
  }

  MacroStateKey key_of(Index global) const { return macro_state_at(global).key; }

  PhaseTuple decode(Index global) const {
    const MacroState& ms = macro_state_at(global);
    PhaseTuple p;
    p.key = ms.key;
    Index local = global - ms.offset;
    const Index fac = local % ms.facility;
    Index on = local / ms.facility;
    if (ms.key.x == Presence::v) {
      p.w = static_cast<int>(fac);
    } else if (ms.key.s >= 1) {
      p.r = static_cast<int>(fac);
    }
    if (ms.key.s < ms.key.k) {
      p.u = static_cast<int>(on % e_);
      on /= e_;
      p.h = static_cast<int>(on % d_);
      on /= d_;
      p.j = static_cast<int>(on % t_);
      p.i = static_cast<int>(on / t_);
    } else {
      p.j = static_cast<int>(on);
    }
    return p;
  }

  void write_csv(std::ostream& os) const {
    os << "k,s,x,queue,offset,count\n";
    for (const auto& ms : states_) {
      os << ms.key.k << ',' << ms.key.s << ',' << presence_name(ms.key.x) << ',' << ms.key.queue.str()
         << ',' << ms.offset << ',' << ms.count() << '\n';
    }
  }

 private:
  int n_ = 0, R_ = 0;
  Index m_ = 0, t_ = 0, d_ = 0, e_ = 0, v_ = 0, z1_ = 0, z2_ = 0;
  Index dim_ = 0;
  std::vector<MacroState> states_;
  std::map<MacroStateKey, size_t> lookup_;
  std::map<std::tuple<int, int, int>, IndexRange> seconds_;
  std::vector<IndexRange> levels_;
};

/// Closed-form dimension count, independent of the enumeration loop.
inline Index closed_form_dimension(const ModelConfig& cfg) {
  const Index on = cfg.unit.online_order();
  const Index t = cfg.unit.t();
  const Index v = cfg.vacation.order();
  const Index zbar2 = cfg.repair1.order() + cfg.repair2.order();  // sum over head types
  Index total = 0;
  for (int k = 1; k <= cfg.n; ++k) {
    auto online = [&](int s) { return s < k ? on : t; };
    auto queues = [](int s) { return Index{1} << s; };
    if (k >= cfg.R) {
      for (int s = 0; s <= k; ++s) total += queues(s) * online(s) * v;
      for (int s = k - cfg.R + 1; s <= k; ++s) total += (queues(s) / 2) * zbar2 * online(s);
    } else {
      total += on;
      for (int s = 1; s <= k; ++s) total += (queues(s) / 2) * zbar2 * online(s);
    }
  }
  return total;
}

}  // namespace mmapsys
