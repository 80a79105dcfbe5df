#include <gtest/gtest.h>

#include <sstream>

#include "mmapsys/state_space.hpp"

using namespace mmapsys;

namespace {

ModelConfig with(int n, int R, VacationFamily f = VacationFamily::erlang2) {
  ModelConfig c = reference_config();
  c.n = n;
  c.R = R;
  c.family = f;
  c.set_vacation(Vector::Ones(family_dimension(f)));
  return c;
}

}  // namespace

TEST(StateSpace, MacroStateSizes) {
  const auto L = StateSpaceLayout::enumerate(reference_config());
  EXPECT_EQ(L.index_of({4, 0, Presence::v, Queue{}}).count, 64);
  EXPECT_EQ(L.second_level(4, 4, Presence::v).count, 64);
}

TEST(StateSpace, ReferenceDimension) {
  const auto c = reference_config();
  const auto L = StateSpaceLayout::enumerate(c);
  EXPECT_EQ(L.dimension(), 3668);
  EXPECT_EQ(L.dimension(), closed_form_dimension(c));
}

TEST(StateSpace, ClosedFormOverGrid) {
  for (auto f : {VacationFamily::exponential, VacationFamily::erlang2})
    for (int n = 1; n <= 4; ++n)
      for (int R = 1; R <= n; ++R) {
        const auto c = with(n, R, f);
        EXPECT_EQ(StateSpaceLayout::enumerate(c).dimension(), closed_form_dimension(c)) << n << "," << R;
      }
}

TEST(StateSpace, FirstKeyAnchorsAtZero) {
  const auto L = StateSpaceLayout::enumerate(reference_config());
  EXPECT_EQ(L.index_of({4, 0, Presence::v, Queue{}}).start, 0);
}

TEST(StateSpace, RangesAbutAndRoundTrip) {
  const auto L = StateSpaceLayout::enumerate(with(4, 2));
  Index expect = 0;
  for (const auto& ms : L.states()) {
    EXPECT_EQ(ms.offset, expect);
    expect += ms.count();
    EXPECT_EQ(L.key_of(ms.offset), ms.key);
    EXPECT_EQ(L.key_of(ms.offset + ms.count() - 1), ms.key);
  }
  EXPECT_EQ(expect, L.dimension());
}

TEST(StateSpace, SecondLevelPresence) {
  for (int R = 1; R <= 4; ++R) {
    const auto L = StateSpaceLayout::enumerate(with(4, R));
    for (int k = 1; k <= 4; ++k) {
      const int N = k - R + 1;
      for (int s = 0; s <= k; ++s) {
        EXPECT_EQ(L.has_second_level(k, s, Presence::v), k >= R);
        EXPECT_EQ(L.has_second_level(k, s, Presence::nv), k < R || s >= N);
      }
    }
  }
}

TEST(StateSpace, QueueCount) {
  const auto L = StateSpaceLayout::enumerate(with(4, 3));
  std::map<std::tuple<int, int, int>, int> count;
  for (const auto& ms : L.states()) ++count[{ms.key.k, ms.key.s, static_cast<int>(ms.key.x)}];
  for (const auto& [key, c] : count) EXPECT_EQ(c, 1 << std::get<1>(key));
}

TEST(StateSpace, OrderingKDescendingVBeforeNv) {
  const auto L = StateSpaceLayout::enumerate(with(4, 3));
  const auto& st = L.states();
  for (size_t a = 1; a < st.size(); ++a) {
    const auto& p = st[a - 1].key;
    const auto& q = st[a].key;
    EXPECT_GE(p.k, q.k);
    if (p.k == q.k && p.x == q.x && p.s == q.s) EXPECT_LT(p.queue.code, q.queue.code);
    if (p.k == q.k && p.x == Presence::nv) EXPECT_EQ(q.x, Presence::nv);
  }
}

TEST(StateSpace, QueueCodes) {
  Queue q;
  q = q.push(1).push(2).push(2);
  EXPECT_EQ(q.str(), "122");
  EXPECT_EQ(q.head(), 1);
  EXPECT_EQ(q.pop().str(), "22");
  EXPECT_LT(Queue{}.push(1).push(2).code, Queue{}.push(2).push(1).code);
}

TEST(StateSpace, InvalidKeysAndConfigs) {
  const auto L = StateSpaceLayout::enumerate(with(4, 3));
  EXPECT_THROW(L.index_of({2, 0, Presence::v, Queue{}}), ConfigError);
  EXPECT_THROW(L.index_of({4, 0, Presence::nv, Queue{}}), ConfigError);
  ModelConfig bad = reference_config();
  bad.R = 5;
  EXPECT_THROW(StateSpaceLayout::enumerate(bad), ConfigError);
  bad.R = 0;
  EXPECT_THROW(StateSpaceLayout::enumerate(bad), ConfigError);
}

TEST(StateSpace, DecodeAllDownDropsInspection) {
  const auto L = StateSpaceLayout::enumerate(with(4, 3));
  const IndexRange r = L.index_of({2, 2, Presence::nv, Queue{}.push(2).push(1)});
  EXPECT_EQ(r.count, 2 * 3);
  const PhaseTuple p = L.decode(r.start + 5);
  EXPECT_EQ(p.j, 1);
  EXPECT_EQ(p.r, 2);
  EXPECT_EQ(p.i, -1);
  EXPECT_EQ(p.u, -1);
}

TEST(StateSpace, CsvDump) {
  std::ostringstream os;
  StateSpaceLayout::enumerate(with(2, 1)).write_csv(os);
  EXPECT_EQ(os.str().rfind("k,s,x,queue,offset,count\n2,0,v,-,0,64\n", 0), 0u);
}
