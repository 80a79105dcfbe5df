#include <gtest/gtest.h>

#include "mmapsys/assembler.hpp"

using namespace mmapsys;

namespace {

struct Built {
  ModelConfig cfg;
  StateSpaceLayout layout;
  MmapGenerators g;
};

Built build(int n, int R, bool pm = true, VacationFamily f = VacationFamily::erlang2) {
  Built b;
  b.cfg = reference_config();
  b.cfg.n = n;
  b.cfg.R = R;
  b.cfg.pm = pm;
  b.cfg.family = f;
  b.cfg.set_vacation(f == VacationFamily::erlang2 ? vec({0.8, 1.3}) : vec({0.5}));
  b.layout = StateSpaceLayout::enumerate(b.cfg);
  b.g = assemble_all(b.cfg, b.layout);
  return b;
}

Matrix dense_block(const SparseMatrix& m, IndexRange r, IndexRange c) {
  return Matrix(m.block(r.start, c.start, r.count, c.count));
}

template <typename F>
void for_each_nonzero(const SparseMatrix& m, F&& f) {
  for (Index col = 0; col < m.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(m, col); it; ++it) f(it.row(), it.col(), it.value());
}

}  // namespace

TEST(Assembler, ConservationOverGrid) {
  for (auto f : {VacationFamily::exponential, VacationFamily::erlang2})
    for (bool pm : {true, false})
      for (int n = 1; n <= 4; ++n)
        for (int R = 1; R <= n; ++R) {
          const Built b = build(n, R, pm, f);
          EXPECT_LE(max_row_sum_residual(b.g.D), 1e-10) << n << R << pm;
        }
}

TEST(Assembler, UniformizedMatrixIsStochastic) {
  const Built b = build(4, 3);
  double lam = 0;
  for (Index i = 0; i < b.g.D.rows(); ++i) lam = std::max(lam, -b.g.D.coeff(i, i));
  SparseMatrix P = b.g.D / lam;
  for (Index i = 0; i < P.rows(); ++i) P.coeffRef(i, i) += 1.0;
  for_each_nonzero(P, [](Index, Index, double v) { EXPECT_GE(v, -1e-15); });
  EXPECT_LE((row_sums(P).array() - 1.0).abs().maxCoeff(), 1e-12);
}

TEST(Assembler, EventSupportsAreDisjoint) {
  const Built b = build(4, 3);
  std::map<std::pair<Index, Index>, int> owner;
  for (Event e : kAllEvents) {
    if (e == Event::O) continue;
    for_each_nonzero(b.g[e], [&](Index r, Index c, double) {
      auto [it, fresh] = owner.emplace(std::make_pair(r, c), static_cast<int>(e));
      EXPECT_TRUE(fresh) << "overlap at " << r << "," << c;
    });
  }
}

TEST(Assembler, Placement) {
  const Built b = build(4, 3);
  const auto& L = b.layout;
  const int R = 3;
  auto check = [&](Event e, auto&& pred) {
    for_each_nonzero(b.g[e], [&](Index r, Index c, double) {
      EXPECT_TRUE(pred(L.key_of(r), L.key_of(c))) << event_name(e) << " " << L.key_of(r).str() << " -> "
                                                  << L.key_of(c).str();
    });
  };
  check(Event::A, [](auto a, auto z) { return z.k == a.k && z.s == a.s + 1 && z.x == a.x && z.queue == a.queue.push(1); });
  check(Event::B, [](auto a, auto z) { return z.k == a.k && z.s == a.s + 1 && z.x == a.x && z.queue == a.queue.push(2); });
  check(Event::C, [](auto a, auto z) { return z.k == a.k - 1 && z.s == a.s && z.x == a.x; });
  check(Event::CD, [&](auto a, auto z) {
    return a.k == R && a.x == Presence::v && z.k == R - 1 && z.x == Presence::nv && z.s == a.s;
  });
  check(Event::D, [&](auto a, auto z) {
    return a.x == Presence::v && z.x == Presence::nv && a.k == z.k && a.s == z.s && a.s >= a.k - R + 1;
  });
  check(Event::E, [&](auto a, auto z) { return a == z && a.x == Presence::v && a.s < a.k - R + 1; });
  check(Event::F, [&](auto a, auto z) {
    return a.x == Presence::nv && z.x == Presence::v && a.k >= R && a.s == a.k - R + 1 && z.s == a.s - 1 &&
           z.k == a.k;
  });
  check(Event::NS, [&](auto a, auto z) { return a.k == 1 && z.k == 4 && z.s == 0 && z.x == Presence::v; });
}

TEST(Assembler, AllOperationalBlocksBelowThreshold) {
  const Built b = build(4, 3);
  const auto u = build_unit_blocks(b.cfg.unit, true);
  const IndexRange e2 = b.layout.index_of({2, 0, Presence::nv, Queue{}});
  const IndexRange e1 = b.layout.index_of({1, 0, Presence::nv, Queue{}});
  EXPECT_TRUE(dense_block(b.g[Event::O], e2, e2).isApprox(u.H0));
  EXPECT_TRUE(dense_block(b.g[Event::C], e2, e1).isApprox(u.HC));
}

TEST(Assembler, InterruptedVacationBlock) {
  const Built b = build(4, 3);
  const auto u = build_unit_blocks(b.cfg.unit, true);
  const IndexRange from = b.layout.index_of({3, 0, Presence::v, Queue{}});
  const IndexRange to = b.layout.index_of({2, 0, Presence::nv, Queue{}});
  EXPECT_TRUE(dense_block(b.g[Event::CD], from, to).isApprox(kron(u.HC, ones_col(2))));
  // C + CD on k=R v-rows carries exactly the non-repairable intensity.
  const Vector cd = row_sums(b.g[Event::CD] + b.g[Event::C]).segment(from.start, from.count);
  const Vector hc = kron(Matrix(u.HC.rowwise().sum()), ones_col(2)).col(0);
  EXPECT_LE((cd - hc).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(row_sums(b.g[Event::C]).segment(from.start, from.count).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Assembler, NewSystemBlocks) {
  const auto upsilon = [](const Built& b) { return b.cfg.vacation.init_row(); };
  {
    const Built b = build(4, 3);
    const auto u = build_unit_blocks(b.cfg.unit, true);
    const IndexRange from = b.layout.index_of({1, 0, Presence::nv, Queue{}});
    const IndexRange to = b.layout.index_of({4, 0, Presence::v, Queue{}});
    EXPECT_TRUE(dense_block(b.g[Event::NS], from, to).isApprox(kron(u.HC, upsilon(b))));
    for_each_nonzero(b.g[Event::NS], [&](Index, Index c, double) {
      EXPECT_GE(c, to.start);
      EXPECT_LT(c, to.end());
    });
  }
  {
    const Built b = build(3, 1);
    const auto u = build_unit_blocks(b.cfg.unit, true);
    const IndexRange from = b.layout.index_of({1, 0, Presence::v, Queue{}});
    const IndexRange to = b.layout.index_of({3, 0, Presence::v, Queue{}});
    EXPECT_TRUE(dense_block(b.g[Event::NS], from, to).isApprox(kron(u.HC, ones_col(2) * upsilon(b))));
  }
}

TEST(Assembler, PreventiveMaintenanceColumns) {
  const Built b = build(4, 3);
  for_each_nonzero(b.g[Event::B], [&](Index, Index c, double) {
    const auto key = b.layout.key_of(c);
    EXPECT_EQ(key.queue.at(key.s - 1), 2);
  });
  EXPECT_EQ(build(4, 3, false).g[Event::B].nonZeros(), 0);
}

TEST(Assembler, RepairableFailureRowSums) {
  const Built c = build(3, 3);
  const auto u = build_unit_blocks(c.cfg.unit, true);
  const IndexRange e0 = c.layout.index_of({2, 0, Presence::nv, Queue{}});
  const Vector got = row_sums(c.g[Event::A]).segment(e0.start, e0.count);
  EXPECT_LE((got - u.HA.rowwise().sum()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Assembler, VacationExitSplit) {
  const Built b = build(4, 2);
  const Vector V0 = b.cfg.vacation.exit();
  const Vector de = row_sums(b.g[Event::D] + b.g[Event::E]);
  for (const auto& ms : b.layout.states()) {
    if (ms.key.x != Presence::v) {
      EXPECT_EQ(row_sums(b.g[Event::E]).segment(ms.offset, ms.count()).cwiseAbs().maxCoeff(), 0.0);
      continue;
    }
    for (Index p = 0; p < ms.count(); ++p) EXPECT_NEAR(de(ms.offset + p), V0(p % ms.facility), 1e-15);
  }
}

TEST(Assembler, ServiceStartsInBetaSupport) {
  Built b;
  b.cfg = reference_config();
  b.cfg.repair2 = PhDistribution(rowvec({0, 0.5, 0.5}), b.cfg.repair2.subgen(), "preventive");
  b.layout = StateSpaceLayout::enumerate(b.cfg);
  b.g = assemble_all(b.cfg, b.layout);
  for_each_nonzero(b.g[Event::D], [&](Index r, Index c, double) {
    const auto p = b.layout.decode(c);
    if (b.layout.key_of(r).queue.head() == 2) EXPECT_NE(p.r, 0);
  });
  for_each_nonzero(b.g[Event::F], [&](Index, Index c, double) { EXPECT_EQ(b.layout.decode(c).w, 0); });
}

TEST(Assembler, ThresholdOneHasNoInterruption) {
  const Built b = build(2, 1);
  EXPECT_EQ(b.g[Event::CD].nonZeros(), 0);
}

TEST(Assembler, SingleUnitFleet) {
  const Built b = build(1, 1);
  EXPECT_EQ(b.g[Event::C].nonZeros(), 0);
  EXPECT_EQ(b.g[Event::CD].nonZeros(), 0);
  EXPECT_GT(b.g[Event::NS].nonZeros(), 0);
  EXPECT_GT(b.g[Event::A].nonZeros(), 0);
}

TEST(Assembler, FacilityInflowMatchesOutflow) {
  const Built b = build(4, 3);
  const Vector ab = row_sums(b.g[Event::A] + b.g[Event::B]);
  const auto u = build_unit_blocks(b.cfg.unit, true);
  for (const auto& ms : b.layout.states()) {
    if (ms.key.s >= ms.key.k) {
      EXPECT_EQ(ab.segment(ms.offset, ms.count()).cwiseAbs().maxCoeff(), 0.0);
      continue;
    }
    const Vector expect = kron(Matrix((u.HA + u.HB).rowwise().sum()), ones_col(ms.facility)).col(0);
    EXPECT_LE((ab.segment(ms.offset, ms.count()) - expect).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Assembler, DetectsBrokenGenerator) {
  Built b = build(2, 2);
  b.g[Event::A] = SparseMatrix(b.g.D.rows(), b.g.D.cols());
  b.g.D = SparseMatrix(b.g.D.rows(), b.g.D.cols());
  for (Event e : kAllEvents) b.g.D += b.g[e];
  EXPECT_THROW(check_generators(b.g, b.layout), SolverError);
}

TEST(Assembler, SparseDump) {
  const Built b = build(1, 1);
  std::ostringstream os;
  write_sparse(os, b.g.D);
  EXPECT_EQ(os.str().rfind("# dimension " + std::to_string(b.layout.dimension()), 0), 0u);
}
