#include <gtest/gtest.h>

#include <sstream>

#include "mmapsys/optimizer.hpp"

using namespace mmapsys;

namespace {

ModelConfig cell(int n, int R, bool pm, VacationFamily f) { return configure_cell(reference_config(), {n, R, pm, f}); }

}  // namespace

TEST(NelderMead, Quadratic) {
  auto f = [](const Vector& x) { return -(std::pow(std::log(x(0)) - 1.0, 2) + std::pow(std::log(x(1)) + 0.5, 2)); };
  const OptimizationResult r = nelder_mead(f, Vector::Ones(2));
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x(0), std::exp(1.0), 1e-4);
  EXPECT_NEAR(r.x(1), std::exp(-0.5), 1e-4);
  EXPECT_LE(r.evaluations, 500);
}

TEST(NelderMead, EvaluationBudget) {
  NelderMeadOptions opt;
  opt.max_evaluations = 20;
  opt.diameter_tol = 0;
  const OptimizationResult r = nelder_mead([](const Vector& x) { return -x.squaredNorm(); }, Vector::Ones(2), opt);
  EXPECT_FALSE(r.converged);
  EXPECT_LE(r.evaluations, 20 + 2);
}

TEST(GoldenSection, FindsLogQuadraticPeak) {
  const OptimizationResult r = golden_section([](double x) { return -std::pow(std::log(x / 0.3), 2); }, 1e-3, 10);
  EXPECT_NEAR(r.x(0), 0.3, 1e-6);
}

TEST(Optimize, AgreesWithGoldenSectionForExponential) {
  const ModelConfig c = cell(2, 2, true, VacationFamily::exponential);
  const OptimizationResult nm = optimize(c, default_start(c.family));
  const OptimizationResult gs = golden_section([&](double x) { return evaluate(c, Vector::Constant(1, x)).phi; },
                                               1e-2, 10, 1e-6);
  EXPECT_NEAR(nm.x(0), gs.x(0), 1e-3 * gs.x(0));
  EXPECT_NEAR(nm.phi, gs.phi, 1e-8);
  EXPECT_GT(nm.x(0), 0.0);
}

TEST(Optimize, ImprovesOnStartAndIsDeterministic) {
  const ModelConfig c = cell(3, 2, true, VacationFamily::erlang2);
  const Vector x0 = default_start(c.family);
  const OptimizationResult a = optimize(c, x0);
  const OptimizationResult b = optimize(c, x0);
  EXPECT_GE(a.phi, evaluate(c, x0).phi);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.phi, b.phi);
  EXPECT_TRUE((a.x.array() > 0).all());
}

TEST(Optimize, RestartsReachSameOptimum) {
  const ModelConfig c = cell(4, 3, true, VacationFamily::erlang2);
  const OptimizationResult a = optimize(c, vec({1.0, 1.0}));
  const OptimizationResult b = optimize(c, vec({0.3, 2.5}));
  EXPECT_NEAR(a.phi, b.phi, 1e-6);
  EXPECT_NEAR(a.x(0), b.x(0), 0.01);
  EXPECT_NEAR(a.x(1), b.x(1), 0.01);
}

TEST(Optimize, ErrorsNameThePoint) {
  try {
    evaluate(reference_config(), vec({-1.0, 1.0}));
    FAIL() << "expected an error";
  } catch (const SolverError& e) {
    EXPECT_NE(std::string(e.what()).find("at x = (-1"), std::string::npos);
  }
}

TEST(Grid, Cells) {
  const auto cells = grid_cells();
  EXPECT_EQ(cells.size(), 36u);
  for (const auto& c : cells) {
    EXPECT_GE(c.R, 1);
    EXPECT_LE(c.R, c.n);
  }
}

TEST(Grid, ThreadedRunMatchesSerial) {
  const std::vector<GridCell> cells = {{2, 1, true, VacationFamily::exponential},
                                       {2, 2, false, VacationFamily::exponential}};
  const auto serial = run_grid(reference_config(), cells, 1);
  const auto pooled = run_grid(reference_config(), cells, 2);
  for (size_t i = 0; i < cells.size(); ++i) {
    EXPECT_TRUE(serial[i].error.empty());
    EXPECT_EQ(serial[i].opt.phi, pooled[i].opt.phi);
  }
  std::ostringstream os;
  write_grid_csv(os, serial, false);
  EXPECT_EQ(os.str().rfind("vacation,pm,n4_R4,", 0), 0u);
}
