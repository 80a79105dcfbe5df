#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>
#include <vector>

#include "mmapsys/evaluation.hpp"

namespace mmapsys {

struct PointEvaluation {
  double phi = 0;
  double availability = 0;
  EventRates rates;
};

/// Φ, A and rates with the vacation built from x.
inline PointEvaluation evaluate(const ModelConfig& base, const Vector& x) {
  try {
    ModelConfig cfg = base;
    cfg.set_vacation(x);
    const Model model(cfg);
    const EvaluationReport rep = evaluate_stationary(model);
    return {rep.profit.phi, rep.availability, rep.rates};
  } catch (const Error& e) {
    std::ostringstream os;
    os << e.what() << " at x = (";
    for (Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << std::setprecision(17) << x(i);
    os << ")";
    throw SolverError(os.str());
  }
}

struct OptimizationResult {
  Vector x;
  double phi = -INFINITY;
  double availability = 0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

struct NelderMeadOptions {
  double diameter_tol = 1e-6;  // in log-parameter space
  int max_evaluations = 500;
  double initial_step = 0.3;
};

/// Maximizes f over the positive orthant by Nelder–Mead on y = log x.
inline OptimizationResult nelder_mead(const std::function<double(const Vector&)>& f, const Vector& x0,
                                      const NelderMeadOptions& opt = {}) {
  const Index n = x0.size();
  if ((x0.array() <= 0.0).any()) throw ConfigError("x0 must be strictly positive");
  OptimizationResult res;
  auto g = [&](const Vector& y) {
    ++res.evaluations;
    const double v = f(y.array().exp().matrix());
    return std::isfinite(v) ? -v : INFINITY;
  };
  std::vector<Vector> simplex;
  std::vector<double> val;
  const Vector y0 = x0.array().log().matrix();
  simplex.push_back(y0);
  for (Index i = 0; i < n; ++i) {
    Vector y = y0;
    y(i) += opt.initial_step;
    simplex.push_back(y);
  }
  for (const auto& y : simplex) val.push_back(g(y));
  std::vector<size_t> order(simplex.size());
  auto diameter = [&]() {
    double dmax = 0.0;
    for (size_t a = 0; a < simplex.size(); ++a)
      for (size_t b = a + 1; b < simplex.size(); ++b) dmax = std::max(dmax, (simplex[a] - simplex[b]).norm());
    return dmax;
  };
  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return val[a] < val[b]; });
    if (diameter() < opt.diameter_tol) {
      res.converged = true;
      break;
    }
    if (res.evaluations >= opt.max_evaluations) break;
    ++res.iterations;
    const size_t worst = order.back();
    const size_t second = order[order.size() - 2];
    const size_t best = order.front();
    Vector centroid = Vector::Zero(n);
    for (size_t i = 0; i + 1 < order.size(); ++i) centroid += simplex[order[i]];
    centroid /= static_cast<double>(n);
    const Vector xr = centroid + (centroid - simplex[worst]);
    const double fr = g(xr);
    if (fr < val[best]) {
      const Vector xe = centroid + 2.0 * (centroid - simplex[worst]);
      const double fe = g(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        val[worst] = fe;
      } else {
        simplex[worst] = xr;
        val[worst] = fr;
      }
      continue;
    }
    if (fr < val[second]) {
      simplex[worst] = xr;
      val[worst] = fr;
      continue;
    }
    const bool outside = fr < val[worst];
    const Vector xc = outside ? Vector(centroid + 0.5 * (xr - centroid))
                              : Vector(centroid + 0.5 * (simplex[worst] - centroid));
    const double fc = g(xc);
    if (fc < (outside ? fr : val[worst])) {
      simplex[worst] = xc;
      val[worst] = fc;
      continue;
    }
    for (size_t i = 1; i < order.size(); ++i) {
      const size_t idx = order[i];
      simplex[idx] = simplex[best] + 0.5 * (simplex[idx] - simplex[best]);
      val[idx] = g(simplex[idx]);
    }
  }
  const size_t best = order.front();
  res.x = simplex[best].array().exp().matrix();
  res.phi = -val[best];
  return res;
}

/// Golden-section maximization of a 1-D function over [lo, hi] in log scale.
inline OptimizationResult golden_section(const std::function<double(double)>& f, double lo, double hi,
                                         double tol = 1e-8) {
  OptimizationResult res;
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::log(lo), b = std::log(hi);
  auto g = [&](double y) {
    ++res.evaluations;
    return f(std::exp(y));
  };
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = g(c), fd = g(d);
  while (b - a > tol) {
    ++res.iterations;
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = g(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = g(d);
    }
  }
  res.x = Vector::Constant(1, std::exp(fc > fd ? c : d));
  res.phi = std::max(fc, fd);
  res.converged = true;
  return res;
}

inline Vector default_start(VacationFamily f) { return Vector::Ones(family_dimension(f)); }

/// Maximizes stationary Φ over the vacation parameters of cfg.family.
inline OptimizationResult optimize(const ModelConfig& cfg, const Vector& x0, const NelderMeadOptions& opt = {}) {
  OptimizationResult r = nelder_mead([&](const Vector& x) { return evaluate(cfg, x).phi; }, x0, opt);
  const PointEvaluation at = evaluate(cfg, r.x);
  r.phi = at.phi;
  r.availability = at.availability;
  return r;
}

struct GridCell {
  int n = 0;
  int R = 0;
  bool pm = true;
  VacationFamily family = VacationFamily::erlang2;
};

struct GridResult {
  GridCell cell;
  OptimizationResult opt;
  EventRates rates;
  std::string error;  // empty on success
};

/// The 36 cells: n in {2,3,4}, R in 1..n, PM on/off, exponential or Erlang vacation.
inline std::vector<GridCell> grid_cells() {
  std::vector<GridCell> cells;
  for (VacationFamily f : {VacationFamily::exponential, VacationFamily::erlang2}) {
    for (bool pm : {true, false}) {
      for (int n = 2; n <= 4; ++n) {
        for (int R = 1; R <= n; ++R) cells.push_back({n, R, pm, f});
      }
    }
  }
  return cells;
}

inline ModelConfig configure_cell(const ModelConfig& base, const GridCell& c) {
  ModelConfig cfg = base;
  cfg.n = c.n;
  cfg.R = c.R;
  cfg.pm = c.pm;
  cfg.family = c.family;
  cfg.set_vacation(default_start(c.family));
  return cfg;
}

/// Optimizes every cell on a pool of `threads` workers. A failing cell records its error and the
/// rest carry on.
inline std::vector<GridResult> run_grid(const ModelConfig& base, const std::vector<GridCell>& cells,
                                        unsigned threads = 1, const NelderMeadOptions& opt = {}) {
  std::vector<GridResult> out(cells.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t i = next++; i < cells.size(); i = next++) {
      GridResult& r = out[i];
      r.cell = cells[i];
      try {
        const ModelConfig cfg = configure_cell(base, cells[i]);
        r.opt = optimize(cfg, default_start(cells[i].family), opt);
        r.rates = evaluate(cfg, r.opt.x).rates;
      } catch (const std::exception& e) {
        r.error = e.what();
      }
    }
  };
  threads = std::max(1u, threads);
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return out;
}

/// Table layout: one row per (family, PM), one column per (n, R).
inline void write_grid_csv(std::ostream& os, const std::vector<GridResult>& results, bool availability) {
  std::vector<std::pair<int, int>> cols;
  for (int n = 4; n >= 2; --n)
    for (int R = n; R >= 1; --R) cols.emplace_back(n, R);
  os << "vacation,pm";
  for (auto [n, R] : cols) os << ",n" << n << "_R" << R;
  os << '\n' << std::setprecision(6);
  for (VacationFamily f : {VacationFamily::exponential, VacationFamily::erlang2}) {
    for (bool pm : {true, false}) {
      os << family_name(f) << ',' << (pm ? "on" : "off");
      for (auto [n, R] : cols) {
        os << ',';
        for (const auto& r : results) {
          if (r.cell.n == n && r.cell.R == R && r.cell.pm == pm && r.cell.family == f && r.error.empty()) {
            os << (availability ? r.opt.availability : r.opt.phi);
          }
        }
      }
      os << '\n';
    }
  }
}

}  // namespace mmapsys
