#pragma once

#include "mmapsys/economics.hpp"

namespace mmapsys {

/// A configured model with its layout and generators, built once.
struct Model {
  ModelConfig cfg;
  StateSpaceLayout layout;
  MmapGenerators gens;

  explicit Model(ModelConfig c) : cfg(std::move(c)) {
    cfg.validate();
    layout = StateSpaceLayout::enumerate(cfg);
    gens = assemble_all(cfg, layout);
  }
};

enum class StationaryMethod { block, direct };

struct EvaluationReport {
  RowVector pi;
  double availability = 0;
  OccupancyTable occupancy;
  EventRates rates;
  Profit profit;
  double residual = 0;  // ‖πD‖_∞
};

inline EvaluationReport evaluate_stationary(const ModelConfig& cfg, const StateSpaceLayout& layout,
                                            const MmapGenerators& gens,
                                            StationaryMethod method = StationaryMethod::block) {
  EvaluationReport r;
  r.pi = method == StationaryMethod::block ? stationary_block(gens.D, layout) : stationary_direct(gens.D);
  r.residual = balance_residual(r.pi, gens.D);
  r.availability = availability_stationary(r.pi, layout);
  r.occupancy = occupancy(r.pi, layout);
  r.rates = event_rates_stationary(r.pi, gens);
  r.profit = profit_stationary(r.pi, build_rewards(cfg, layout), r.rates, cfg);
  return r;
}

inline EvaluationReport evaluate_stationary(const Model& m, StationaryMethod method = StationaryMethod::block) {
  return evaluate_stationary(m.cfg, m.layout, m.gens, method);
}

}  // namespace mmapsys
