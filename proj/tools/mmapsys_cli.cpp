// mmapsys: command-line front end for the reliability engine.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <locale>
#include <sstream>
#include <string>
#include <vector>

#include "mmapsys/model_file.hpp"
#include "mmapsys/optimizer.hpp"
#include "mmapsys/simulator.hpp"

using namespace mmapsys;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Options {
  std::string model;
  std::string out;
  std::string t_grid = "0,1,10,100,1000,10000";
  int n = 0;
  int R = 0;
  std::string pm;
  std::string vacation;
  std::uint64_t seed = 1;
  double horizon = 1e6;
  int reps = 20;
  bool all = false;
  unsigned threads = 1;
};

/// Failed validation: reported but not an internal error.
struct ValidationFailed {};

ModelConfig load(const Options& o) {
  ModelConfig c = load_model(o.model);
  if (o.n > 0) c.n = o.n;
  if (o.R > 0) c.R = o.R;
  if (!o.pm.empty()) {
    if (o.pm != "on" && o.pm != "off") throw ConfigError("--pm must be 'on' or 'off'");
    c.pm = o.pm == "on";
  }
  if (!o.vacation.empty()) {
    const VacationFamily f = parse_family(o.vacation);
    if (f != c.family) {
      // The file's parameters belong to the other family; start from unit rates.
      c.family = f;
      c.set_vacation(default_start(f));
    }
  }
  c.validate();
  return c;
}

std::ostringstream csv() {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(6);
  return os;
}

void write_file(const Options& o, const std::string& name, const std::string& body) {
  if (o.out.empty()) return;
  fs::create_directories(o.out);
  std::ofstream f(fs::path(o.out) / name);
  if (!f) throw Error("cannot write " + (fs::path(o.out) / name).string());
  f << body;
}

void write_json(const Options& o, const std::string& name, const json& j) { write_file(o, name, j.dump(2) + "\n"); }

json rates_json(const EventRates& r) {
  return {{"rep", r.rep}, {"mi", r.mi}, {"nr", r.nr}, {"ret", r.ret}, {"retbe", r.retbe}, {"after", r.after}, {"ns", r.ns}};
}

json occupancy_json(const OccupancyTable& t) {
  json rows = json::array();
  for (const auto& [key, val] : t.cells) {
    const auto& [k, s, x] = key;
    rows.push_back({{"k", k}, {"s", s}, {"x", presence_name(x)}, {"psi", val}});
  }
  return rows;
}

json config_json(const ModelConfig& c) {
  std::vector<double> x(c.vacation_params.data(), c.vacation_params.data() + c.vacation_params.size());
  return {{"n", c.n}, {"R", c.R}, {"pm", c.pm}, {"vacation", family_name(c.family)}, {"vacation_params", x}};
}

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> out;
  std::istringstream in(s);
  in.imbue(std::locale::classic());
  std::string tok;
  while (std::getline(in, tok, ',')) {
    std::istringstream v(tok);
    v.imbue(std::locale::classic());
    double t;
    if (!(v >> t) || t < 0) throw ConfigError("bad --t-grid entry '" + tok + "'");
    out.push_back(t);
  }
  if (out.empty()) throw ConfigError("--t-grid is empty");
  if (!std::is_sorted(out.begin(), out.end())) throw ConfigError("--t-grid must be ascending");
  return out;
}

void cmd_build(const Options& o) {
  const ModelConfig c = load(o);
  const auto layout = StateSpaceLayout::enumerate(c);
  const auto g = assemble_all(c, layout, false);
  const double res = max_row_sum_residual(g.D);
  std::cout << "dimension " << layout.dimension() << "\nmacro-states " << layout.states().size() << "\n";
  json nnz;
  for (Event e : kAllEvents) {
    std::cout << "nnz " << event_name(e) << " " << g[e].nonZeros() << "\n";
    nnz[event_name(e)] = g[e].nonZeros();
  }
  std::cout << "nnz total " << g.D.nonZeros() << "\nresidual " << std::setprecision(3) << res << "\n";
  std::ostringstream states;
  layout.write_csv(states);
  write_file(o, "states.csv", states.str());
  write_json(o, "build.json",
             {{"config", config_json(c)}, {"dimension", layout.dimension()}, {"nnz", nnz}, {"residual", res}});
  if (res > kConservationTolerance) throw SolverError("generator rows do not sum to zero");
}

void cmd_steady(const Options& o) {
  const Model m(load(o));
  const EvaluationReport r = evaluate_stationary(m);
  auto os = csv();
  os << "index,k,s,x,queue,pi\n";
  for (Index g = 0; g < m.layout.dimension(); ++g) {
    const auto key = m.layout.key_of(g);
    os << g << ',' << key.k << ',' << key.s << ',' << presence_name(key.x) << ',' << key.queue.str() << ','
       << r.pi(g) << '\n';
  }
  write_file(o, "stationary.csv", os.str());
  write_json(o, "stationary.json",
             {{"config", config_json(m.cfg)},
              {"pi", std::vector<double>(r.pi.data(), r.pi.data() + r.pi.size())},
              {"sum", r.pi.sum()},
              {"residual", r.residual}});
  std::cout << std::setprecision(10) << "sum " << r.pi.sum() << "\nresidual " << r.residual << "\n";
}

void cmd_measures(const Options& o) {
  const Model m(load(o));
  const EvaluationReport r = evaluate_stationary(m);
  auto occ = csv();
  write_occupancy_csv(occ, r.occupancy);
  auto rates = csv();
  write_rates_csv(rates, r.availability, r.rates);
  write_file(o, "occupancy.csv", occ.str());
  write_file(o, "rates.csv", rates.str());
  write_json(o, "measures.json",
             {{"config", config_json(m.cfg)},
              {"availability", r.availability},
              {"rates", rates_json(r.rates)},
              {"occupancy", occupancy_json(r.occupancy)}});
  std::cout << rates.str();
}

void cmd_transient(const Options& o) {
  const Model m(load(o));
  const auto ts = parse_grid(o.t_grid);
  const RowVector phi = initial_distribution(m.cfg, m.layout);
  const auto steps = transient_grid(phi, m.gens.D, ts);
  const RewardVectors v = build_rewards(m.cfg, m.layout);
  auto summary = csv();
  summary << "t,availability,operational_time,phi,rep,mi,nr,ret,retbe,after,ns\n";
  auto occ = csv();
  occ << "t,k,s,x,psi\n";
  json rows = json::array();
  for (size_t a = 0; a < ts.size(); ++a) {
    const auto& st = steps[a];
    const double avail = availability_transient(st.p, m.layout);
    const OccupancyTable integ = occupancy(st.integral, m.layout);
    const EventRates counts = event_counts_transient(st.integral, m.gens);
    const Profit p = profit_transient(st.integral, v, counts, m.cfg);
    const double mu = mean_operational_time(integ, m.cfg.n);
    summary << ts[a] << ',' << avail << ',' << mu << ',' << p.phi << ',' << counts.rep << ',' << counts.mi << ','
            << counts.nr << ',' << counts.ret << ',' << counts.retbe << ',' << counts.after << ',' << counts.ns << '\n';
    const OccupancyTable pt = occupancy(st.p, m.layout);
    for (const auto& [key, val] : pt.cells)
      occ << ts[a] << ',' << std::get<0>(key) << ',' << std::get<1>(key) << ',' << presence_name(std::get<2>(key))
          << ',' << val << '\n';
    rows.push_back({{"t", ts[a]},
                    {"availability", avail},
                    {"operational_time", mu},
                    {"phi", p.phi},
                    {"counts", rates_json(counts)},
                    {"mass", st.p.sum()},
                    {"p", std::vector<double>(st.p.data(), st.p.data() + st.p.size())}});
  }
  write_file(o, "transient.csv", summary.str());
  write_file(o, "transient_occupancy.csv", occ.str());
  write_json(o, "transient.json", {{"config", config_json(m.cfg)}, {"grid", rows}});
  std::cout << summary.str();
}

void cmd_profit(const Options& o) {
  const Model m(load(o));
  const EvaluationReport r = evaluate_stationary(m);
  const double fixed = fixed_costs(m.cfg, r.rates);
  const double renewal = r.rates.ns * m.cfg.n * m.cfg.costs.fnu;
  auto os = csv();
  os << "phi_w,phi_rf,renewal,fixed,phi,availability\n"
     << r.profit.phi_w << ',' << r.profit.phi_rf << ',' << renewal << ',' << fixed << ',' << r.profit.phi << ','
     << r.availability << '\n';
  write_file(o, "profit.csv", os.str());
  write_json(o, "profit.json",
             {{"config", config_json(m.cfg)},
              {"phi_w", r.profit.phi_w},
              {"phi_rf", r.profit.phi_rf},
              {"renewal", renewal},
              {"fixed", fixed},
              {"phi", r.profit.phi},
              {"availability", r.availability}});
  std::cout << os.str();
}

json result_json(const GridResult& r) {
  json j = {{"n", r.cell.n}, {"R", r.cell.R}, {"pm", r.cell.pm}, {"vacation", family_name(r.cell.family)}};
  if (!r.error.empty()) {
    j["error"] = r.error;
    return j;
  }
  j["x"] = std::vector<double>(r.opt.x.data(), r.opt.x.data() + r.opt.x.size());
  j["phi"] = r.opt.phi;
  j["availability"] = r.opt.availability;
  j["evaluations"] = r.opt.evaluations;
  j["converged"] = r.opt.converged;
  j["rates"] = rates_json(r.rates);
  return j;
}

void cmd_optimize(const Options& o) {
  const ModelConfig c = load(o);
  std::vector<GridCell> cells;
  if (o.all) {
    cells = grid_cells();
  } else {
    cells.push_back({c.n, c.R, c.pm, c.family});
  }
  const auto results = run_grid(c, cells, o.threads);
  json rows = json::array();
  auto os = csv();
  os << "n,R,pm,vacation,x1,x2,phi,availability,converged\n";
  bool failed = false;
  for (const auto& r : results) {
    rows.push_back(result_json(r));
    if (!r.error.empty()) {
      std::cerr << "cell n=" << r.cell.n << " R=" << r.cell.R << ": " << r.error << "\n";
      failed = true;
      continue;
    }
    os << r.cell.n << ',' << r.cell.R << ',' << (r.cell.pm ? "on" : "off") << ',' << family_name(r.cell.family)
       << ',' << r.opt.x(0) << ',';
    if (r.opt.x.size() > 1) os << r.opt.x(1);
    os << ',' << r.opt.phi << ',' << r.opt.availability << ',' << (r.opt.converged ? 1 : 0) << '\n';
  }
  write_file(o, "optimize.csv", os.str());
  write_json(o, "optimize.json", rows);
  if (o.all) {
    auto phi = csv(), avail = csv();
    write_grid_csv(phi, results, false);
    write_grid_csv(avail, results, true);
    write_file(o, "grid_profit.csv", phi.str());
    write_file(o, "grid_availability.csv", avail.str());
  }
  std::cout << os.str();
  if (failed) throw SolverError("some cells failed to optimize");
}

SimOptions sim_options(const Options& o) {
  SimOptions s;
  s.horizon = o.horizon;
  s.replications = o.reps;
  s.seed = o.seed;
  s.threads = o.threads;
  return s;
}

json estimate_json(const SimEstimate& e) { return {{"mean", e.mean}, {"se", e.se}, {"samples", e.samples}}; }

void cmd_simulate(const Options& o) {
  const ModelConfig c = load(o);
  const SimEstimates e = simulate(c, sim_options(o));
  const std::vector<std::pair<std::string, const SimEstimate*>> q = {
      {"availability", &e.availability}, {"rep", &e.rep},     {"mi", &e.mi},       {"nr", &e.nr}, {"ret", &e.ret},
      {"retbe", &e.retbe},               {"after", &e.after}, {"ns", &e.ns},       {"phi", &e.phi}};
  auto os = csv();
  os << "quantity,mean,se,samples\n";
  json j = {{"config", config_json(c)}, {"horizon", o.horizon}, {"replications", o.reps}, {"seed", o.seed},
            {"events", e.events}};
  for (const auto& [name, est] : q) {
    os << name << ',' << est->mean << ',' << est->se << ',' << est->samples << '\n';
    j["estimates"][name] = estimate_json(*est);
  }
  json occ = json::array();
  for (const auto& [key, est] : e.occupancy) {
    const auto& [k, s, vac] = key;
    occ.push_back({{"k", k}, {"s", s}, {"x", vac ? "v" : "nv"}, {"mean", est.mean}, {"se", est.se}});
  }
  j["occupancy"] = occ;
  write_file(o, "simulation.csv", os.str());
  write_json(o, "simulation.json", j);
  std::cout << os.str();
}

void cmd_validate(const Options& o) {
  const Model m(load(o));
  const EvaluationReport r = evaluate_stationary(m);
  const SimEstimates e = simulate(m.cfg, sim_options(o));
  const ValidationReport v = validate(r.availability, r.rates.rep, r.rates.mi, r.rates.ns, r.profit.phi, e);
  auto os = csv();
  os << "quantity,analytic,simulated,se,pass\n";
  json rows = json::array();
  for (const auto& l : v.lines) {
    os << l.quantity << ',' << l.analytic << ',' << l.simulated << ',' << l.se << ',' << (l.pass ? 1 : 0) << '\n';
    rows.push_back(
        {{"quantity", l.quantity}, {"analytic", l.analytic}, {"simulated", l.simulated}, {"se", l.se}, {"pass", l.pass}});
  }
  write_file(o, "validation.csv", os.str());
  write_json(o, "validation.json", {{"config", config_json(m.cfg)}, {"pass", v.pass()}, {"lines", rows}});
  std::cout << os.str() << (v.pass() ? "validation passed\n" : "validation FAILED\n");
  if (!v.pass()) throw ValidationFailed{};
}

void report_error(const std::exception& e) {
  json rec = {{"error", e.what()}};
  if (const auto* p = dynamic_cast<const ParseError*>(&e)) {
    rec["file"] = p->file();
    rec["line"] = p->line();
    rec["detail"] = p->detail();
  }
  std::cerr << "error: " << e.what() << "\n" << rec.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reliability engine for a multi-state cold-standby system with a vacationing repairperson"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--model", o.model, "model file")->required()->envname("MMAPSYS_MODEL");
    sub->add_option("--out", o.out, "output directory")->envname("MMAPSYS_OUT");
    sub->add_option("--n", o.n, "override fleet size")->envname("MMAPSYS_N");
    sub->add_option("--R", o.R, "override vacation threshold")->envname("MMAPSYS_R");
    sub->add_option("--pm", o.pm, "override preventive maintenance (on|off)")->envname("MMAPSYS_PM");
    sub->add_option("--vacation", o.vacation, "override vacation family (exp|erlang2)")->envname("MMAPSYS_VACATION");
    sub->add_option("--threads", o.threads, "worker threads")->envname("MMAPSYS_THREADS");
  };
  auto sim = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "base seed; replication r uses seed + r")->envname("MMAPSYS_SEED");
    sub->add_option("--horizon", o.horizon, "simulated time per replication")->envname("MMAPSYS_HORIZON");
    sub->add_option("--reps", o.reps, "replications")->envname("MMAPSYS_REPS");
  };

  auto* build = app.add_subcommand("build", "assemble generators and report sizes and the conservation residual");
  auto* steady = app.add_subcommand("steady", "stationary distribution");
  auto* transient = app.add_subcommand("transient", "transient measures on a time grid");
  auto* measures = app.add_subcommand("measures", "stationary availability, occupancy and event rates");
  auto* profit = app.add_subcommand("profit", "stationary profit breakdown");
  auto* optimize_cmd = app.add_subcommand("optimize", "optimize vacation parameters for one cell or the grid");
  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo estimates");
  auto* validate_cmd = app.add_subcommand("validate", "check analytic measures against the simulator");
  for (auto* s : {build, steady, transient, measures, profit, optimize_cmd, simulate_cmd, validate_cmd}) common(s);
  transient->add_option("--t-grid", o.t_grid, "comma-separated ascending times")->envname("MMAPSYS_T_GRID");
  optimize_cmd->add_flag("--all", o.all, "run every grid cell")->envname("MMAPSYS_ALL");
  sim(simulate_cmd);
  sim(validate_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*build) cmd_build(o);
    if (*steady) cmd_steady(o);
    if (*transient) cmd_transient(o);
    if (*measures) cmd_measures(o);
    if (*profit) cmd_profit(o);
    if (*optimize_cmd) cmd_optimize(o);
    if (*simulate_cmd) cmd_simulate(o);
    if (*validate_cmd) cmd_validate(o);
  } catch (const ValidationFailed&) {
    return 3;
  } catch (const std::exception& e) {
    report_error(e);
    return 1;
  }
  return 0;
}
