// Batch front end: scenario generation, iterative runs, direct solves, sweeps.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dsauction/engine.hpp"
#include "dsauction/equilibrium.hpp"
#include "dsauction/errors.hpp"
#include "dsauction/scenario_io.hpp"
#include "dsauction/sweep.hpp"

using namespace dsauction;

namespace {

constexpr int kExitIo = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitNotConverged = 3;

struct Flags {
  std::string scenario;
  std::string out;
  std::uint64_t seed = 0;
  std::string mode = "pt";
  std::optional<double> a0;
  std::optional<double> ps;
  double theta = 0.5;
  int max_iters = 10000;
  double tol = 1e-8;
  std::string market_power = "exact";
  int points = 100;
  std::size_t buyers = 2;
  std::size_t sellers = 3;
  double halfwidth = 0.5;
  double gmin = 0.5;
  double gmax = 2.0;
};

std::string num(double v) { return format_number(v); }

Scenario load(const Flags& f) {
  if (f.scenario.empty()) throw IoError("--scenario is required");
  Scenario s = load_scenario(f.scenario);
  if (f.a0) s.aggregator.virtual_availability = *f.a0;
  if (f.ps) s.aggregator.surcharge = *f.ps;
  require_valid(s);
  return s;
}

void write_or_print(const std::string& out, const std::string& content) {
  if (out.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream file(out, std::ios::binary);
  if (!file) throw IoError("cannot open '" + out + "' for writing");
  file << content;
}

bool anticipating(const Flags& f) {
  if (f.mode == "pa") return true;
  if (f.mode == "pt") return false;
  throw ValidationError("--mode must be 'pt' or 'pa'");
}

std::string summary(const Equilibrium& eq) {
  std::ostringstream os;
  os << "p=" << num(eq.price) << " volume=" << num(eq.volume) << " U=" << num(eq.welfare)
     << " R=" << num(eq.revenue) << " L=" << num(eq.loss);
  return os.str();
}

int cmd_gen(const Flags& f) {
  GenerationConfig cfg;
  cfg.n_buyers = f.buyers;
  cfg.n_sellers = f.sellers;
  cfg.halfwidth = f.halfwidth;
  cfg.g_min = f.gmin;
  cfg.g_max = f.gmax;
  cfg.seed = f.seed;
  Scenario s = generate_scenario(cfg);
  if (f.a0) s.aggregator.virtual_availability = *f.a0;
  if (f.ps) s.aggregator.surcharge = *f.ps;
  require_valid(s);
  write_or_print(f.out, format_scenario(s));
  return 0;
}

int cmd_run(const Flags& f) {
  const Scenario s = load(f);
  EngineConfig cfg;
  cfg.mode = anticipating(f) ? Mode::PriceAnticipating : Mode::PriceTaking;
  if (f.market_power == "estimated")
    cfg.market_power = MarketPowerSource::Estimated;
  else if (f.market_power != "exact")
    throw ValidationError("--market-power must be 'exact' or 'estimated'");
  cfg.damping = f.theta;
  cfg.max_iters = f.max_iters;
  cfg.price_tol = f.tol;
  cfg.bid_tol = f.tol;
  const auto outcome = run_auction(s, cfg);
  if (!f.out.empty()) emit_trace(outcome, f.out);
  std::cout << "converged=" << (outcome.converged ? 1 : 0)
            << " iterations=" << outcome.iterations.size() << ' ' << summary(outcome.final)
            << '\n';
  return outcome.converged ? 0 : kExitNotConverged;
}

int cmd_solve(const Flags& f) {
  const Scenario s = load(f);
  Equilibrium eq;
  if (anticipating(f))
    eq = solve_price_anticipation(s);
  else if (s.aggregator.surcharge > 0.0)
    eq = solve_surcharge(s, s.aggregator.surcharge);
  else
    eq = solve_price_taking(s);
  if (f.out.empty()) {
    std::cout << equilibrium_json(eq);
  } else {
    write_or_print(f.out, equilibrium_json(eq));
    std::cout << "regime=" << to_string(eq.regime) << ' ' << summary(eq)
              << " kkt=" << num(eq.kkt.stationarity_residual) << '\n';
  }
  return 0;
}

int cmd_sweep_surcharge(const Flags& f) {
  const Scenario s = load(f);
  const double bound = surcharge_upper_bound(s);
  const auto grid = linear_grid(0.0, bound, f.points);
  write_or_print(f.out, sweep_csv(sweep_surcharge(s, grid)));
  if (!f.out.empty()) {
    const auto best = optimal_surcharge(s);
    std::cout << "bound=" << num(bound) << " ps_opt=" << num(best.surcharge)
              << " R_opt=" << num(best.revenue) << '\n';
  }
  return 0;
}

int cmd_sweep_virtual(const Flags& f) {
  const Scenario s = load(f);
  const double scale = s.total_generation();
  const auto grid = log_grid(1e-3 * scale, 1e4 * scale, f.points);
  const auto r = sweep_virtual(s, grid);
  write_or_print(f.out, sweep_csv(r));
  return 0;
}

int cmd_curves(const Flags& f) {
  const Scenario s = load(f);
  const double l = s.min_seller_reservation();
  const double m = s.max_seller_marginal_at_zero();
  const double n = s.max_buyer_marginal_at_zero();
  const double top = 1.1 * std::max(m, n);
  std::ostringstream os;
  os << "p,D,A\n";
  for (int k = 1; k <= f.points; ++k) {
    const double p = top * k / f.points;
    os << num(p) << ',' << num(demand_function(s, p)) << ',' << num(availability_function(s, p))
       << '\n';
  }
  write_or_print(f.out, os.str());
  (f.out.empty() ? std::cerr : std::cout)
      << "marks l=" << num(l) << " m=" << num(m) << " n=" << num(n) << '\n';
  return 0;
}

int cmd_compare(const Flags& f) {
  std::ostringstream os;
  os << "template,buyers,sellers,U_PT,U_PA,buyers_PT,buyers_PA,sellers_PT,sellers_PA\n";
  for (std::size_t t = 0; t < kScenarioTemplates.size(); ++t) {
    Scenario s = generate_scenario(template_config(t, f.seed + t));
    s.aggregator.virtual_availability = f.a0.value_or(0.0);
    const auto pt = solve_price_taking(s);
    const auto pa = solve_price_anticipation(s);
    os << t << ',' << s.buyers.size() << ',' << s.sellers.size() << ',' << num(pt.welfare) << ','
       << num(pa.welfare) << ',' << num(pt.buyers_welfare) << ',' << num(pa.buyers_welfare) << ','
       << num(pt.sellers_welfare) << ',' << num(pa.sellers_welfare) << '\n';
  }
  write_or_print(f.out, os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Double auction simulator for energy trading between buyers and sellers"};
  app.require_subcommand(1);
  Flags f;

  auto scenario_flags = [&f](CLI::App* c) {
    c->add_option("--scenario", f.scenario, "Scenario JSON file");
    c->add_option("--out", f.out, "Output file (stdout when omitted)");
    c->add_option("--a0", f.a0, "Override the virtual availability");
    c->add_option("--ps", f.ps, "Override the surcharge");
  };

  auto* gen = app.add_subcommand("gen", "Generate a random scenario");
  gen->add_option("--out", f.out, "Output file (stdout when omitted)");
  gen->add_option("--seed", f.seed, "RNG seed");
  gen->add_option("--buyers", f.buyers)->check(CLI::PositiveNumber);
  gen->add_option("--sellers", f.sellers)->check(CLI::PositiveNumber);
  gen->add_option("--halfwidth", f.halfwidth, "Half width of the x, y distribution around 1");
  gen->add_option("--gmin", f.gmin);
  gen->add_option("--gmax", f.gmax);
  gen->add_option("--a0", f.a0);
  gen->add_option("--ps", f.ps);

  auto* run = app.add_subcommand("run", "Run the iterative auction and write its trace");
  scenario_flags(run);
  run->add_option("--mode", f.mode, "pt or pa");
  run->add_option("--theta", f.theta, "Price damping in (0, 1]");
  run->add_option("--max-iters", f.max_iters);
  run->add_option("--tol", f.tol, "Price and bid tolerance");
  run->add_option("--market-power", f.market_power, "exact or estimated");

  auto* solve = app.add_subcommand("solve", "Solve the equilibrium directly");
  scenario_flags(solve);
  solve->add_option("--mode", f.mode, "pt or pa");

  auto* sps = app.add_subcommand("sweep-surcharge", "Sweep ps from 0 to its upper bound");
  scenario_flags(sps);
  sps->add_option("--points", f.points)->check(CLI::Range(2, 100000));

  auto* sa0 = app.add_subcommand("sweep-virtual", "Sweep a0 on a log grid (anticipating agents)");
  scenario_flags(sa0);
  sa0->add_option("--points", f.points)->check(CLI::Range(2, 100000));

  auto* curves = app.add_subcommand("curves", "Sample D(p) and A(p)");
  scenario_flags(curves);
  curves->add_option("--points", f.points)->check(CLI::Range(2, 1000000));

  auto* compare = app.add_subcommand("compare", "Welfare under PT and PA for the five templates");
  compare->add_option("--seed", f.seed);
  compare->add_option("--a0", f.a0);
  compare->add_option("--out", f.out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_gen(f);
    if (*run) return cmd_run(f);
    if (*solve) return cmd_solve(f);
    if (*sps) return cmd_sweep_surcharge(f);
    if (*sa0) return cmd_sweep_virtual(f);
    if (*curves) return cmd_curves(f);
    if (*compare) return cmd_compare(f);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return 0;
}
