#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dsauction/model.hpp"

namespace dsauction {

enum class Regime { PriceTaking, Surcharge, PriceAnticipating };

std::string to_string(Regime r);

/// Lagrange multipliers and residuals of the stationarity system that
/// characterizes the regime's equilibrium.
struct KktDiagnostics {
  bool applicable = true;  ///< false for an anticipating market with nothing on offer at all
  double mu = 0.0;         ///< balance multiplier, equal to the seller price
  std::vector<double> lambda;
  std::vector<double> rho;
  double stationarity_residual = 0.0;
  double balance_residual = 0.0;
  bool complementary_slackness = true;
};

struct Equilibrium {
  Regime regime = Regime::PriceTaking;
  double price = 0.0;  ///< price received by sellers; buyers pay price + surcharge
  std::vector<double> demands;
  std::vector<double> availabilities;
  double volume = 0.0;
  double welfare = 0.0;
  double buyers_welfare = 0.0;
  double sellers_welfare = 0.0;
  double revenue = 0.0;
  double loss = 0.0;
  double surcharge = 0.0;
  double virtual_availability = 0.0;
  std::optional<double> anticipation_objective;
  bool zero_volume = false;
  KktDiagnostics kkt;
};

/// D(p) = sum_i u_i'^{-1}(p), clipped at zero. Throws DomainError for p <= 0.
double demand_function(const Scenario& s, double p);
/// A(p) = sum_j clip(g_j - v_j'^{-1}(p), 0, g_j), a0 excluded.
double availability_function(const Scenario& s, double p);

/// max_i u_i'(0) - min_j v_j'(g_j): surcharges at or above it stop all trade.
double surcharge_upper_bound(const Scenario& s);

/// Welfare-maximizing equilibrium; a0 and ps are ignored.
/// Throws ValidationError / NoTradeError for invalid scenarios.
Equilibrium solve_price_taking(const Scenario& s);

/// Price-taking equilibrium where buyers pay p + ps and sellers receive p.
Equilibrium solve_surcharge(const Scenario& s, double ps);

/// Equilibrium of price-anticipating agents with market powers diluted by the
/// scenario's virtual availability a0. Uses the scenario's surcharge.
/// Throws DegenerateMarketError when a0 = 0 and a side has fewer than two agents.
Equilibrium solve_price_anticipation(const Scenario& s);

/// Market powers implied by an allocation: beta_i = d_i / (a0 + sum d),
/// alpha_j = a_j / (a0 + sum a).
struct MarketPowers {
  std::vector<double> beta;
  std::vector<double> alpha;
};
MarketPowers implied_market_powers(const Scenario& s, std::span<const double> demands,
                                   std::span<const double> avails);

/// Evaluates the stationarity system at (mu, d, a). With `anticipating`
/// false the market powers are zero. Buyers face mu + ps.
KktDiagnostics compute_kkt(const Scenario& s, double mu, std::span<const double> demands,
                           std::span<const double> avails, double ps, bool anticipating);

struct SurchargeOptimum {
  double surcharge = 0.0;
  double revenue = 0.0;
};

/// Revenue-maximizing surcharge: dense scan of [0, bound] followed by
/// golden-section refinement around the best sample.
SurchargeOptimum optimal_surcharge(const Scenario& s, int grid_points = 1000);

/// Fills welfare, revenue, loss, volume and the objective for a solved point.
void finalize_metrics(const Scenario& s, Equilibrium& eq, double optimal_welfare);

}  // namespace dsauction
