#pragma once

#include <span>
#include <vector>

#include "dsauction/model.hpp"

namespace dsauction {

/// sum_i u_i(d_i) + sum_j v_j(g_j - a_j). Throws DomainError when an
/// allocation is negative or exceeds generation, or sizes mismatch.
double social_welfare(const Scenario& s, std::span<const double> demands,
                      std::span<const double> avails);
double buyers_welfare(const Scenario& s, std::span<const double> demands);
double sellers_welfare(const Scenario& s, std::span<const double> avails);

/// u(d) - b
double buyer_payoff(const LogUtility& u, double demand, double bid);
/// v(g - a) + p a
double seller_payoff(const SellerSpec& seller, double avail, double price);

/// Price-anticipating buyer objective with the total availability
/// (virtual agent included) held at `total`:
/// (1 - d/T) u(d) + (1/T) int_0^d u.
double pi_buyer(const LogUtility& u, double demand, double total);

/// Price-anticipating seller objective with the other agents' availability
/// (virtual agent included) held at `others`:
/// v(g - a) (a + O)/O - (1/O) int_0^a v(g - z) dz.
/// Throws DegenerateMarketError for others <= 0.
double pi_seller(const SellerSpec& seller, double avail, double others);

/// Sum of pi_buyer and pi_seller with totals taken from the point itself,
/// a0 included: buyers see a0 + sum a, seller j sees a0 + sum_{j' != j} a_j'.
double anticipation_objective(const Scenario& s, std::span<const double> demands,
                              std::span<const double> avails);

/// Totals held fixed while the allocation varies.
struct FrozenTotals {
  double buyer_total = 0.0;
  std::vector<double> seller_others;
};

/// Totals as seen at a given allocation.
FrozenTotals totals_at(const Scenario& s, std::span<const double> avails);

/// Same objective with externally frozen totals, minus ps * sum a.
/// Separable and concave in (d, a); the price-anticipating equilibrium is its
/// constrained maximizer when the totals are those of the equilibrium itself.
double frozen_anticipation_objective(const Scenario& s, std::span<const double> demands,
                                     std::span<const double> avails, const FrozenTotals& t);

/// (U* - U) / U* clamped to [0, 1]. Throws DegenerateMarketError if U* <= 0.
double efficiency_loss(double optimal_welfare, double welfare);

/// Loss relative to the price-taking optimum of `s`.
double efficiency_loss(const Scenario& s, std::span<const double> demands,
                       std::span<const double> avails);

/// ps * sum a (the virtual agent's volume is bought back, not traded).
double revenue(double ps, std::span<const double> avails);

}  // namespace dsauction
