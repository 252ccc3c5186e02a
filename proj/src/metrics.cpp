#include "dsauction/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "dsauction/equilibrium.hpp"
#include "dsauction/errors.hpp"

namespace dsauction {

namespace {

void require_sizes(const Scenario& s, std::span<const double> d, std::span<const double> a) {
  if (d.size() != s.buyers.size() || a.size() != s.sellers.size())
    throw DomainError("allocation size does not match the scenario");
}

void require_feasible_avail(const SellerSpec& seller, double a) {
  if (!(a >= 0.0 && a <= seller.generation)) {
    std::ostringstream os;
    os << "availability " << a << " outside [0, " << seller.generation << "]";
    throw DomainError(os.str());
  }
}

// int_0^a v(g - z) dz = V(g) - V(g - a) with V the antiderivative of v.
double retained_integral(const SellerSpec& seller, double a) {
  const auto& v = seller.utility;
  const double g = seller.generation;
  return v.integral(g) - v.integral(std::max(0.0, g - a));
}

}  // namespace

double buyers_welfare(const Scenario& s, std::span<const double> demands) {
  if (demands.size() != s.buyers.size()) throw DomainError("demand size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < demands.size(); ++i) total += s.buyers[i].utility.value(demands[i]);
  return total;
}

double sellers_welfare(const Scenario& s, std::span<const double> avails) {
  if (avails.size() != s.sellers.size()) throw DomainError("availability size mismatch");
  double total = 0.0;
  for (std::size_t j = 0; j < avails.size(); ++j) {
    const auto& seller = s.sellers[j];
    require_feasible_avail(seller, avails[j]);
    total += seller.utility.value(seller.generation - avails[j]);
  }
  return total;
}

double social_welfare(const Scenario& s, std::span<const double> demands,
                      std::span<const double> avails) {
  require_sizes(s, demands, avails);
  return buyers_welfare(s, demands) + sellers_welfare(s, avails);
}

double buyer_payoff(const LogUtility& u, double demand, double bid) {
  if (bid < 0.0) throw DomainError("buyer_payoff: bid must be >= 0");
  return u.value(demand) - bid;
}

double seller_payoff(const SellerSpec& seller, double avail, double price) {
  require_feasible_avail(seller, avail);
  if (price < 0.0) throw DomainError("seller_payoff: price must be >= 0");
  return seller.utility.value(seller.generation - avail) + price * avail;
}

double pi_buyer(const LogUtility& u, double demand, double total) {
  if (!(total > 0.0)) throw DegenerateMarketError("pi_buyer: total availability is zero");
  if (demand < 0.0 || demand > total) throw DomainError("pi_buyer: demand outside [0, total]");
  return (1.0 - demand / total) * u.value(demand) + u.integral(demand) / total;
}

double pi_seller(const SellerSpec& seller, double avail, double others) {
  if (!(others > 0.0)) throw DegenerateMarketError("pi_seller: other availability is zero");
  require_feasible_avail(seller, avail);
  const double retained = seller.utility.value(seller.generation - avail);
  return retained * (avail + others) / others - retained_integral(seller, avail) / others;
}

FrozenTotals totals_at(const Scenario& s, std::span<const double> avails) {
  const double a0 = s.aggregator.virtual_availability;
  const double total = std::accumulate(avails.begin(), avails.end(), a0);
  FrozenTotals t{total, {}};
  t.seller_others.reserve(avails.size());
  for (double a : avails) t.seller_others.push_back(total - a);
  return t;
}

double frozen_anticipation_objective(const Scenario& s, std::span<const double> demands,
                                     std::span<const double> avails, const FrozenTotals& t) {
  require_sizes(s, demands, avails);
  if (t.seller_others.size() != avails.size()) throw DomainError("frozen totals size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < demands.size(); ++i)
    total += pi_buyer(s.buyers[i].utility, demands[i], t.buyer_total);
  for (std::size_t j = 0; j < avails.size(); ++j)
    total += pi_seller(s.sellers[j], avails[j], t.seller_others[j]);
  return total - s.aggregator.surcharge * std::accumulate(avails.begin(), avails.end(), 0.0);
}

double anticipation_objective(const Scenario& s, std::span<const double> demands,
                              std::span<const double> avails) {
  require_sizes(s, demands, avails);
  const auto t = totals_at(s, avails);
  double total = 0.0;
  for (std::size_t i = 0; i < demands.size(); ++i)
    total += pi_buyer(s.buyers[i].utility, demands[i], t.buyer_total);
  for (std::size_t j = 0; j < avails.size(); ++j)
    total += pi_seller(s.sellers[j], avails[j], t.seller_others[j]);
  return total;
}

double efficiency_loss(double optimal_welfare, double welfare) {
  if (!(optimal_welfare > 0.0))
    throw DegenerateMarketError("efficiency_loss: optimal welfare is not positive");
  return std::clamp((optimal_welfare - welfare) / optimal_welfare, 0.0, 1.0);
}

double efficiency_loss(const Scenario& s, std::span<const double> demands,
                       std::span<const double> avails) {
  return efficiency_loss(solve_price_taking(s).welfare, social_welfare(s, demands, avails));
}

double revenue(double ps, std::span<const double> avails) {
  if (ps < 0.0) throw DomainError("revenue: surcharge must be >= 0");
  return ps * std::accumulate(avails.begin(), avails.end(), 0.0);
}

}  // namespace dsauction
