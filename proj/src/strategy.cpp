#include "dsauction/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dsauction/errors.hpp"

namespace dsauction {

namespace {

void require_beta(double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    std::ostringstream os;
    os << "market power must lie in [0, 1], got " << beta;
    throw DomainError(os.str());
  }
}

double clip_power(double v) { return std::clamp(v, 0.0, kMarketPowerCeiling); }

std::vector<double> shares(std::span<const double> parts, double extra, const char* what) {
  for (double v : parts)
    if (v < 0.0) throw DomainError(std::string(what) + ": negative entry");
  if (extra < 0.0) throw DomainError(std::string(what) + ": negative virtual quantity");
  const double total = std::accumulate(parts.begin(), parts.end(), extra);
  if (!(total > 0.0)) throw DegenerateMarketError(std::string(what) + ": total is zero");
  std::vector<double> out(parts.size());
  std::transform(parts.begin(), parts.end(), out.begin(), [total](double v) { return v / total; });
  return out;
}

}  // namespace

double buyer_bid(double demand, const LogUtility& u, double beta) {
  require_beta(beta);
  if (demand < 0.0) throw DomainError("buyer_bid: demand must be >= 0");
  return demand * u.marginal(demand) * (1.0 - beta);
}

SellerResponse seller_availability(double price, const SellerSpec& seller, double alpha) {
  if (!(price > 0.0)) throw DomainError("seller_availability: price must be > 0");
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw DomainError("seller_availability: market power must lie in [0, 1)");
  const double effective = price * (1.0 - alpha);
  const double g = seller.generation;
  const auto& v = seller.utility;
  if (effective <= v.marginal(g)) return {0.0, 0.0};
  if (effective >= v.marginal_at_zero()) return {g, v.marginal_at_zero() - effective};
  // v'(g - a) = effective  =>  g - a = v'^{-1}(effective)
  const double a = std::clamp(g - v.marginal_inverse(effective), 0.0, g);
  return {a, 0.0};
}

std::vector<double> market_power_buyers_exact(std::span<const double> bids, double b0) {
  return shares(bids, b0, "market_power_buyers_exact");
}

std::vector<double> market_power_sellers_exact(std::span<const double> avails, double a0) {
  return shares(avails, a0, "market_power_sellers_exact");
}

double estimate_beta(double prev_bid, double prev_demand, const LogUtility& u) {
  if (!(prev_demand > 0.0))
    throw DegenerateMarketError("estimate_beta: undefined for zero demand");
  return clip_power(1.0 - prev_bid / (prev_demand * u.marginal(prev_demand)));
}

double estimate_alpha(double prev_price, double prev_avail, double prev_rho,
                      const SellerSpec& seller) {
  if (!(prev_price > 0.0)) throw DomainError("estimate_alpha: price must be > 0");
  const double g = seller.generation;
  if (prev_avail < 0.0 || prev_avail > g)
    throw DomainError("estimate_alpha: availability outside [0, g]");
  const double retained = std::max(0.0, g - prev_avail);
  return clip_power(1.0 - (seller.utility.marginal(retained) - prev_rho) / prev_price);
}

double best_response_demand(const LogUtility& u, double q, double total) {
  if (total <= 0.0 || q >= u.marginal_at_zero()) return 0.0;
  return total * (u.x * u.y - q) / (u.y * (u.x + q * total));
}

// Quadratic in the retained energy r = g - a:
// mu y r^2 + mu (y (T - g) + 1) r + mu (T - g) - x y T = 0
double best_response_availability(const SellerSpec& seller, double mu, double total) {
  const double g = seller.generation;
  const auto& v = seller.utility;
  if (total <= 0.0 || g <= 0.0 || mu <= v.marginal(g)) return 0.0;
  if (v.marginal_at_zero() <= mu * (1.0 - g / total)) return g;
  const double qa = mu * v.y;
  const double qb = mu * (v.y * (total - g) + 1.0);
  const double qc = mu * (total - g) - v.x * v.y * total;  // negative on this branch
  const double root = std::sqrt(qb * qb - 4.0 * qa * qc);
  const double r = qb >= 0.0 ? -2.0 * qc / (qb + root) : (root - qb) / (2.0 * qa);
  return std::clamp(g - r, 0.0, g);
}

}  // namespace dsauction
