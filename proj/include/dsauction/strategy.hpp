#pragma once

#include <span>
#include <vector>

#include "dsauction/model.hpp"

namespace dsauction {

/// Upper clip applied to every market-power value handed to a best response.
inline constexpr double kMarketPowerCeiling = 1.0 - 1e-6;

struct BuyerState {
  double bid = 0.0;
  double demand = 0.0;
  double beta = 0.0;
};

struct SellerState {
  double availability = 0.0;
  double alpha = 0.0;
  double rho = 0.0;  ///< capacity dual, <= 0, zero unless availability == g
};

/// d * u'(d) * (1 - beta).
double buyer_bid(double demand, const LogUtility& u, double beta);

struct SellerResponse {
  double availability = 0.0;
  double rho = 0.0;
};

/// Best response of a seller facing price p with market power alpha.
/// Throws DomainError for p <= 0 or alpha outside [0, 1).
SellerResponse seller_availability(double price, const SellerSpec& seller, double alpha);

/// beta_i = b_i / (b0 + sum b). Throws DegenerateMarketError if the total is 0.
std::vector<double> market_power_buyers_exact(std::span<const double> bids, double b0);

/// alpha_j = a_j / (a0 + sum a). Throws DegenerateMarketError if the total is 0.
std::vector<double> market_power_sellers_exact(std::span<const double> avails, double a0);

/// 1 - b / (d u'(d)), clipped to [0, kMarketPowerCeiling].
/// Throws DegenerateMarketError for d <= 0.
double estimate_beta(double prev_bid, double prev_demand, const LogUtility& u);

/// 1 - (v'(g - a) - rho) / p, clipped to [0, kMarketPowerCeiling].
double estimate_alpha(double prev_price, double prev_avail, double prev_rho,
                      const SellerSpec& seller);

/// Price-anticipating buyer's demand when the total availability (virtual
/// agent included) is held at `total` and the buyer faces price q:
/// (1 - d/T) u'(d) = q, or 0 when q >= u'(0).
double best_response_demand(const LogUtility& u, double q, double total);

/// Price-anticipating seller's availability when the total availability is
/// held at `total`: v'(g - a) = mu (1 - a/T), clipped to [0, g].
double best_response_availability(const SellerSpec& seller, double mu, double total);

}  // namespace dsauction
