#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dsauction/equilibrium.hpp"
#include "dsauction/model.hpp"

namespace dsauction {

enum class Mode { PriceTaking, PriceAnticipating };

/// How anticipating agents learn their market power between iterations.
enum class MarketPowerSource {
  Exact,      ///< shares of the previous round's bids and availabilities
  Estimated,  ///< inverted from the previous round's own bid/demand and price
};

struct EngineConfig {
  Mode mode = Mode::PriceTaking;
  MarketPowerSource market_power = MarketPowerSource::Exact;
  double damping = 0.5;  ///< theta in (0, 1]
  double price_tol = 1e-8;
  double bid_tol = 1e-8;
  int max_iters = 10000;
  double initial_price = 1.0;
  /// Per-buyer starting demands. When absent every buyer starts with an equal
  /// share of A(p0), or of half the total generation if A(p0) = 0.
  std::optional<std::vector<double>> initial_demands;

  void validate(const Scenario& s) const;
};

struct IterationRecord {
  int k = 0;
  double announced_price = 0.0;  ///< price sent to sellers
  double price = 0.0;            ///< clearing price (announced price if not cleared)
  bool cleared = false;
  std::vector<double> bids;
  std::vector<double> demands;  ///< after allocation
  std::vector<double> betas;    ///< used for this round's bids
  std::vector<double> availabilities;
  std::vector<double> alphas;
  std::vector<double> rhos;
};

struct AuctionOutcome {
  bool converged = false;
  std::vector<IterationRecord> iterations;
  Equilibrium final;
};

/// (b0 + sum b) / (a0 + sum a) - ps, floored at 0.
/// Throws DegenerateMarketError if a0 + sum a = 0.
double clearing_price(std::span<const double> bids, double b0, std::span<const double> avails,
                      double a0, double ps);

/// Clearing price when the virtual agent buys back a0 at p + ps, i.e.
/// b0 = (p + ps) a0: reduces to sum b / sum a - ps, floored at 0.
/// Throws DegenerateMarketError if sum a = 0.
double self_consistent_clearing_price(std::span<const double> bids,
                                      std::span<const double> avails, double ps);

/// d_i = b_i / (p + ps). Throws DomainError if p + ps <= 0.
std::vector<double> allocate(std::span<const double> bids, double p, double ps);

/// Iterative double auction. Non-convergence is reported, not thrown.
/// Throws ValidationError for invalid scenarios and DegenerateMarketError for
/// an anticipating run with a lone buyer or seller and no virtual agent.
AuctionOutcome run_auction(const Scenario& s, const EngineConfig& cfg);

}  // namespace dsauction
