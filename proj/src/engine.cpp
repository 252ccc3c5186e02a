#include "dsauction/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dsauction/errors.hpp"
#include "dsauction/metrics.hpp"
#include "dsauction/strategy.hpp"

namespace dsauction {

namespace {

double sum(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

Equilibrium outcome_equilibrium(const Scenario& s, const EngineConfig& cfg, double price,
                                std::vector<double> demands, std::vector<double> avails,
                                bool settled_price) {
  const bool anticipating = cfg.mode == Mode::PriceAnticipating;
  Equilibrium eq;
  eq.regime = anticipating ? Regime::PriceAnticipating
              : s.aggregator.surcharge > 0.0 ? Regime::Surcharge
                                             : Regime::PriceTaking;
  eq.price = price;
  // A buyer priced out decays towards zero demand geometrically and never
  // reaches it; once the price has settled, report the corner it is heading to.
  if (settled_price)
    for (std::size_t i = 0; i < demands.size(); ++i)
      if (s.buyers[i].utility.marginal_at_zero() <= price + s.aggregator.surcharge)
        demands[i] = 0.0;
  eq.demands = std::move(demands);
  eq.availabilities = std::move(avails);
  eq.surcharge = s.aggregator.surcharge;
  eq.virtual_availability = anticipating ? s.aggregator.virtual_availability : 0.0;
  eq.kkt = compute_kkt(s, price, eq.demands, eq.availabilities, eq.surcharge, anticipating);
  finalize_metrics(s, eq, solve_price_taking(s).welfare);
  return eq;
}

// Availability with v'(g - a) = p O / (a + O), i.e. market power a / (a + O).
double consistent_availability(const SellerSpec& seller, double p, double others) {
  const auto& v = seller.utility;
  const double g = seller.generation;
  if (others <= 0.0) return 0.0;
  const double a = others * (p * (v.y * g + 1.0) - v.x * v.y) / (v.y * (v.x + p * others));
  return std::clamp(a, 0.0, g);
}

// Bid with b = d u'(d) R / (b + R), i.e. market power b / (b + R).
double consistent_bid(double demand, const LogUtility& u, double others) {
  const double full = demand * u.marginal(demand);
  if (others <= 0.0) return 0.0;
  return 2.0 * full * others / (others + std::sqrt(others * others + 4.0 * full * others));
}

// A small change is not enough when the iteration contracts slowly: the
// distance left is about change / (1 - ratio) for a geometric tail.
bool settled(double change, double prev_change, double tol) {
  if (change > tol) return false;
  if (change <= 1e-15) return true;
  if (!(prev_change > change)) return false;
  const double ratio = change / prev_change;
  return change / (1.0 - ratio) <= tol;
}

}  // namespace

void EngineConfig::validate(const Scenario& s) const {
  if (!(damping > 0.0 && damping <= 1.0)) throw DomainError("damping must lie in (0, 1]");
  if (!(price_tol > 0.0) || !(bid_tol > 0.0)) throw DomainError("tolerances must be > 0");
  if (max_iters < 1) throw DomainError("max_iters must be >= 1");
  if (!(initial_price > 0.0) || !std::isfinite(initial_price))
    throw DomainError("initial price must be > 0");
  if (initial_demands) {
    if (initial_demands->size() != s.buyers.size())
      throw DomainError("initial demands size does not match the buyers");
    for (double d : *initial_demands)
      if (!(d >= 0.0) || !std::isfinite(d)) throw DomainError("initial demands must be >= 0");
  }
}

double clearing_price(std::span<const double> bids, double b0, std::span<const double> avails,
                      double a0, double ps) {
  const double supply = a0 + sum(avails);
  if (!(supply > 0.0)) throw DegenerateMarketError("clearing_price: no availability");
  return std::max(0.0, (b0 + sum(bids)) / supply - ps);
}

double self_consistent_clearing_price(std::span<const double> bids,
                                      std::span<const double> avails, double ps) {
  const double supply = sum(avails);
  if (!(supply > 0.0)) throw DegenerateMarketError("clearing_price: no availability");
  return std::max(0.0, sum(bids) / supply - ps);
}

std::vector<double> allocate(std::span<const double> bids, double p, double ps) {
  if (!(p + ps > 0.0)) throw DomainError("allocate: p + ps must be > 0");
  std::vector<double> d(bids.size());
  std::transform(bids.begin(), bids.end(), d.begin(), [&](double b) { return b / (p + ps); });
  return d;
}

AuctionOutcome run_auction(const Scenario& s, const EngineConfig& cfg) {
  require_valid(s);
  cfg.validate(s);
  const bool anticipating = cfg.mode == Mode::PriceAnticipating;
  const double a0 = s.aggregator.virtual_availability;
  const double ps = s.aggregator.surcharge;
  const std::size_t nb = s.buyers.size(), ns = s.sellers.size();
  if (anticipating && a0 <= 0.0 && (nb < 2 || ns < 2))
    throw DegenerateMarketError(
        "price anticipation with a single buyer or seller needs a virtual agent (a0 > 0)");

  AuctionOutcome out;
  if (ps >= surcharge_upper_bound(s)) {
    // Nobody can trade at any price; skip the loop.
    out.converged = true;
    out.final = outcome_equilibrium(s, cfg, s.min_seller_reservation(),
                                    std::vector<double>(nb, 0.0), std::vector<double>(ns, 0.0), true);
    return out;
  }

  double announced = cfg.initial_price;
  std::vector<double> demands;
  if (cfg.initial_demands) {
    demands = *cfg.initial_demands;
  } else {
    // Zero demands would produce zero bids forever.
    const double a = availability_function(s, announced);
    const double seed = a > 0.0 ? a : 0.5 * s.total_generation();
    demands.assign(nb, seed / static_cast<double>(nb));
  }
  std::vector<double> betas(nb, 0.0), alphas(ns, 0.0), rhos(ns, 0.0);
  std::vector<double> prev_bids;
  std::optional<double> prev_cleared;
  std::optional<double> prev_step;
  double theta = cfg.damping;
  const bool exact_powers = anticipating && cfg.market_power == MarketPowerSource::Exact;
  bool have_totals = false;
  double spend_total = 0.0, supply_total = 0.0;  // virtual agent included
  std::vector<double> prev_avails;
  double prev_price_change = 0.0;

  for (int k = 1; k <= cfg.max_iters; ++k) {
    IterationRecord rec;
    rec.k = k;
    rec.announced_price = announced;
    if (exact_powers && have_totals) {
      // Own share solved jointly with own availability against the others' total.
      for (std::size_t j = 0; j < ns; ++j) {
        const double others = supply_total - prev_avails[j];
        const double a = consistent_availability(s.sellers[j], announced, others);
        alphas[j] = std::min(a / (a + others), kMarketPowerCeiling);
      }
      for (std::size_t i = 0; i < nb; ++i) {
        const double others = spend_total - prev_bids[i];
        const double b = consistent_bid(demands[i], s.buyers[i].utility, others);
        betas[i] = b + others > 0.0 ? std::min(b / (b + others), kMarketPowerCeiling) : 0.0;
      }
    }
    rec.betas = betas;
    rec.alphas = alphas;
    for (std::size_t j = 0; j < ns; ++j) {
      const auto resp = seller_availability(announced, s.sellers[j], alphas[j]);
      rec.availabilities.push_back(resp.availability);
      rec.rhos.push_back(resp.rho);
    }
    for (std::size_t i = 0; i < nb; ++i)
      rec.bids.push_back(buyer_bid(demands[i], s.buyers[i].utility, betas[i]));

    const double supply = sum(rec.availabilities);
    const double spend = sum(rec.bids);
    if (!(spend > 0.0)) throw DegenerateMarketError("all bids are zero");

    double target;
    if (supply <= 0.0) {
      target = 2.0 * announced;
    } else if (spend / supply <= ps) {
      target = 0.5 * announced;
    } else {
      rec.cleared = true;
      target = self_consistent_clearing_price(rec.bids, rec.availabilities, ps);
    }
    rec.price = rec.cleared ? target : announced;
    rec.demands = rec.cleared ? allocate(rec.bids, target, ps) : demands;

    bool done = false;
    if (rec.cleared) {
      demands = rec.demands;
      if (prev_cleared) {
        double bid_change = 0.0;
        for (std::size_t i = 0; i < nb; ++i)
          bid_change = std::max(bid_change, std::abs(rec.bids[i] - prev_bids[i]));
        const double price_change = std::abs(rec.price - *prev_cleared);
        done = price_change <= cfg.price_tol &&
               std::abs(rec.price - announced) <= cfg.price_tol &&
               bid_change <= cfg.bid_tol &&
               settled(price_change, prev_price_change, cfg.price_tol);
        prev_price_change = price_change;
      }
      prev_cleared = rec.price;
      prev_bids = rec.bids;

      if (anticipating) {
        if (exact_powers) {
          spend_total = (rec.price + ps) * a0 + spend;
          supply_total = a0 + supply;
          prev_avails = rec.availabilities;
          have_totals = true;
        } else {
          for (std::size_t i = 0; i < nb; ++i)
            if (demands[i] > 0.0)
              betas[i] = estimate_beta(rec.bids[i], demands[i], s.buyers[i].utility);
          if (rec.price > 0.0)
            for (std::size_t j = 0; j < ns; ++j)
              alphas[j] = estimate_alpha(rec.price, rec.availabilities[j], rec.rhos[j], s.sellers[j]);
        }
      }
    }
    out.iterations.push_back(std::move(rec));
    if (done) {
      out.converged = true;
      break;
    }

    // Damped move of the announced price; a reversal halves the damping and
    // may not overshoot by more than half the previous move.
    double step = theta * (target - announced);
    if (prev_step && step * *prev_step < 0.0) {
      theta *= 0.5;
      step = std::copysign(std::min(std::abs(step), 0.5 * std::abs(*prev_step)), step);
    }
    if (step != 0.0) prev_step = step;
    announced += step;
  }

  // Report the last cleared round, or the last round if none cleared.
  auto it = std::find_if(out.iterations.rbegin(), out.iterations.rend(),
                         [](const IterationRecord& r) { return r.cleared; });
  const auto& last = it != out.iterations.rend() ? *it : out.iterations.back();
  out.final =
      outcome_equilibrium(s, cfg, last.price, last.demands, last.availabilities, out.converged);
  return out;
}

}  // namespace dsauction
