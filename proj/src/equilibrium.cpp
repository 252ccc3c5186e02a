#include "dsauction/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dsauction/errors.hpp"
#include "dsauction/metrics.hpp"
#include "dsauction/strategy.hpp"

namespace dsauction {

namespace {

constexpr int kMaxBisection = 200;

// Root of a nondecreasing f on [lo, hi] with f(lo) <= 0 <= f(hi). Runs until
// the interval stops shrinking in floating point.
template <typename F>
double bisect(F&& f, double lo, double hi) {
  for (int it = 0; it < kMaxBisection; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

void require_solvable(const Scenario& s) {
  const auto report = validate_scenario(s);
  if (report.valid()) return;
  if (report.issues.size() == 1 && report.has(Violation::NoGainsFromTrade))
    throw NoTradeError(report.summary());
  throw ValidationError("invalid scenario: " + report.summary());
}

double sum(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

struct AnticipatingState {
  double mu;
  std::vector<double> d;
  std::vector<double> a;
};

AnticipatingState anticipating_at(const Scenario& s, double total) {
  const double ps = s.aggregator.surcharge;
  auto excess_supply = [&](double mu) {
    double supply = 0.0, demand = 0.0;
    for (const auto& sel : s.sellers) supply += best_response_availability(sel, mu, total);
    for (const auto& b : s.buyers) demand += best_response_demand(b.utility, mu + ps, total);
    return supply - demand;
  };
  const double mu = bisect(excess_supply, 0.0, s.max_buyer_marginal_at_zero());
  AnticipatingState st{mu, {}, {}};
  for (const auto& b : s.buyers) st.d.push_back(best_response_demand(b.utility, mu + ps, total));
  for (const auto& sel : s.sellers) st.a.push_back(best_response_availability(sel, mu, total));
  return st;
}

Equilibrium solve_taking_with_surcharge(const Scenario& s, double ps, Regime regime) {
  require_solvable(s);
  if (!(ps >= 0.0) || !std::isfinite(ps)) throw DomainError("surcharge must be finite and >= 0");
  Equilibrium eq;
  eq.regime = regime;
  eq.surcharge = ps;
  const double l = s.min_seller_reservation();
  const double n = s.max_buyer_marginal_at_zero();
  const double m = s.max_seller_marginal_at_zero();

  if (ps >= n - l) {
    eq.price = l;
    eq.demands.assign(s.buyers.size(), 0.0);
    eq.availabilities.assign(s.sellers.size(), 0.0);
  } else {
    auto gap = [&](double p) { return availability_function(s, p) - demand_function(s, p + ps); };
    eq.price = bisect(gap, l, std::max(n - ps, m));
    for (const auto& b : s.buyers) eq.demands.push_back(b.utility.marginal_inverse(eq.price + ps));
    for (const auto& sel : s.sellers) {
      const double a = sel.generation - sel.utility.marginal_inverse(eq.price);
      eq.availabilities.push_back(std::clamp(a, 0.0, sel.generation));
    }
  }
  eq.kkt = compute_kkt(s, eq.price, eq.demands, eq.availabilities, ps, false);
  return eq;
}

}  // namespace

std::string to_string(Regime r) {
  switch (r) {
    case Regime::PriceTaking: return "price-taking";
    case Regime::Surcharge: return "surcharge";
    case Regime::PriceAnticipating: return "price-anticipating";
  }
  return "unknown";
}

double demand_function(const Scenario& s, double p) {
  if (!(p > 0.0)) throw DomainError("demand_function: price must be > 0");
  double total = 0.0;
  for (const auto& b : s.buyers) total += b.utility.marginal_inverse(p);
  return total;
}

double availability_function(const Scenario& s, double p) {
  if (!(p > 0.0)) throw DomainError("availability_function: price must be > 0");
  double total = 0.0;
  for (const auto& sel : s.sellers)
    total += std::clamp(sel.generation - sel.utility.marginal_inverse(p), 0.0, sel.generation);
  return total;
}

double surcharge_upper_bound(const Scenario& s) {
  return s.max_buyer_marginal_at_zero() - s.min_seller_reservation();
}

Equilibrium solve_price_taking(const Scenario& s) {
  auto eq = solve_taking_with_surcharge(s, 0.0, Regime::PriceTaking);
  finalize_metrics(s, eq, social_welfare(s, eq.demands, eq.availabilities));
  return eq;
}

Equilibrium solve_surcharge(const Scenario& s, double ps) {
  auto eq = solve_taking_with_surcharge(s, ps, Regime::Surcharge);
  finalize_metrics(s, eq, solve_price_taking(s).welfare);
  return eq;
}

Equilibrium solve_price_anticipation(const Scenario& s) {
  require_solvable(s);
  const double a0 = s.aggregator.virtual_availability;
  if (a0 <= 0.0 && (s.buyers.size() < 2 || s.sellers.size() < 2))
    throw DegenerateMarketError(
        "price anticipation with a single buyer or seller needs a virtual agent (a0 > 0)");

  const double cap = s.total_generation();
  auto phi = [&](double volume) {
    const auto st = anticipating_at(s, a0 + volume);
    return sum(st.a) - volume;
  };

  // phi(cap) <= 0 always. Look for the largest volume where phi is positive.
  std::optional<std::pair<double, double>> bracket;
  const double lo = a0 > 0.0 ? 0.0 : 1e-12 * cap;
  if (cap > 0.0) {
    if (phi(lo) > 0.0) {
      bracket = {lo, cap};
    } else {
      constexpr int kScan = 64;
      const double start = std::max(lo, 1e-12 * cap);
      double prev = cap;
      for (int k = kScan - 1; k >= 0; --k) {
        const double v = start * std::pow(cap / start, static_cast<double>(k) / kScan);
        if (phi(v) > 0.0) {
          bracket = {v, prev};
          break;
        }
        prev = v;
      }
    }
  }

  Equilibrium eq;
  eq.regime = Regime::PriceAnticipating;
  eq.surcharge = s.aggregator.surcharge;
  eq.virtual_availability = a0;
  if (bracket) {
    // phi is positive at the left end and nonpositive at the right.
    const double volume = bisect([&](double v) { return -phi(v); }, bracket->first, bracket->second);
    auto st = anticipating_at(s, a0 + volume);
    eq.price = st.mu;
    eq.demands = std::move(st.d);
    eq.availabilities = std::move(st.a);
  } else {
    eq.price = anticipating_at(s, a0 + lo).mu;
    eq.demands.assign(s.buyers.size(), 0.0);
    eq.availabilities.assign(s.sellers.size(), 0.0);
  }
  eq.kkt = compute_kkt(s, eq.price, eq.demands, eq.availabilities, eq.surcharge, true);
  finalize_metrics(s, eq, solve_price_taking(s).welfare);
  return eq;
}

MarketPowers implied_market_powers(const Scenario& s, std::span<const double> demands,
                                   std::span<const double> avails) {
  const double a0 = s.aggregator.virtual_availability;
  const double td = a0 + sum(demands);
  const double ta = a0 + sum(avails);
  MarketPowers mp;
  for (double d : demands) mp.beta.push_back(td > 0.0 ? d / td : 0.0);
  for (double a : avails) mp.alpha.push_back(ta > 0.0 ? a / ta : 0.0);
  return mp;
}

KktDiagnostics compute_kkt(const Scenario& s, double mu, std::span<const double> demands,
                           std::span<const double> avails, double ps, bool anticipating) {
  KktDiagnostics k;
  k.mu = mu;
  k.lambda.assign(avails.size(), 0.0);
  k.rho.assign(avails.size(), 0.0);
  k.balance_residual = std::abs(sum(demands) - sum(avails));
  const double a0 = anticipating ? s.aggregator.virtual_availability : 0.0;
  if (anticipating && a0 + sum(avails) <= 0.0) {
    k.applicable = false;
    return k;
  }
  MarketPowers mp;
  if (anticipating) {
    mp = implied_market_powers(s, demands, avails);
  } else {
    mp.beta.assign(demands.size(), 0.0);
    mp.alpha.assign(avails.size(), 0.0);
  }

  double worst = 0.0;
  for (std::size_t i = 0; i < demands.size(); ++i) {
    const auto& u = s.buyers[i].utility;
    const double r = demands[i] > 0.0
                         ? std::abs((1.0 - mp.beta[i]) * u.marginal(demands[i]) - (mu + ps))
                         : std::max(0.0, u.marginal_at_zero() - (mu + ps));
    worst = std::max(worst, r);
  }
  for (std::size_t j = 0; j < avails.size(); ++j) {
    const auto& sel = s.sellers[j];
    const auto& v = sel.utility;
    const double g = sel.generation;
    const double a = avails[j];
    const double keep = 1.0 - mp.alpha[j];
    double r = 0.0;
    if (g > 0.0 && a >= g) {
      k.lambda[j] = v.marginal_at_zero() / keep - mu;
      k.rho[j] = keep * k.lambda[j];
    } else if (a > 0.0) {
      r = std::abs(v.marginal(g - a) - keep * mu);
    } else {
      r = std::max(0.0, keep * mu - v.marginal(g));
    }
    worst = std::max(worst, r);
    if (k.lambda[j] > 0.0 || k.rho[j] > 0.0) k.complementary_slackness = false;
  }
  k.stationarity_residual = worst;
  return k;
}

SurchargeOptimum optimal_surcharge(const Scenario& s, int grid_points) {
  require_solvable(s);
  const double bound = surcharge_upper_bound(s);
  grid_points = std::max(grid_points, 4);
  auto rev = [&](double ps) { return solve_surcharge(s, ps).revenue; };

  SurchargeOptimum best{0.0, rev(0.0)};
  int best_k = 0;
  for (int k = 1; k <= grid_points; ++k) {
    const double ps = bound * k / grid_points;
    const double r = rev(ps);
    if (r > best.revenue) {
      best = {ps, r};
      best_k = k;
    }
  }
  double lo = bound * std::max(best_k - 1, 0) / grid_points;
  double hi = bound * std::min(best_k + 1, grid_points) / grid_points;
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - invphi * (hi - lo), d = lo + invphi * (hi - lo);
  double rc = rev(c), rd = rev(d);
  for (int it = 0; it < 100 && hi - lo > 1e-12 * std::max(1.0, bound); ++it) {
    if (rc > rd) {
      hi = d;
      d = c;
      rd = rc;
      c = hi - invphi * (hi - lo);
      rc = rev(c);
    } else {
      lo = c;
      c = d;
      rc = rd;
      d = lo + invphi * (hi - lo);
      rd = rev(d);
    }
  }
  const double ps = 0.5 * (lo + hi);
  const double r = rev(ps);
  if (r > best.revenue) best = {ps, r};
  return best;
}

void finalize_metrics(const Scenario& s, Equilibrium& eq, double optimal_welfare) {
  eq.volume = sum(eq.availabilities);
  eq.zero_volume = eq.volume <= 0.0;
  eq.buyers_welfare = buyers_welfare(s, eq.demands);
  eq.sellers_welfare = sellers_welfare(s, eq.availabilities);
  eq.welfare = eq.buyers_welfare + eq.sellers_welfare;
  eq.revenue = revenue(eq.surcharge, eq.availabilities);
  eq.loss = optimal_welfare > 0.0 ? efficiency_loss(optimal_welfare, eq.welfare) : 0.0;
  eq.anticipation_objective.reset();
  if (eq.regime == Regime::PriceAnticipating) {
    const auto t = totals_at(s, eq.availabilities);
    const bool defined = t.buyer_total > 0.0 &&
                         std::all_of(t.seller_others.begin(), t.seller_others.end(),
                                     [](double o) { return o > 0.0; });
    if (defined && std::all_of(eq.demands.begin(), eq.demands.end(),
                               [&](double d) { return d <= t.buyer_total; }))
      eq.anticipation_objective = anticipation_objective(s, eq.demands, eq.availabilities);
  }
}

}  // namespace dsauction
