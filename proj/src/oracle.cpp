#include "dsauction/oracle.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "dsauction/errors.hpp"
#include "dsauction/strategy.hpp"

namespace dsauction {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxLattice = 200000;

// Best split of volume S among buyers at frozen total T.
std::vector<double> split_demand(const Scenario& s, double volume, double total) {
  std::vector<double> d(s.buyers.size(), 0.0);
  if (volume <= 0.0) return d;
  auto demand_at = [&](double mu) {
    double acc = 0.0;
    for (const auto& b : s.buyers) acc += best_response_demand(b.utility, mu, total);
    return acc;
  };
  double lo = 0.0, hi = s.max_buyer_marginal_at_zero();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (demand_at(mid) > volume ? lo : hi) = mid;
  }
  const double mu = 0.5 * (lo + hi);
  for (std::size_t i = 0; i < d.size(); ++i)
    d[i] = best_response_demand(s.buyers[i].utility, mu, total);
  // Remove the bisection residue so the split sums to the volume exactly.
  const double got = std::accumulate(d.begin(), d.end(), 0.0);
  if (got > 0.0)
    for (auto& v : d) v = std::min(total, v * volume / got);
  return d;
}

}  // namespace

GridMax max_frozen_pi_on_grid(const Scenario& s, const FrozenTotals& totals, double step) {
  if (s.buyers.size() > 2 || s.sellers.size() > 3)
    throw SizeError("grid oracle supports at most 2 buyers and 3 sellers");
  if (!(step > 0.0)) throw DomainError("grid step must be > 0");
  const double ps = s.aggregator.surcharge;
  const std::size_t m = s.sellers.size();

  std::vector<std::size_t> levels(m);
  std::size_t total_levels = 0;
  for (std::size_t j = 0; j < m; ++j) {
    levels[j] = static_cast<std::size_t>(std::floor(s.sellers[j].generation / step + 1e-9));
    total_levels += levels[j];
  }
  if (total_levels > kMaxLattice) throw SizeError("grid too fine for the oracle");
  auto lattice_avail = [&](std::size_t j, std::size_t k) {
    return std::min(s.sellers[j].generation, static_cast<double>(k) * step);
  };

  // Max-plus convolution of the separable seller terms over the total level.
  std::vector<double> best{0.0};
  std::vector<std::vector<std::size_t>> choice(m);
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> term(levels[j] + 1);
    for (std::size_t k = 0; k <= levels[j]; ++k)
      term[k] = pi_seller(s.sellers[j], lattice_avail(j, k), totals.seller_others[j]) -
                ps * lattice_avail(j, k);
    std::vector<double> next(best.size() + levels[j], kNegInf);
    choice[j].assign(next.size(), 0);
    for (std::size_t t = 0; t < best.size(); ++t)
      for (std::size_t k = 0; k <= levels[j]; ++k) {
        const double v = best[t] + term[k];
        if (v > next[t + k]) {
          next[t + k] = v;
          choice[j][t + k] = k;
        }
      }
    best = std::move(next);
  }

  GridMax out;
  out.value = kNegInf;
  std::size_t best_level = 0;
  std::vector<double> best_d;
  for (std::size_t t = 0; t < best.size(); ++t) {
    std::vector<std::size_t> ks(m);
    std::size_t rest = t;
    for (std::size_t j = m; j-- > 0;) {
      ks[j] = choice[j][rest];
      rest -= ks[j];
    }
    double volume = 0.0;
    for (std::size_t j = 0; j < m; ++j) volume += lattice_avail(j, ks[j]);
    if (volume > static_cast<double>(s.buyers.size()) * totals.buyer_total) continue;
    const auto d = split_demand(s, volume, totals.buyer_total);
    double v = best[t];
    for (std::size_t i = 0; i < d.size(); ++i)
      v += pi_buyer(s.buyers[i].utility, d[i], totals.buyer_total);
    if (v > out.value) {
      out.value = v;
      best_level = t;
      best_d = d;
    }
  }
  out.demands = best_d;
  out.availabilities.assign(m, 0.0);
  std::size_t rest = best_level;
  for (std::size_t j = m; j-- > 0;) {
    const std::size_t k = choice[j][rest];
    out.availabilities[j] = lattice_avail(j, k);
    rest -= k;
  }
  return out;
}

OracleResult brute_force_pi_max(const Scenario& s, double step, int max_rounds) {
  if (s.aggregator.virtual_availability <= 0.0 && s.sellers.size() < 2)
    throw DegenerateMarketError("oracle needs a0 > 0 or at least two sellers");
  std::vector<double> full;
  for (const auto& sel : s.sellers) full.push_back(sel.generation);
  auto totals = totals_at(s, full);

  OracleResult r;
  std::vector<double> prev;
  for (r.rounds = 1; r.rounds <= max_rounds; ++r.rounds) {
    auto g = max_frozen_pi_on_grid(s, totals, step);
    r.demands = g.demands;
    r.availabilities = g.availabilities;
    if (g.availabilities == prev) {
      r.settled = true;
      break;
    }
    prev = g.availabilities;
    totals = totals_at(s, g.availabilities);
    for (double o : totals.seller_others)
      if (!(o > 0.0)) throw DegenerateMarketError("oracle reached a point with no competing supply");
  }
  r.rounds = std::min(r.rounds, max_rounds);
  r.value = frozen_anticipation_objective(s, r.demands, r.availabilities,
                                          totals_at(s, r.availabilities));
  return r;
}

}  // namespace dsauction
