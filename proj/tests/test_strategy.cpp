#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "dsauction/errors.hpp"
#include "dsauction/strategy.hpp"
#include "support.hpp"

using namespace dsauction;

namespace {
const LogUtility kUnit{1.0, 1.0};
const SellerSpec kUnitSeller{{1.0, 1.0}, 1.0};
}  // namespace

TEST(BuyerBid, Examples) {
  EXPECT_EQ(buyer_bid(0.0, {2.0, 3.0}, 0.4), 0.0);
  EXPECT_DOUBLE_EQ(buyer_bid(1.0, kUnit, 0.0), 0.5);
  EXPECT_DOUBLE_EQ(buyer_bid(1.0, kUnit, 0.5), 0.25);
  EXPECT_EQ(buyer_bid(1.0, kUnit, 1.0), 0.0);
}

TEST(BuyerBid, RejectsBadInput) {
  EXPECT_THROW(buyer_bid(1.0, kUnit, -0.1), DomainError);
  EXPECT_THROW(buyer_bid(1.0, kUnit, 1.1), DomainError);
  EXPECT_THROW(buyer_bid(-1.0, kUnit, 0.0), DomainError);
}

TEST(BuyerBid, StrictlyDecreasingInMarketPower) {
  double prev = buyer_bid(0.7, kUnit, 0.0);
  for (int k = 1; k <= 100; ++k) {
    const double b = buyer_bid(0.7, kUnit, 0.0099 * k);
    EXPECT_LT(b, prev);
    prev = b;
  }
}

TEST(SellerAvailability, Examples) {
  auto r = seller_availability(0.5, kUnitSeller, 0.0);
  EXPECT_EQ(r.availability, 0.0);
  EXPECT_EQ(r.rho, 0.0);
  r = seller_availability(0.3, kUnitSeller, 0.0);
  EXPECT_EQ(r.availability, 0.0);
  r = seller_availability(2.0 / 3.0, kUnitSeller, 0.0);
  EXPECT_NEAR(r.availability, 0.5, 1e-15);
  EXPECT_EQ(r.rho, 0.0);
  r = seller_availability(2.0, kUnitSeller, 0.0);
  EXPECT_EQ(r.availability, 1.0);
  EXPECT_DOUBLE_EQ(r.rho, -1.0);
}

TEST(SellerAvailability, Errors) {
  EXPECT_THROW(seller_availability(0.0, kUnitSeller, 0.0), DomainError);
  EXPECT_THROW(seller_availability(1.0, kUnitSeller, 1.0), DomainError);
  EXPECT_THROW(seller_availability(1.0, kUnitSeller, -0.2), DomainError);
}

TEST(SellerAvailability, NondecreasingInPrice) {
  const SellerSpec s{{1.3, 0.8}, 1.7};
  for (double alpha : {0.0, 0.3, 0.8}) {
    double prev = 0.0;
    for (int k = 1; k <= 1000; ++k) {
      const auto r = seller_availability(0.005 * k, s, alpha);
      EXPECT_GE(r.availability, prev);
      EXPECT_LE(r.availability, s.generation);
      EXPECT_LE(r.rho, 0.0);
      if (r.availability < s.generation) EXPECT_EQ(r.rho, 0.0);
      prev = r.availability;
    }
  }
}

TEST(MarketPower, BuyersExact) {
  const std::vector<double> two{1, 1};
  EXPECT_EQ(market_power_buyers_exact(two, 0.0), (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(market_power_buyers_exact(std::vector<double>{3}, 0.0), std::vector<double>{1.0});
  EXPECT_EQ(market_power_buyers_exact(two, 2.0), (std::vector<double>{0.25, 0.25}));
  EXPECT_THROW(market_power_buyers_exact(std::vector<double>{0, 0}, 0.0), DegenerateMarketError);
}

TEST(MarketPower, SellersExact) {
  EXPECT_EQ(market_power_sellers_exact(std::vector<double>{2, 2}, 0.0),
            (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(market_power_sellers_exact(std::vector<double>{1}, 0.0), std::vector<double>{1.0});
  EXPECT_EQ(market_power_sellers_exact(std::vector<double>{1, 3}, 4.0),
            (std::vector<double>{0.125, 0.375}));
  EXPECT_THROW(market_power_sellers_exact(std::vector<double>{}, 0.0), DegenerateMarketError);
}

TEST(MarketPower, DilutedByVirtualAgent) {
  const std::vector<double> bids{0.3, 1.2, 0.5};
  const double total = 2.0;
  double prev = 1.0;
  for (double b0 : {0.0, 0.1, 1.0, 10.0, 100.0}) {
    const auto beta = market_power_buyers_exact(bids, b0);
    double sum = 0.0;
    for (double v : beta) sum += v;
    EXPECT_NEAR(sum, total / (b0 + total), 1e-15);
    if (b0 == 0.0) EXPECT_NEAR(sum, 1.0, 1e-15);
    EXPECT_LT(beta[1], prev);
    prev = beta[1];
  }
}

TEST(EstimateBeta, Examples) {
  EXPECT_NEAR(estimate_beta(buyer_bid(0.8, kUnit, 0.3), 0.8, kUnit), 0.3, 1e-15);
  EXPECT_EQ(estimate_beta(1.0 * kUnit.marginal(1.0), 1.0, kUnit), 0.0);
  EXPECT_DOUBLE_EQ(estimate_beta(0.25, 1.0, kUnit), 0.5);
  EXPECT_THROW(estimate_beta(0.1, 0.0, kUnit), DegenerateMarketError);
}

TEST(EstimateBeta, Clipped) {
  EXPECT_EQ(estimate_beta(0.0, 1.0, kUnit), kMarketPowerCeiling);
  EXPECT_EQ(estimate_beta(5.0, 1.0, kUnit), 0.0);
}

TEST(EstimateBeta, RoundTrip) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> par(0.5, 1.5), d(0.01, 5.0), beta(0.0, 0.999);
  for (int k = 0; k < 500; ++k) {
    const LogUtility u{par(rng), par(rng)};
    const double dd = d(rng), bb = beta(rng);
    EXPECT_NEAR(estimate_beta(buyer_bid(dd, u, bb), dd, u), bb, 1e-12);
  }
}

TEST(EstimateAlpha, Examples) {
  const double p = 2.0 / 3.0;
  EXPECT_NEAR(estimate_alpha(p, 0.5, 0.0, kUnitSeller), 0.0, 1e-15);
  const auto r = seller_availability(0.9, kUnitSeller, 0.2);
  ASSERT_LT(r.availability, 1.0);
  EXPECT_NEAR(estimate_alpha(0.9, r.availability, r.rho, kUnitSeller), 0.2, 1e-12);
  EXPECT_EQ(estimate_alpha(1.0, 1.0, -0.5, kUnitSeller), 0.0);
  EXPECT_THROW(estimate_alpha(0.0, 0.5, 0.0, kUnitSeller), DomainError);
}

TEST(EstimateAlpha, RoundTrip) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> par(0.5, 1.5), g(0.5, 2.0), p(0.1, 2.0), alpha(0.0, 0.95);
  int interior = 0;
  for (int k = 0; k < 2000; ++k) {
    const SellerSpec s{{par(rng), par(rng)}, g(rng)};
    const double pp = p(rng), aa = alpha(rng);
    const auto r = seller_availability(pp, s, aa);
    if (r.availability <= 0.0 || r.availability >= s.generation) continue;
    ++interior;
    EXPECT_NEAR(estimate_alpha(pp, r.availability, r.rho, s), aa, 1e-9);
  }
  EXPECT_GT(interior, 200);
}

TEST(BestResponse, DemandSatisfiesAnticipatingCondition) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> par(0.5, 1.5), q(0.05, 1.5), t(0.1, 10.0);
  for (int k = 0; k < 500; ++k) {
    const LogUtility u{par(rng), par(rng)};
    const double qq = q(rng), tt = t(rng);
    const double d = best_response_demand(u, qq, tt);
    if (qq >= u.marginal_at_zero()) {
      EXPECT_EQ(d, 0.0);
      continue;
    }
    ASSERT_GT(d, 0.0);
    ASSERT_LT(d, tt);
    EXPECT_NEAR((1.0 - d / tt) * u.marginal(d), qq, 1e-12);
  }
}

TEST(BestResponse, AvailabilitySatisfiesAnticipatingCondition) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> par(0.5, 1.5), g(0.5, 2.0), mu(0.05, 3.0), t(0.05, 20.0);
  int interior = 0, full = 0;
  for (int k = 0; k < 2000; ++k) {
    const SellerSpec s{{par(rng), par(rng)}, g(rng)};
    const double m = mu(rng), tt = t(rng);
    const double a = best_response_availability(s, m, tt);
    const auto& v = s.utility;
    if (a == 0.0) {
      EXPECT_LE(m, v.marginal(s.generation) + 1e-12);
    } else if (a == s.generation) {
      ++full;
      EXPECT_LE(v.marginal_at_zero(), m * (1.0 - s.generation / tt) + 1e-12);
    } else {
      ++interior;
      EXPECT_NEAR(v.marginal(s.generation - a), m * (1.0 - a / tt), 1e-11);
    }
  }
  EXPECT_GT(interior, 100);
  EXPECT_GT(full, 10);
}
