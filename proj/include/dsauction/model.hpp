#pragma once

#include <concepts>
#include <string>
#include <vector>

namespace dsauction {

/// Concave saturating utility x * log(y * z + 1).
///
/// `x` is a monetary scale and `y` a curvature per unit of energy. Both must be
/// strictly positive for the utility to be strictly increasing and strictly
/// concave on [0, inf); validate_scenario() enforces that, the member
/// functions assume it.
struct LogUtility {
  double x = 1.0;
  double y = 1.0;

  /// x * log(y z + 1). Throws DomainError for z < 0.
  [[nodiscard]] double value(double z) const;

  /// x y / (y z + 1). Throws DomainError for z < 0.
  [[nodiscard]] double marginal(double z) const;

  /// Energy at which the marginal utility equals `price`, clipped at zero when
  /// price >= marginal(0). Throws DomainError for price <= 0.
  [[nodiscard]] double marginal_inverse(double price) const;

  /// Integral of value() over [0, d]. Throws DomainError for d < 0.
  [[nodiscard]] double integral(double d) const;

  [[nodiscard]] double marginal_at_zero() const { return x * y; }

  friend bool operator==(const LogUtility&, const LogUtility&) = default;
};

/// Anything usable as an agent utility by the solvers.
template <typename U>
concept ConcaveUtility = requires(const U& u, double z) {
  { u.value(z) } -> std::convertible_to<double>;
  { u.marginal(z) } -> std::convertible_to<double>;
  { u.marginal_inverse(z) } -> std::convertible_to<double>;
  { u.integral(z) } -> std::convertible_to<double>;
};
static_assert(ConcaveUtility<LogUtility>);

struct BuyerSpec {
  LogUtility utility;

  friend bool operator==(const BuyerSpec&, const BuyerSpec&) = default;
};

struct SellerSpec {
  LogUtility utility;
  double generation = 0.0;

  /// Marginal utility of the seller's full generation, v'(g): the price below
  /// which it offers nothing.
  [[nodiscard]] double reservation_price() const { return utility.marginal(generation); }

  friend bool operator==(const SellerSpec&, const SellerSpec&) = default;
};

/// Aggregator settings. The default (a0 = 0, ps = 0) is the selfless aggregator.
struct AggregatorConfig {
  double virtual_availability = 0.0;  ///< a0
  double surcharge = 0.0;             ///< ps

  friend bool operator==(const AggregatorConfig&, const AggregatorConfig&) = default;
};

struct Scenario {
  std::vector<BuyerSpec> buyers;
  std::vector<SellerSpec> sellers;
  AggregatorConfig aggregator;

  [[nodiscard]] double total_generation() const;
  /// max_i u_i'(0)
  [[nodiscard]] double max_buyer_marginal_at_zero() const;
  /// max_j v_j'(0)
  [[nodiscard]] double max_seller_marginal_at_zero() const;
  /// min_j v_j'(g_j)
  [[nodiscard]] double min_seller_reservation() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

enum class Violation {
  NoBuyers,
  NoSellers,
  NonPositiveParameter,
  NegativeGeneration,
  NegativeVirtualAvailability,
  NegativeSurcharge,
  NonFiniteValue,
  NoGainsFromTrade,
};

struct ValidationIssue {
  Violation kind;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  [[nodiscard]] bool valid() const { return issues.empty(); }
  [[nodiscard]] bool has(Violation kind) const;
  [[nodiscard]] std::string summary() const;
};

/// Checks parameter positivity, non-empty agent sets and the existence of at
/// least one buyer/seller pair with u_i'(0) > v_j'(g_j). Never throws.
ValidationReport validate_scenario(const Scenario& s);

/// Throws ValidationError carrying the report summary if `s` is invalid.
void require_valid(const Scenario& s);

}  // namespace dsauction
