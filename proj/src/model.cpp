#include "dsauction/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dsauction/errors.hpp"

namespace dsauction {

namespace {

void require_nonnegative_energy(double z, const char* what) {
  if (!(z >= 0.0)) {
    std::ostringstream os;
    os << what << ": energy must be >= 0, got " << z;
    throw DomainError(os.str());
  }
}

}  // namespace

double LogUtility::value(double z) const {
  require_nonnegative_energy(z, "LogUtility::value");
  return x * std::log1p(y * z);
}

double LogUtility::marginal(double z) const {
  require_nonnegative_energy(z, "LogUtility::marginal");
  return x * y / (y * z + 1.0);
}

double LogUtility::marginal_inverse(double price) const {
  if (!(price > 0.0)) {
    std::ostringstream os;
    os << "LogUtility::marginal_inverse: price must be > 0, got " << price;
    throw DomainError(os.str());
  }
  if (price >= x * y) return 0.0;
  return x / price - 1.0 / y;
}

double LogUtility::integral(double d) const {
  require_nonnegative_energy(d, "LogUtility::integral");
  // (x/y) * ((yd+1) log(yd+1) - yd)
  const double t = y * d;
  return x / y * ((t + 1.0) * std::log1p(t) - t);
}

double Scenario::total_generation() const {
  double total = 0.0;
  for (const auto& s : sellers) total += s.generation;
  return total;
}

double Scenario::max_buyer_marginal_at_zero() const {
  double best = 0.0;
  for (const auto& b : buyers) best = std::max(best, b.utility.marginal_at_zero());
  return best;
}

double Scenario::max_seller_marginal_at_zero() const {
  double best = 0.0;
  for (const auto& s : sellers) best = std::max(best, s.utility.marginal_at_zero());
  return best;
}

double Scenario::min_seller_reservation() const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : sellers) best = std::min(best, s.reservation_price());
  return best;
}

bool ValidationReport::has(Violation kind) const {
  return std::any_of(issues.begin(), issues.end(),
                     [kind](const ValidationIssue& i) { return i.kind == kind; });
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < issues.size(); ++i) {
    if (i) os << "; ";
    os << issues[i].message;
  }
  return os.str();
}

ValidationReport validate_scenario(const Scenario& s) {
  ValidationReport report;
  auto add = [&report](Violation kind, std::string msg) {
    report.issues.push_back({kind, std::move(msg)});
  };

  if (s.buyers.empty()) add(Violation::NoBuyers, "buyer set is empty");
  if (s.sellers.empty()) add(Violation::NoSellers, "seller set is empty");

  bool parameters_ok = true;
  auto check_utility = [&](const LogUtility& u, const std::string& who) {
    for (auto [name, v] : {std::pair{"x", u.x}, std::pair{"y", u.y}}) {
      if (!std::isfinite(v)) {
        add(Violation::NonFiniteValue, who + ": " + name + " is not finite");
        parameters_ok = false;
      } else if (v <= 0.0) {
        std::ostringstream os;
        os << who << ": " << name << " = " << v
           << " must be > 0 (utility must be strictly increasing and strictly concave)";
        add(Violation::NonPositiveParameter, os.str());
        parameters_ok = false;
      }
    }
  };

  for (std::size_t i = 0; i < s.buyers.size(); ++i)
    check_utility(s.buyers[i].utility, "buyer " + std::to_string(i));
  for (std::size_t j = 0; j < s.sellers.size(); ++j) {
    const std::string who = "seller " + std::to_string(j);
    check_utility(s.sellers[j].utility, who);
    const double g = s.sellers[j].generation;
    if (!std::isfinite(g)) {
      add(Violation::NonFiniteValue, who + ": generation is not finite");
      parameters_ok = false;
    } else if (g < 0.0) {
      std::ostringstream os;
      os << who << ": generation = " << g << " must be >= 0";
      add(Violation::NegativeGeneration, os.str());
      parameters_ok = false;
    }
  }

  const auto& agg = s.aggregator;
  if (!std::isfinite(agg.virtual_availability) || !std::isfinite(agg.surcharge)) {
    add(Violation::NonFiniteValue, "aggregator: a0 and ps must be finite");
  } else {
    if (agg.virtual_availability < 0.0)
      add(Violation::NegativeVirtualAvailability, "aggregator: a0 must be >= 0");
    if (agg.surcharge < 0.0) add(Violation::NegativeSurcharge, "aggregator: ps must be >= 0");
  }

  if (parameters_ok && !s.buyers.empty() && !s.sellers.empty()) {
    if (!(s.max_buyer_marginal_at_zero() > s.min_seller_reservation())) {
      std::ostringstream os;
      os << "no gains from trade: max_i u_i'(0) = " << s.max_buyer_marginal_at_zero()
         << " does not exceed min_j v_j'(g_j) = " << s.min_seller_reservation();
      add(Violation::NoGainsFromTrade, os.str());
    }
  }
  return report;
}

void require_valid(const Scenario& s) {
  const auto report = validate_scenario(s);
  if (!report.valid()) throw ValidationError("invalid scenario: " + report.summary());
}

}  // namespace dsauction
