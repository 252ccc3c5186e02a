#pragma once

#include <stdexcept>
#include <string>

namespace dsauction {

/// Argument outside the mathematical domain of an operation (negative energy,
/// non-positive price, market power at or above one).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The market has nothing to clear: zero total availability, zero total bids,
/// or a lone price-anticipating agent on one side with no virtual agent.
class DegenerateMarketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No buyer values energy above any seller's reservation price.
class NoTradeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scenario failed validation; the message lists every violation.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed scenario file.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Random generation exhausted its redraw budget.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Instance too large for an exhaustive search.
class SizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dsauction
