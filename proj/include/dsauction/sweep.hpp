#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dsauction/model.hpp"

namespace dsauction {

struct SweepRow {
  double param = 0.0;
  double price = 0.0;
  double volume = 0.0;
  double welfare = 0.0;
  double revenue = 0.0;
  double loss = 0.0;
  bool converged = false;  ///< false when the point's solve threw
  std::string error;
};

struct SweepResult {
  std::string parameter;
  std::vector<SweepRow> rows;
};

/// Price-taking equilibrium with surcharge at every grid value.
SweepResult sweep_surcharge(const Scenario& s, std::span<const double> grid, unsigned threads = 0);

/// Price-anticipating equilibrium with virtual availability at every grid value.
SweepResult sweep_virtual(const Scenario& s, std::span<const double> grid, unsigned threads = 0);

/// n points from lo to hi inclusive.
std::vector<double> linear_grid(double lo, double hi, int n);
/// n log-spaced points from lo to hi inclusive; lo must be > 0.
std::vector<double> log_grid(double lo, double hi, int n);

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 = hardware).
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace dsauction
