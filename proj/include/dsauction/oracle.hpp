#pragma once

#include <vector>

#include "dsauction/metrics.hpp"
#include "dsauction/model.hpp"

namespace dsauction {

struct GridMax {
  std::vector<double> demands;
  std::vector<double> availabilities;
  double value = 0.0;
};

/// Exhaustive maximum of the frozen-totals anticipation objective over seller
/// availabilities on the lattice {0, h, 2h, ...} (each capped at g_j), with
/// demands split exactly so (1 - d_i/T) u_i'(d_i) is equal across buyers.
/// Limited to 2 buyers and 3 sellers; throws SizeError beyond that.
GridMax max_frozen_pi_on_grid(const Scenario& s, const FrozenTotals& totals, double step);

struct OracleResult {
  std::vector<double> demands;
  std::vector<double> availabilities;
  double value = 0.0;  ///< frozen objective at the point's own totals
  int rounds = 0;
  bool settled = false;  ///< lattice point reproduced itself
};

/// Test oracle for the price-anticipating solver: repeats the grid maximization,
/// re-freezing the totals at each round's maximizer, until the lattice point
/// repeats. A point that reproduces itself is a grid-resolution equilibrium.
OracleResult brute_force_pi_max(const Scenario& s, double step, int max_rounds = 100);

}  // namespace dsauction
