#include "dsauction/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "dsauction/equilibrium.hpp"
#include "dsauction/errors.hpp"

namespace dsauction {

namespace {

void require_sorted(std::span<const double> grid) {
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw DomainError("sweep grid must be strictly increasing");
}

template <typename Solve>
SweepResult run_sweep(const char* name, std::span<const double> grid, unsigned threads,
                      Solve&& solve) {
  require_sorted(grid);
  SweepResult r{name, std::vector<SweepRow>(grid.size())};
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    auto& row = r.rows[i];
    row.param = grid[i];
    try {
      const Equilibrium eq = solve(grid[i]);
      row.price = eq.price;
      row.volume = eq.volume;
      row.welfare = eq.welfare;
      row.revenue = eq.revenue;
      row.loss = eq.loss;
      row.converged = true;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });
  return r;
}

}  // namespace

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += threads) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

SweepResult sweep_surcharge(const Scenario& s, std::span<const double> grid, unsigned threads) {
  return run_sweep("ps", grid, threads, [&](double ps) { return solve_surcharge(s, ps); });
}

SweepResult sweep_virtual(const Scenario& s, std::span<const double> grid, unsigned threads) {
  return run_sweep("a0", grid, threads, [&](double a0) {
    Scenario t = s;
    t.aggregator.virtual_availability = a0;
    return solve_price_anticipation(t);
  });
}

std::vector<double> linear_grid(double lo, double hi, int n) {
  if (n < 2) return {lo};
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  g.back() = hi;
  return g;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0)) throw DomainError("log grid needs a positive lower end");
  if (n < 2) return {lo};
  std::vector<double> g(n);
  const double r = std::log(hi / lo);
  for (int i = 0; i < n; ++i) g[i] = lo * std::exp(r * i / (n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

}  // namespace dsauction
