#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "dsauction/model.hpp"

namespace dsauction::testing {

// One unit buyer, one unit seller with g = 1.
inline Scenario r1(double a0 = 0.0, double ps = 0.0) {
  Scenario s;
  s.buyers = {BuyerSpec{{1.0, 1.0}}};
  s.sellers = {SellerSpec{{1.0, 1.0}, 1.0}};
  s.aggregator = {a0, ps};
  return s;
}

inline Scenario unit_market(std::size_t nb, std::size_t ns, double g = 1.0, double a0 = 0.0) {
  Scenario s;
  s.buyers.assign(nb, BuyerSpec{{1.0, 1.0}});
  s.sellers.assign(ns, SellerSpec{{1.0, 1.0}, g});
  s.aggregator.virtual_availability = a0;
  return s;
}

// Adaptive Simpson quadrature, independent of any closed form.
inline double simpson(const std::function<double(double)>& f, double a, double b, double eps,
                      double whole, double fa, double fm, double fb, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * eps)
    return left + right + (left + right - whole) / 15.0;
  return simpson(f, a, m, eps / 2, left, fa, flm, fm, depth - 1) +
         simpson(f, m, b, eps / 2, right, fm, frm, fb, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double eps = 1e-14) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson(f, a, b, eps, whole, fa, fm, fb, 50);
}

// Five-point central difference.
inline double derivative(const std::function<double(double)>& f, double x, double h) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

}  // namespace dsauction::testing
