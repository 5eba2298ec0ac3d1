#pragma once

// Small scalar root-finding helpers shared by the library sources.

#include <cmath>
#include <utility>
#include <vector>

namespace wavefront::detail {

/// Bisection on a sign-changing bracket: at most 200 halvings, or until the
/// bracket is narrower than 1e-14 (1 + |midpoint|).
template <class F>
double bisect(F&& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= 1e-14 * (1.0 + std::abs(mid))) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Subintervals of [a, b] (n equal pieces) on which f changes sign.
template <class F>
std::vector<std::pair<double, double>> sign_change_brackets(F&& f, double a, double b, int n) {
  std::vector<std::pair<double, double>> out;
  double x0 = a;
  double f0 = f(a);
  for (int i = 1; i <= n; ++i) {
    const double x1 = a + (b - a) * i / n;
    const double f1 = f(x1);
    if (f0 == 0.0 && i > 1) {
      out.emplace_back(x0, x0);
    } else if ((f0 < 0.0) != (f1 < 0.0) && f1 != 0.0) {
      out.emplace_back(x0, x1);
    }
    x0 = x1;
    f0 = f1;
  }
  return out;
}

/// Newton polish with a fallback: returns x unchanged if a step would
/// leave [lo, hi] or fails to reduce |f|.
template <class F, class DF>
double newton_polish(F&& f, DF&& df, double x, double lo, double hi, int steps = 3) {
  double fx = f(x);
  for (int i = 0; i < steps; ++i) {
    const double d = df(x);
    if (d == 0.0 || !std::isfinite(d)) break;
    const double xn = x - fx / d;
    if (!(xn >= lo && xn <= hi)) break;
    const double fn = f(xn);
    if (!(std::abs(fn) < std::abs(fx))) break;
    x = xn;
    fx = fn;
  }
  return x;
}

}  // namespace wavefront::detail
