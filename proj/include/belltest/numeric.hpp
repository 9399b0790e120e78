#pragma once

#include <cmath>
#include <cstddef>
#include <functional>

#include <belltest/errors.hpp>

namespace belltest {

/// Composite Simpson integration of f over [a, b], doubling the subdivision
/// until two successive estimates differ by less than abs_tol.
///
/// Integrands here are smooth and periodic (or restricted to the support of
/// a window), so convergence is fast; the interval cap bounds runtime.
/// Throws NumericError when the tolerance is not reached at the cap.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol,
                 std::size_t max_intervals = std::size_t(1) << 20) {
  if (b <= a) return 0.0;

  auto simpson = [&](std::size_t n) {
    const double h = (b - a) / static_cast<double>(n);
    double sum = f(a) + f(b);
    for (std::size_t i = 1; i < n; ++i) {
      sum += f(a + h * static_cast<double>(i)) * (i % 2 == 0 ? 2.0 : 4.0);
    }
    return sum * h / 3.0;
  };

  std::size_t n = 64;
  double prev = simpson(n);
  while (n < max_intervals) {
    n *= 2;
    const double cur = simpson(n);
    if (std::fabs(cur - prev) < abs_tol) return cur;
    prev = cur;
  }
  throw NumericError("quadrature tolerance not reached at maximum subdivision");
}

/// Root of f(x) = target on [lo, hi] by bisection, for f monotone increasing.
/// Iterates until |f(x) - target| <= resid_tol; throws NumericError when the
/// bracket does not contain the root or the residual cannot be reached.
double bisect_monotone(const std::function<double(double)>& f, double lo,
                       double hi, double target, double resid_tol,
                       int max_iter = 200);

}  // namespace belltest
