#include <belltest/numeric.hpp>

namespace belltest {

double bisect_monotone(const std::function<double(double)>& f, double lo,
                       double hi, double target, double resid_tol,
                       int max_iter) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo > target || fhi < target) {
    throw NumericError("root not bracketed");
  }
  double mid = lo;
  for (int i = 0; i < max_iter; ++i) {
    mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (std::fabs(fm - target) <= resid_tol) return mid;
    if (fm < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (std::fabs(f(mid) - target) <= resid_tol) return mid;
  throw NumericError("bisection residual tolerance not reached");
}

}  // namespace belltest
