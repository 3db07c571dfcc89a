#include "wcount/gamma_fn.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace wcount {

double log_gamma(double x) {
  if (!(x > 0.0))
    throw std::domain_error("log_gamma: argument must be > 0, got " +
                            std::to_string(x));
  return std::lgamma(x);
}

double log_rising_factorial(double r, int n) {
  if (!(r > 0.0) || n < 0)
    throw std::domain_error("log_rising_factorial: need r > 0, n >= 0");
  if (n == 0) return 0.0;
  // Direct summation is exact to a few ulps per term; the lgamma difference
  // loses ~|lgamma(r)|*eps absolutely, which is fatal for r ~ 1e8.
  if (n <= 4096) {
    double s = 0.0, comp = 0.0;
    for (int k = 0; k < n; ++k) {
      const double x = std::log(r + k);
      const double t = s + x;
      comp += std::fabs(s) >= std::fabs(x) ? (s - t) + x : (x - t) + s;
      s = t;
    }
    return s + comp;
  }
  return std::lgamma(r + n) - std::lgamma(r);
}

}  // namespace wcount
