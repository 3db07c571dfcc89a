#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace wcount {

// Signed log-space scalar: sign in {-1, 0, +1} plus ln|x|.
// sign == 0 represents exact zero; log_mag is meaningless in that case.
struct SignedLogValue {
  int sign = 0;
  double log_mag = -std::numeric_limits<double>::infinity();

  static SignedLogValue zero() { return {}; }

  static SignedLogValue from_log(int sign, double log_mag) {
    if (sign == 0) return zero();
    return {sign > 0 ? 1 : -1, log_mag};
  }

  static SignedLogValue from_value(double x) {
    if (x == 0.0) return zero();
    return {x > 0.0 ? 1 : -1, std::log(std::fabs(x))};
  }

  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_mag); }
  bool is_zero() const { return sign == 0; }
};

// Compensated accumulator for signed log-space terms.
//
// Incoming terms are rescaled to units of exp(scale_), where scale_ tracks the
// largest magnitude seen so far, and summed with Neumaier compensation. The
// running Σ|term| is kept alongside so callers can report how much
// cancellation the sum went through.
class SignedLogAccumulator {
 public:
  void add(SignedLogValue term) {
    ++n_;
    if (term.sign == 0) return;
    if (term.log_mag > scale_) {
      const double shrink =
          std::isfinite(scale_) ? std::exp(scale_ - term.log_mag) : 0.0;
      sum_ *= shrink;
      comp_ *= shrink;
      abs_sum_ *= shrink;
      abs_comp_ *= shrink;
      scale_ = term.log_mag;
    }
    const double x = term.sign * std::exp(term.log_mag - scale_);
    add_compensated(sum_, comp_, x);
    add_compensated(abs_sum_, abs_comp_, std::fabs(x));
  }

  SignedLogValue total() const {
    if (!std::isfinite(scale_)) return SignedLogValue::zero();
    const double s = sum_ + comp_;
    if (s == 0.0) return SignedLogValue::zero();
    return {s > 0.0 ? 1 : -1, scale_ + std::log(std::fabs(s))};
  }

  // ln Σ|term|; -inf when nothing nonzero was added.
  double log_abs_sum() const {
    if (!std::isfinite(scale_)) return -std::numeric_limits<double>::infinity();
    return scale_ + std::log(abs_sum_ + abs_comp_);
  }

  // Σ|term| / |Σ term|, >= 1; +inf on total cancellation.
  double cancellation_ratio() const {
    const SignedLogValue t = total();
    if (t.sign == 0)
      return n_ == 0 ? 1.0 : std::numeric_limits<double>::infinity();
    const double r = std::exp(log_abs_sum() - t.log_mag);
    return r < 1.0 ? 1.0 : r;
  }

  int terms() const { return n_; }

 private:
  static void add_compensated(double& sum, double& comp, double x) {
    const double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }

  double scale_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0, comp_ = 0.0;
  double abs_sum_ = 0.0, abs_comp_ = 0.0;
  int n_ = 0;
};

inline SignedLogValue signed_log_sum(std::span<const SignedLogValue> terms) {
  SignedLogAccumulator acc;
  for (const auto& t : terms) acc.add(t);
  return acc.total();
}

}  // namespace wcount
