#pragma once

namespace wcount {

// ln Γ(x) for x > 0. Relative error <= 1e-13 on [1e-6, 1e6].
// Throws std::domain_error for x <= 0 (or NaN).
double log_gamma(double x);

// ln [Γ(r+n) / Γ(r)] for integer n >= 0, computed as Σ ln(r+k) so it stays
// accurate when r is huge and the lgamma difference would cancel.
double log_rising_factorial(double r, int n);

}  // namespace wcount
