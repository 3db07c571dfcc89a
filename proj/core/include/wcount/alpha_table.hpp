#pragma once

#include <memory>
#include <vector>

#include "wcount/signed_log.hpp"

namespace wcount {

inline constexpr int kAlphaTableCeiling = 512;

// Triangular coefficient table for a fixed shape c:
//
//   entry(0, j)   = Γ(cj+1) / Γ(j+1)
//   entry(i+1, j) = Σ_{m=i}^{j-1} entry(i, m) · Γ(c(j-m)+1) / Γ(j-m+1)
//
// The recursion weight Γ(c(j-m)+1)/Γ(j-m+1) depends only on j-m and equals
// entry(0, j-m), so each column is a truncated convolution of the previous
// column with column zero. Entries are strictly positive and can span
// hundreds of orders of magnitude (Γ(cj+1)/Γ(j+1) at c=3, j=50 overflows a
// linear-scale double), so everything is held in log space.
//
// A table is a pure function of (c, j_max): rebuilding with a larger j_max
// reproduces the smaller table's entries bit for bit.
class AlphaTable {
 public:
  AlphaTable(double c, int j_max, int ceiling = kAlphaTableCeiling);

  double shape() const { return c_; }
  int j_max() const { return j_max_; }

  // Bounds-checked accessor; requires 0 <= i <= j <= j_max.
  SignedLogValue entry(int i, int j) const;

  // Unchecked hot-path accessors.
  double log_entry(int i, int j) const { return log_entries_[idx(i, j)]; }
  // ln Γ(cj+1), the series denominators.
  double log_gamma_cj1(int j) const { return log_den_[static_cast<size_t>(j)]; }

 private:
  size_t idx(int i, int j) const {
    // Row i holds entries j = i..j_max.
    const size_t ii = static_cast<size_t>(i), jj = static_cast<size_t>(j);
    const size_t stride = static_cast<size_t>(j_max_) + 1;
    return ii * stride - ii * (ii - 1) / 2 + (jj - ii);
  }

  double c_;
  int j_max_;
  std::vector<double> log_entries_;
  std::vector<double> log_den_;
};

// Builds the table; throws ResourceError when j_max exceeds the ceiling.
AlphaTable build_alpha_table(double c, int j_max,
                             int ceiling = kAlphaTableCeiling);

// Process-wide cache with O(1) lookup, safe for concurrent read/insert
// (duplicate inserts are last-write-wins with identical values). Bounded by
// LRU eviction since an optimizer requests a fresh c on every step. Requests
// are quantized upward to {64, 128, 256, 512} so series evaluations that grow
// their truncation point reuse a handful of sizes per c.
std::shared_ptr<const AlphaTable> alpha_table_for(
    double c, int j_needed, int ceiling = kAlphaTableCeiling);

}  // namespace wcount
