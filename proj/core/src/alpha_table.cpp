#include "wcount/alpha_table.hpp"

#include <cstdint>
#include <cstring>
#include <list>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>

#include "wcount/errors.hpp"
#include "wcount/gamma_fn.hpp"

namespace wcount {

AlphaTable::AlphaTable(double c, int j_max, int ceiling) : c_(c), j_max_(j_max) {
  if (!(c > 0.0) || !std::isfinite(c))
    throw std::domain_error("AlphaTable: shape c must be positive and finite");
  if (j_max < 0) throw std::domain_error("AlphaTable: j_max must be >= 0");
  if (j_max > ceiling)
    throw ResourceError("AlphaTable: j_max " + std::to_string(j_max) +
                        " exceeds ceiling " + std::to_string(ceiling));

  const size_t n = static_cast<size_t>(j_max) + 1;
  log_entries_.resize(n * (n + 1) / 2);
  log_den_.resize(n);

  for (int j = 0; j <= j_max; ++j)
    log_den_[static_cast<size_t>(j)] = log_gamma(c * j + 1.0);

  // Base row: ln alpha_j^0 = ln Γ(cj+1) - ln Γ(j+1). Also the convolution
  // weights w_d for the recursion, since c*j - c*m = c*(j-m).
  std::vector<double> w(n);
  for (int j = 0; j <= j_max; ++j) {
    w[static_cast<size_t>(j)] = log_den_[static_cast<size_t>(j)] - log_gamma(j + 1.0);
    log_entries_[idx(0, j)] = w[static_cast<size_t>(j)];
  }

  for (int i = 0; i + 1 <= j_max; ++i) {
    for (int j = i + 1; j <= j_max; ++j) {
      SignedLogAccumulator acc;
      for (int m = i; m < j; ++m)
        acc.add(SignedLogValue::from_log(
            +1, log_entries_[idx(i, m)] + w[static_cast<size_t>(j - m)]));
      log_entries_[idx(i + 1, j)] = acc.total().log_mag;
    }
  }
}

SignedLogValue AlphaTable::entry(int i, int j) const {
  if (i < 0 || j < i || j > j_max_)
    throw std::out_of_range("AlphaTable::entry: need 0 <= i <= j <= j_max");
  return SignedLogValue::from_log(+1, log_entries_[idx(i, j)]);
}

AlphaTable build_alpha_table(double c, int j_max, int ceiling) {
  return AlphaTable(c, j_max, ceiling);
}

namespace {

struct CacheKey {
  uint64_t c_bits;
  int j_max;
  bool operator==(const CacheKey&) const = default;
};

struct CacheKeyHash {
  size_t operator()(const CacheKey& k) const {
    uint64_t h = k.c_bits ^ (static_cast<uint64_t>(k.j_max) * 0x9e3779b97f4a7c15ull);
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdull;
    h ^= h >> 33;
    return static_cast<size_t>(h);
  }
};

constexpr size_t kCacheCapacity = 64;

struct TableCache {
  std::mutex mu;
  std::unordered_map<CacheKey, std::pair<std::shared_ptr<const AlphaTable>,
                                         std::list<CacheKey>::iterator>,
                     CacheKeyHash>
      map;
  std::list<CacheKey> lru;  // front = most recent
};

TableCache& cache() {
  static TableCache c;
  return c;
}

int quantize(int j_needed, int ceiling) {
  int s = 64;
  while (s < j_needed && s < ceiling) s *= 2;
  return s < ceiling ? s : ceiling;
}

}  // namespace

std::shared_ptr<const AlphaTable> alpha_table_for(double c, int j_needed,
                                                  int ceiling) {
  if (j_needed > ceiling)
    throw ResourceError("alpha_table_for: request " + std::to_string(j_needed) +
                        " exceeds ceiling " + std::to_string(ceiling));
  CacheKey key{};
  std::memcpy(&key.c_bits, &c, sizeof c);
  key.j_max = quantize(j_needed, ceiling);

  auto& tc = cache();
  {
    std::lock_guard lock(tc.mu);
    if (auto it = tc.map.find(key); it != tc.map.end()) {
      tc.lru.splice(tc.lru.begin(), tc.lru, it->second.second);
      return it->second.first;
    }
  }

  // Built outside the lock; duplicate concurrent builds produce identical
  // tables and the last insert wins.
  auto table = std::make_shared<const AlphaTable>(c, key.j_max, ceiling);

  std::lock_guard lock(tc.mu);
  if (auto it = tc.map.find(key); it != tc.map.end()) {
    it->second.first = table;
    tc.lru.splice(tc.lru.begin(), tc.lru, it->second.second);
  } else {
    tc.lru.push_front(key);
    tc.map[key] = {table, tc.lru.begin()};
    while (tc.map.size() > kCacheCapacity) {
      tc.map.erase(tc.lru.back());
      tc.lru.pop_back();
    }
  }
  return table;
}

}  // namespace wcount
