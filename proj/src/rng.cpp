#include "ozsg/rng.hpp"

#include "ozsg/common.hpp"

#include <algorithm>

namespace ozsg {

RngStream::RngStream(std::uint64_t master_seed, const std::string& name) {
  std::uint64_t h = fnv1a(name, 0xcbf29ce484222325ull);
  engine_.seed(splitmix64(master_seed ^ splitmix64(h)));
}

std::uint64_t RngStream::next_u64() { return engine_(); }

std::uint64_t RngStream::next_below(std::uint64_t n) {
  if (n == 0) return 0;
  std::uint64_t limit = ~0ull - (~0ull % n);
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return v % n;
}

double RngStream::next_unit() {
  return static_cast<double>(engine_() >> 11) * (1.0 / 9007199254740992.0);
}

std::vector<std::uint32_t> RngStream::sample_indices(std::uint32_t n, std::uint32_t k) {
  if (k >= n) {
    std::vector<std::uint32_t> all(n);
    for (std::uint32_t i = 0; i < n; ++i) all[i] = i;
    return all;
  }
  // Partial Fisher-Yates over an index vector.
  std::vector<std::uint32_t> idx(n);
  for (std::uint32_t i = 0; i < n; ++i) idx[i] = i;
  for (std::uint32_t i = 0; i < k; ++i) {
    std::uint32_t j = i + static_cast<std::uint32_t>(next_below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace ozsg
