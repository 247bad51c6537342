#pragma once
// Deterministic named-stream random number generation.
//
// Every stochastic decision in the solver draws from a stream derived from
// (master seed, stream name). Runs with the same seed therefore reproduce
// bit-identical behaviour regardless of the order in which unrelated
// subsystems consume randomness.

#include <cstdint>
#include <random>
#include <string>

namespace ozsg {

// splitmix64: used to expand (seed, name-hash) into engine seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

class RngStream {
 public:
  RngStream(std::uint64_t master_seed, const std::string& name);

  std::uint64_t next_u64();
  // Uniform in [0, n) without modulo bias.
  std::uint64_t next_below(std::uint64_t n);
  double next_unit();  // [0,1)

  // Fisher-Yates subsample of k indices out of [0, n), returned sorted.
  std::vector<std::uint32_t> sample_indices(std::uint32_t n, std::uint32_t k);

 private:
  std::mt19937_64 engine_;
};

}  // namespace ozsg
