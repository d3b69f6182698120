#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>

namespace proxctl {

/// SplitMix64 finalizer (Steele, Lea & Flood). Used to derive independent
/// stream seeds from (base_seed, run_index).
std::uint64_t splitmix64(std::uint64_t x);

/// Reproducible random stream. The engine is std::mt19937_64, whose output
/// sequence is fixed by the C++ standard; the distributions below are written
/// out explicitly because the std:: distributions are implementation-defined.
///   uniform_open(): ((u >> 11) + 0.5)·2⁻⁵³, strictly inside (0, 1)
///   normal():       Box–Muller on two uniform_open() draws, cosine branch
///                   first, sine branch cached for the next call
///   below(n):       masked rejection sampling on the low bits, unbiased
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  static Rng for_run(std::uint64_t base_seed, std::uint64_t run_index);

  std::uint64_t next_u64() { return engine_(); }
  double uniform_open();
  double uniform(double low, double high);
  double normal();
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

}  // namespace proxctl
