#pragma once

#include <cstdint>

namespace rgsde {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed of scenario `index` under `master_seed`. Every control uses the same
// scenario seed for a given index (common random numbers).
constexpr std::uint64_t scenario_seed(std::uint64_t master_seed,
                                      std::uint64_t index) noexcept {
  return mix64(mix64(master_seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

// Counter-based standard normal stream: draw n depends only on (key, n), so
// output never depends on the order or thread in which draws are taken.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t key) noexcept : key_(mix64(key)) {}

  // Uniform on (0, 1] from counter c.
  double uniform(std::uint64_t c) const noexcept;

  // n-th standard normal (Box-Muller over counter pairs).
  double normal(std::uint64_t n) const noexcept;

 private:
  std::uint64_t key_;
};

}  // namespace rgsde
