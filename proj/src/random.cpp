#include "rgsde/random.hpp"

#include <cmath>
#include <numbers>

namespace rgsde {

double NormalStream::uniform(std::uint64_t c) const noexcept {
  const std::uint64_t bits = mix64(key_ + c * 0x9e3779b97f4a7c15ULL);
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

double NormalStream::normal(std::uint64_t n) const noexcept {
  const std::uint64_t pair = n >> 1;
  const double u1 = uniform(2 * pair);
  const double u2 = uniform(2 * pair + 1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return (n & 1) ? r * std::sin(angle) : r * std::cos(angle);
}

}  // namespace rgsde
