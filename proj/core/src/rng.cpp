#include "cg/rng.hpp"

#include <cmath>

namespace cg {

namespace {
__extension__ using Wide = unsigned __int128;
}  // namespace

double Rng::exponential(double rate) noexcept {
  return -std::log(uniform_open_closed()) / rate;
}

// Lemire's nearly-divisionless method.
std::uint64_t Rng::below(std::uint64_t bound) noexcept {
  Wide m = static_cast<Wide>((*this)()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<Wide>((*this)()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace cg
