#include "cournot/random.hpp"

#include <cmath>
#include <numbers>

namespace cournot {

double Rng::uniform01() {
  constexpr double kScale = 0x1.0p-53;
  return (static_cast<double>(engine_() >> 11) + 0.5) * kScale;
}

double Rng::normal() {
  const double u1 = uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace cournot
