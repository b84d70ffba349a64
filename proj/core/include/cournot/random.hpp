#pragma once

#include <cstdint>
#include <random>

namespace cournot {

/// Seeded generator with a fixed, implementation-independent output stream.
///
/// The engine is std::mt19937_64, whose output sequence is fully specified by
/// the C++ standard. Derived variates are computed here rather than through
/// the <random> distributions, whose algorithms are implementation-defined:
///
///   uniform01() = ((u >> 11) + 0.5) * 2^-53      in the open interval (0, 1)
///   normal()    = Box-Muller on two uniform01() draws (no caching)
///
/// so a given seed produces bit-identical streams on every conforming platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  double normal();

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cournot
