#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace cargo {

/// SplitMix64 finalizer. Used to derive independent stream seeds from one root seed.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for a named sub-stream: mix64(root ^ mix64(stream)).
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) noexcept;

/// FNV-1a of a tag, so streams can be named ("partition", "vrp", ...).
std::uint64_t stream_id(std::string_view tag) noexcept;

/**
 * Portable pseudo-random source.
 *
 * The engine is std::mt19937_64, whose output sequence is fixed by the C++
 * standard. The standard distributions are not, so every conversion is done
 * here with an explicit formula:
 *   uniform()   = (next() >> 11) * 2^-53
 *   below(n)    = rejection sampling on next() against the largest multiple of n
 *   normal()    = Box-Muller, sqrt(-2 ln(1 - u1)) * cos(2 pi u2), one draw per call
 */
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t below(std::uint64_t n);
  double normal();

private:
  std::mt19937_64 engine_;
};

}  // namespace cargo
