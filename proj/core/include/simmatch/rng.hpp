#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace simmatch {

// Deterministic generator. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard; all conversions to real values are
// done here (not through <random> distributions, which are
// implementation-defined), so a seed reproduces the same draws everywhere.
//
//   uniform01(): (u64 >> 11) * 2^-53, in [0, 1)
//   gaussian():  Box-Muller on two uniform01 draws, second value cached
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  double uniform01();
  double uniform(double low, double high);
  double gaussian();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::optional<double> cached_gaussian_;
};

}  // namespace simmatch
