#pragma once

// Counter-based generator: output k of stream (seed, stream) is a SplitMix64
// finalisation of key + k * gamma, so streams are independent of scheduling.

#include <cstdint>
#include <limits>

namespace crp {

std::uint64_t mix64(std::uint64_t z);

class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  std::uint64_t counter() const { return counter_; }
  /// Uniform in [0, 1).
  double uniform();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace crp
