#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace needlet {

/// Counter-based Philox4x32-10 generator.
///
/// A generator is identified by (seed, stream); `split(i)` derives the i-th
/// child stream deterministically, so replication r of an experiment can
/// draw from `root.split(r)` regardless of which worker runs it.
/// Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  [[nodiscard]] Rng split(std::uint64_t index) const;

  result_type operator()();

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  double normal();

  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] std::uint64_t stream() const { return stream_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int next_word_ = 4;
  std::normal_distribution<double> gauss_{0.0, 1.0};
};

}  // namespace needlet
