#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>

namespace workbench {

// xoshiro256** 1.0 (Blackman & Vigna), state seeded by SplitMix64 over
// (seed, stream_id). Acceptance tests pin seeds, so the output sequence of
// this class is frozen: changing the algorithm or the seeding is a breaking
// change.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1); never returns 0, so safe under log().
  double uniform_open();
  /// Uniform integer in [0, bound). Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t bound);
  /// Standard normal by the Box-Muller transform. Draws uniforms in pairs and
  /// caches the second variate.
  double standard_normal();
  /// Exponential(rate) by inversion: -log(U)/rate.
  double exponential(double rate);

  /// A fresh stream for sub-stream `child` of this stream's seed.
  RngStream substream(std::uint64_t child) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::array<std::uint64_t, 4> state_{};
  std::optional<double> cached_normal_;
};

}  // namespace workbench
