#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace robpost::stats {

/// Counter-based generator (Philox4x32-10). The 64-bit seed is the key and
/// the stream id occupies the upper half of the counter, so streams with
/// different ids never overlap and can be created in any order.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed = 0, std::uint64_t stream_id = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on the open interval (0, 1) with 53 bits of resolution.
  double uniform();

  /// Standard normal variate (Marsaglia polar method, spare value cached).
  double normal();

  /// Child stream for replication `index`; independent of this stream.
  RngStream split(std::uint64_t index) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> out_{};
  int pos_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Seed taken from ROBPOST_SEED when set, `fallback` otherwise.
std::uint64_t seed_from_env(std::uint64_t fallback);

}  // namespace robpost::stats
