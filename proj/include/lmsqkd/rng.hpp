#pragma once

#include <cstdint>

namespace lmsqkd {

/// Counter-based pseudo-random stream (SplitMix64 core).
///
/// A stream is derived from a 64-bit master seed plus a (purpose, index)
/// pair, so every protocol round and session phase rebuilds its own stream
/// from scratch. Runs are bit-reproducible for a fixed master seed no
/// matter in which order (or on how many threads) the streams are consumed.
class RngStream {
 public:
  RngStream() = default;

  static RngStream derive(std::uint64_t master_seed, std::uint64_t purpose,
                          std::uint64_t index) {
    std::uint64_t h = mix(master_seed + 0x9E3779B97F4A7C15ULL);
    h = mix(h ^ (purpose + 0xBF58476D1CE4E5B9ULL));
    h = mix(h ^ (index + 0x94D049BB133111EBULL));
    return RngStream(h);
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  /// Uniform double in [0, 1), 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool next_bernoulli(double p) { return next_double() < p; }

  /// Uniform integer in [0, n). Multiply-shift; bias is negligible for the
  /// small n used here.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  explicit RngStream(std::uint64_t state) : state_(state) {}

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_ = 0;
};

/// Stream purposes; (purpose, index) pairs never collide across phases.
namespace stream_purpose {
inline constexpr std::uint64_t tp_source = 0;   // per round
inline constexpr std::uint64_t alice = 1;       // per round
inline constexpr std::uint64_t bob = 2;         // per round
inline constexpr std::uint64_t check_split = 3; // per session
inline constexpr std::uint64_t pa_seed = 4;     // per session
}  // namespace stream_purpose

}  // namespace lmsqkd
