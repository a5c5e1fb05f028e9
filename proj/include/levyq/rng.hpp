// Counter-based random streams for reproducible, parallel Monte Carlo.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace levyq {

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 output finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// A reproducible random stream identified by (seed, stream_id).
///
/// The stream is the SplitMix64 sequence state_k = key + k * golden, where
/// key depends only on the seed and k = stream_id * 2^40 + draw index. Every
/// stream is therefore a disjoint window of the same period-2^64 sequence,
/// and identical (seed, stream_id) pairs replay the same words bit for bit.
/// Satisfies UniformRandomBitGenerator so <random> distributions accept it.
class RngStream {
 public:
  using result_type = std::uint64_t;

  static constexpr int kCounterBits = 40;
  static constexpr std::uint64_t kMaxStreamId = (std::uint64_t{1} << (64 - kCounterBits)) - 1;

  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_id_(stream_id), key_(detail::mix64(seed ^ 0xD1B54A32D192ED03ULL)) {
    if (stream_id > kMaxStreamId) {
      throw std::invalid_argument("RngStream: stream_id exceeds 2^24 - 1");
    }
    counter_ = stream_id << kCounterBits;
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    return detail::mix64(key_ + (counter_++) * detail::kGolden);
  }

  /// Uniform double on the open interval (0, 1) with 53 random bits.
  double uniform01() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  double exponential() noexcept { return -std::log(uniform01()); }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  std::uint64_t draws() const noexcept { return counter_ - (stream_id_ << kCounterBits); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace levyq
