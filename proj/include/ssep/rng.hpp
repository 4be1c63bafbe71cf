#pragma once

#include <array>
#include <cstdint>

namespace ssep {

/// SplitMix64 finalizer. Used to derive Philox keys from (seed, stream id)
/// and substream ids from vertex/edge hashes.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Philox4x32-10 block function: 128-bit counter, 64-bit key.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

/// Counter-based random stream. Output is a pure function of
/// (seed, stream id, substream, position), identical on every platform.
/// Replicate i of an experiment uses stream id i; the Philox key is
/// mix64(seed ^ mix64(stream_id ^ 0x632be59bd9b4e019)).
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t substream = 0);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  /// Exp(rate) variate by inversion.
  double exponential(double rate);
  bool bernoulli(double p) { return uniform() < p; }
  /// Uniform integer in [0, n), n > 0, without modulo bias.
  std::uint64_t below(std::uint64_t n);

  /// Independent stream with the same key and a different substream id;
  /// its counter starts at zero.
  RngStream substream(std::uint64_t id) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t substream_id() const { return substream_; }
  /// Number of 64-bit outputs consumed so far.
  std::uint64_t position() const { return 2 * block_ - (buffered_ ? 1 : 0); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t substream_;
  std::array<std::uint32_t, 2> key_{};
  std::uint64_t block_ = 0;
  std::uint64_t pending_ = 0;
  bool buffered_ = false;
};

}  // namespace ssep
