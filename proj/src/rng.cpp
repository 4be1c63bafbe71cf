#include "ssep/rng.hpp"

#include <cmath>

namespace ssep {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = std::uint64_t{a} * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t substream)
    : seed_(seed), stream_id_(stream_id), substream_(substream) {
  const std::uint64_t k = mix64(seed ^ mix64(stream_id ^ 0x632be59bd9b4e019ULL));
  key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

std::uint64_t RngStream::next_u64() {
  if (buffered_) {
    buffered_ = false;
    return pending_;
  }
  const auto out = philox4x32({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                               static_cast<std::uint32_t>(substream_),
                               static_cast<std::uint32_t>(substream_ >> 32)},
                              key_);
  ++block_;
  pending_ = (std::uint64_t{out[3]} << 32) | out[2];
  buffered_ = true;
  return (std::uint64_t{out[1]} << 32) | out[0];
}

double RngStream::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::exponential(double rate) { return -std::log(uniform()) / rate; }

std::uint64_t RngStream::below(std::uint64_t n) {
  // Lemire's multiply-shift with rejection of the biased low region.
  const std::uint64_t threshold = (0 - n) % n;
  __extension__ using u128 = unsigned __int128;
  while (true) {
    const u128 m = static_cast<u128>(next_u64()) * n;
    if (static_cast<std::uint64_t>(m) >= threshold) return static_cast<std::uint64_t>(m >> 64);
  }
}

RngStream RngStream::substream(std::uint64_t id) const {
  RngStream s = *this;
  s.substream_ = id;
  s.block_ = 0;
  s.buffered_ = false;
  return s;
}

}  // namespace ssep
