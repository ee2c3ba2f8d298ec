#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace riskgmm {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The 128-bit counter is laid out as (block, substream, stream_lo,
/// stream_hi) and the 64-bit seed is the key, so every (seed, stream,
/// substream) triple addresses an independent sequence. The simulator uses
/// stream = path index and substream = iteration index.
class Philox4x32 {
public:
  using result_type = std::uint32_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  explicit Philox4x32(std::uint64_t seed, std::uint64_t stream = 0,
                      std::uint32_t substream = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {
    reset(stream, substream);
  }

  /// Jump to the start of another (stream, substream) sequence.
  void reset(std::uint64_t stream, std::uint32_t substream) {
    ctr_ = {0u, substream, static_cast<std::uint32_t>(stream),
            static_cast<std::uint32_t>(stream >> 32)};
    idx_ = 4;
  }

  result_type operator()() {
    if (idx_ == 4) {
      buf_ = block(ctr_, key_);
      ++ctr_[0];
      idx_ = 0;
    }
    return buf_[idx_++];
  }

  /// The raw bijection, exposed for known-answer tests.
  static Block block(Block ctr, Key key) {
    for (int r = 0; r < 10; ++r) {
      if (r > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

private:
  Key key_;
  Block ctr_{};
  Block buf_{};
  int idx_ = 4;
};

/// Reserved stream ids for non-simulation draws (synthetic data).
inline constexpr std::uint64_t kDataStreamBase = std::uint64_t{1} << 63;

}  // namespace riskgmm
