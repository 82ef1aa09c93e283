#pragma once

#include <array>
#include <cstdint>

#include "persistlab/normal.hpp"

namespace persistlab {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// The output is a pure function of (key, counter), so any path of any batch
/// can be regenerated without replaying a stream.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox4x32(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  Counter operator()(Counter ctr) const {
    Key k = key_;
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k[1], static_cast<std::uint32_t>(p0)};
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  Key key_;
};

/// Map 64 random bits to a double strictly inside (0, 1).
inline double bits_to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Sequential standard normals drawn from one Philox stream. Stream `id`
/// occupies the counter words 0-1, the block index the words 2-3.
/// Normals come from the inverse CDF, so output depends only on the bits.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t id) : gen_(seed), id_(id) {}

  double next() {
    if (pos_ == 2) refill();
    return buf_[pos_++];
  }

  double next_uniform() {
    if (upos_ == 2) refill_uniform();
    return ubuf_[upos_++];
  }

 private:
  Philox4x32::Counter draw() {
    return gen_({static_cast<std::uint32_t>(id_), static_cast<std::uint32_t>(id_ >> 32),
                 static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32)});
  }
  void refill() {
    const auto w = draw();
    ++block_;
    buf_[0] = normal_quantile(bits_to_open_unit((std::uint64_t{w[0]} << 32) | w[1]));
    buf_[1] = normal_quantile(bits_to_open_unit((std::uint64_t{w[2]} << 32) | w[3]));
    pos_ = 0;
  }
  void refill_uniform() {
    const auto w = draw();
    ++block_;
    ubuf_[0] = bits_to_open_unit((std::uint64_t{w[0]} << 32) | w[1]);
    ubuf_[1] = bits_to_open_unit((std::uint64_t{w[2]} << 32) | w[3]);
    upos_ = 0;
  }

  Philox4x32 gen_;
  std::uint64_t id_;
  std::uint64_t block_ = 0;
  std::array<double, 2> buf_{};
  std::array<double, 2> ubuf_{};
  int pos_ = 2;
  int upos_ = 2;
};

/// Seed of batch `b`: base + b * golden-ratio increment (mod 2^64).
constexpr std::uint64_t batch_seed(std::uint64_t base_seed, std::uint64_t batch_index) {
  return base_seed + batch_index * 0x9E3779B97F4A7C15ull;
}

}  // namespace persistlab
