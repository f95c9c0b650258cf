#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace cococat {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). The 64-bit
// stream id occupies the upper half of the counter, so distinct streams under
// the same key never share a counter value.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;

  Philox4x32(std::uint64_t key, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (index_ == 4) refill();
    return buffer_[index_++];
  }

  // Raw block function, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                            std::array<std::uint32_t, 2> key);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t position_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int index_ = 4;
};

// Uniform double in the open interval (0, 1) built from 53 random bits.
inline double uniform_open(Philox4x32& engine) {
  const std::uint64_t hi = engine();
  const std::uint64_t lo = engine();
  const std::uint64_t bits = ((hi << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace cococat
