#pragma once

#include <array>
#include <cstdint>

namespace noisewarp {

// Philox4x32-10 block function. Exposed for known-answer testing.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Independent sub-streams drawn from the same seed. Every consumer of
// randomness owns one tag so that, for example, degradation noise never
// reuses the draws that seeded the warp.
enum class StreamPurpose : std::uint8_t {
  kWhiteNoise = 0,
  kSplit = 1,
  kOrphan = 2,
  kDegrade = 3,
  kSubsample = 4,
  kPermutation = 5,
};

// Counter-based random stream. A draw is a pure function of
// (seed, frame, purpose, channel, pixel, draw), so results never depend on
// evaluation order or on how work is split across threads.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint32_t frame = 0)
      : seed_(seed), frame_(frame) {}

  std::uint64_t seed() const { return seed_; }
  std::uint32_t frame() const { return frame_; }
  RngStream at_frame(std::uint32_t frame) const { return RngStream(seed_, frame); }

  // Channel must fit in 24 bits.
  std::array<std::uint32_t, 4> bits(StreamPurpose purpose, std::uint32_t channel,
                                    std::uint32_t pixel, std::uint32_t draw) const;

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform(StreamPurpose purpose, std::uint32_t channel, std::uint32_t pixel,
                 std::uint32_t draw) const;

  // Standard normal via Box-Muller over one Philox block.
  double normal(StreamPurpose purpose, std::uint32_t channel, std::uint32_t pixel,
                std::uint32_t draw) const;

  friend bool operator==(const RngStream&, const RngStream&) = default;

 private:
  std::uint64_t seed_;
  std::uint32_t frame_;
};

}  // namespace noisewarp
