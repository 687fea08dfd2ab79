#include "noisewarp/rng.hpp"

#include <cmath>
#include <numbers>

namespace noisewarp {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;

inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return static_cast<double>(bits >> 11) * kTwoPow53Inv;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::array<std::uint32_t, 4> RngStream::bits(StreamPurpose purpose, std::uint32_t channel,
                                             std::uint32_t pixel, std::uint32_t draw) const {
  const std::uint32_t tag =
      (static_cast<std::uint32_t>(purpose) << 24) | (channel & 0x00FFFFFFu);
  return philox4x32({pixel, draw, tag, frame_},
                    {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
}

double RngStream::uniform(StreamPurpose purpose, std::uint32_t channel, std::uint32_t pixel,
                          std::uint32_t draw) const {
  const auto b = bits(purpose, channel, pixel, draw);
  return to_unit(b[0], b[1]);
}

double RngStream::normal(StreamPurpose purpose, std::uint32_t channel, std::uint32_t pixel,
                         std::uint32_t draw) const {
  const auto b = bits(purpose, channel, pixel, draw);
  // u1 in (0, 1] keeps the logarithm finite.
  const double u1 = to_unit(b[0], b[1]) + kTwoPow53Inv;
  const double u2 = to_unit(b[2], b[3]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace noisewarp
