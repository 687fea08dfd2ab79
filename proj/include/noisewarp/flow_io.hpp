#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "noisewarp/fields.hpp"
#include "noisewarp/sequence.hpp"

namespace noisewarp {

using Bytes = std::vector<std::uint8_t>;

// Middlebury .flo: float32 magic 202021.25, int32 width, int32 height, then
// height * width interleaved (dx, dy) float32 pairs, all little-endian.
inline constexpr float kFloMagic = 202021.25f;

Bytes write_flo(const FlowField& flow);
// Throws FormatError on bad magic, nonpositive dimensions, or a payload
// length that does not match the header.
FlowField read_flo(std::span<const std::uint8_t> bytes);
// Decodes a concatenation of .flo payloads.
std::vector<FlowField> read_flo_stream(std::span<const std::uint8_t> bytes);

// Noise container: "GWTF", u32 version (1), u32 F, C, H, W, u64 seed, then
// F*C*H*W float32 values frame-major, channel-planar, row-major. Little-endian.
inline constexpr std::uint32_t kContainerVersion = 1;
inline constexpr std::size_t kContainerHeaderSize = 32;

Bytes write_noise_container(const NoiseSequence& seq);
NoiseSequence read_noise_container(std::span<const std::uint8_t> bytes);

// 8-bit image, row-major, interleaved channels (1 = gray, 3 = RGB).
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> pixels;

  std::span<const std::uint8_t> pixel(int y, int x) const {
    return std::span<const std::uint8_t>(pixels).subspan(
        (static_cast<std::size_t>(y) * width + x) * channels, channels);
  }
};

// Color-wheel encoding: hue = direction, saturation = magnitude relative to
// the 99th-percentile magnitude (clamped to 1), value = 1. Zero flow is white.
Image visualize_flow(const FlowField& flow);
// Gray level round(255 * (v + 3) / 6) with v clamped to [-3, 3].
Image visualize_noise(const NoiseField& noise, int channel = 0);

Bytes encode_png(const Image& image);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace noisewarp
