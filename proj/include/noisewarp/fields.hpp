#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "noisewarp/rng.hpp"

namespace noisewarp {

// Per-frame noise tensor, channel-planar and row-major:
// index = (c * height + y) * width + x.
// Immutable once constructed; all values are finite.
class NoiseField {
 public:
  NoiseField(int height, int width, int channels, std::vector<float> values);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }
  std::size_t size() const { return values_.size(); }

  std::span<const float> values() const { return values_; }
  std::span<const float> channel(int c) const;
  float at(int c, int y, int x) const {
    return values_[(static_cast<std::size_t>(c) * height_ + y) * width_ + x];
  }

  friend bool operator==(const NoiseField&, const NoiseField&) = default;

 private:
  int height_;
  int width_;
  int channels_;
  std::vector<float> values_;
};

// Per-pixel flow density (aggregated pixel mass). Shared by all channels.
// Stored in double so that mass can thin out over thousands of expanding
// frames without underflowing.
class DensityField {
 public:
  DensityField(int height, int width, std::vector<double> values);
  static DensityField ones(int height, int width);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t pixel_count() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double at(int y, int x) const { return values_[static_cast<std::size_t>(y) * width_ + x]; }
  double total_mass() const;

  friend bool operator==(const DensityField&, const DensityField&) = default;

 private:
  int height_;
  int width_;
  std::vector<double> values_;
};

// Dense displacement map in pixels: destination = source + (dx, dy).
// Destinations may fall outside the frame.
class FlowField {
 public:
  FlowField(int height, int width, std::vector<float> dx, std::vector<float> dy);
  static FlowField zeros(int height, int width);
  static FlowField uniform(int height, int width, float dx, float dy);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t pixel_count() const { return dx_.size(); }
  std::span<const float> dx() const { return dx_; }
  std::span<const float> dy() const { return dy_; }
  float dx_at(int y, int x) const { return dx_[static_cast<std::size_t>(y) * width_ + x]; }
  float dy_at(int y, int x) const { return dy_[static_cast<std::size_t>(y) * width_ + x]; }

  friend bool operator==(const FlowField&, const FlowField&) = default;

 private:
  int height_;
  int width_;
  std::vector<float> dx_;
  std::vector<float> dy_;
};

// i.i.d. N(0, 1) entries drawn from the white-noise sub-stream of `rng`.
NoiseField sample_white_noise(int height, int width, int channels, const RngStream& rng);
NoiseField sample_white_noise(int height, int width, int channels, std::uint64_t seed);

// Rounds every displacement to an integer, ties away from zero.
FlowField quantize_flow(const FlowField& flow);

// Nearest-neighbour resize of a flow to new dimensions. Displacements are
// rescaled by the per-axis size ratio so they stay in destination pixels.
FlowField resize_flow(const FlowField& flow, int height, int width);

}  // namespace noisewarp
