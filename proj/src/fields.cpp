#include "noisewarp/fields.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace noisewarp {
namespace {

void check_dims(int height, int width) {
  if (height < 1 || width < 1) {
    throw std::invalid_argument("field dimensions must be >= 1, got " + std::to_string(height) +
                                "x" + std::to_string(width));
  }
}

std::size_t area(int height, int width) {
  return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
}

template <typename T>
void check_size(const std::vector<T>& values, std::size_t expected, const char* what) {
  if (values.size() != expected) {
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(expected) +
                                " values, got " + std::to_string(values.size()));
  }
}

}  // namespace

NoiseField::NoiseField(int height, int width, int channels, std::vector<float> values)
    : height_(height), width_(width), channels_(channels), values_(std::move(values)) {
  check_dims(height, width);
  if (channels < 1) throw std::invalid_argument("noise field needs at least one channel");
  check_size(values_, area(height, width) * static_cast<std::size_t>(channels), "noise field");
  if (!std::all_of(values_.begin(), values_.end(), [](float v) { return std::isfinite(v); })) {
    throw std::invalid_argument("noise field contains NaN or Inf");
  }
}

std::span<const float> NoiseField::channel(int c) const {
  if (c < 0 || c >= channels_) throw std::out_of_range("channel index out of range");
  return std::span<const float>(values_).subspan(static_cast<std::size_t>(c) * pixel_count(),
                                                 pixel_count());
}

DensityField::DensityField(int height, int width, std::vector<double> values)
    : height_(height), width_(width), values_(std::move(values)) {
  check_dims(height, width);
  check_size(values_, area(height, width), "density field");
  if (!std::all_of(values_.begin(), values_.end(),
                   [](double v) { return std::isfinite(v) && v > 0.0; })) {
    throw std::invalid_argument("density field entries must be finite and > 0");
  }
}

DensityField DensityField::ones(int height, int width) {
  check_dims(height, width);
  return DensityField(height, width, std::vector<double>(area(height, width), 1.0));
}

double DensityField::total_mass() const {
  double total = 0.0;
  for (double v : values_) total += v;
  return total;
}

FlowField::FlowField(int height, int width, std::vector<float> dx, std::vector<float> dy)
    : height_(height), width_(width), dx_(std::move(dx)), dy_(std::move(dy)) {
  check_dims(height, width);
  check_size(dx_, area(height, width), "flow dx");
  check_size(dy_, area(height, width), "flow dy");
  auto finite = [](float v) { return std::isfinite(v); };
  if (!std::all_of(dx_.begin(), dx_.end(), finite) ||
      !std::all_of(dy_.begin(), dy_.end(), finite)) {
    throw std::invalid_argument("flow field contains NaN or Inf");
  }
}

FlowField FlowField::zeros(int height, int width) { return uniform(height, width, 0.0f, 0.0f); }

FlowField FlowField::uniform(int height, int width, float dx, float dy) {
  check_dims(height, width);
  const std::size_t n = area(height, width);
  return FlowField(height, width, std::vector<float>(n, dx), std::vector<float>(n, dy));
}

NoiseField sample_white_noise(int height, int width, int channels, const RngStream& rng) {
  check_dims(height, width);
  if (channels < 1) throw std::invalid_argument("noise field needs at least one channel");
  const std::size_t n = area(height, width);
  std::vector<float> values(n * static_cast<std::size_t>(channels));
  for (int c = 0; c < channels; ++c) {
    float* out = values.data() + static_cast<std::size_t>(c) * n;
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = static_cast<float>(rng.normal(StreamPurpose::kWhiteNoise, static_cast<std::uint32_t>(c),
                                             static_cast<std::uint32_t>(i), 0));
    }
  }
  return NoiseField(height, width, channels, std::move(values));
}

NoiseField sample_white_noise(int height, int width, int channels, std::uint64_t seed) {
  return sample_white_noise(height, width, channels, RngStream(seed));
}

FlowField quantize_flow(const FlowField& flow) {
  auto round_all = [](std::span<const float> in) {
    std::vector<float> out(in.size());
    std::transform(in.begin(), in.end(), out.begin(), [](float v) { return std::round(v); });
    return out;
  };
  return FlowField(flow.height(), flow.width(), round_all(flow.dx()), round_all(flow.dy()));
}

FlowField resize_flow(const FlowField& flow, int height, int width) {
  check_dims(height, width);
  if (height == flow.height() && width == flow.width()) return flow;
  const double sy = static_cast<double>(height) / flow.height();
  const double sx = static_cast<double>(width) / flow.width();
  const std::size_t n = area(height, width);
  std::vector<float> dx(n), dy(n);
  for (int y = 0; y < height; ++y) {
    const int src_y = std::min(flow.height() - 1, static_cast<int>((y + 0.5) / sy));
    for (int x = 0; x < width; ++x) {
      const int src_x = std::min(flow.width() - 1, static_cast<int>((x + 0.5) / sx));
      const std::size_t i = static_cast<std::size_t>(y) * width + x;
      dx[i] = static_cast<float>(flow.dx_at(src_y, src_x) * sx);
      dy[i] = static_cast<float>(flow.dy_at(src_y, src_x) * sy);
    }
  }
  return FlowField(height, width, std::move(dx), std::move(dy));
}

}  // namespace noisewarp
