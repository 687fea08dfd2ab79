#include "noisewarp/baselines.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace noisewarp {
namespace {

// Catmull-Rom weights (a = -0.5) for offset t in [0, 1).
std::array<double, 4> catmull_rom(double t) {
  constexpr double a = -0.5;
  auto near = [](double x) { return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0; };
  auto far = [](double x) { return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a; };
  return {far(1.0 + t), near(t), near(1.0 - t), far(2.0 - t)};
}

class Sampler {
 public:
  Sampler(std::span<const float> plane, int height, int width)
      : plane_(plane), height_(height), width_(width) {}

  double at(int y, int x) const {
    y = std::clamp(y, 0, height_ - 1);
    x = std::clamp(x, 0, width_ - 1);
    return plane_[static_cast<std::size_t>(y) * width_ + x];
  }

  double nearest(double y, double x) const {
    return at(static_cast<int>(std::round(y)), static_cast<int>(std::round(x)));
  }

  double bilinear(double y, double x) const {
    const double fy = std::floor(y), fx = std::floor(x);
    const double ty = y - fy, tx = x - fx;
    const int iy = static_cast<int>(fy), ix = static_cast<int>(fx);
    return (1 - ty) * ((1 - tx) * at(iy, ix) + tx * at(iy, ix + 1)) +
           ty * ((1 - tx) * at(iy + 1, ix) + tx * at(iy + 1, ix + 1));
  }

  double bicubic(double y, double x) const {
    const double fy = std::floor(y), fx = std::floor(x);
    const auto wy = catmull_rom(y - fy);
    const auto wx = catmull_rom(x - fx);
    const int iy = static_cast<int>(fy), ix = static_cast<int>(fx);
    double sum = 0.0;
    for (int j = 0; j < 4; ++j) {
      double row = 0.0;
      for (int i = 0; i < 4; ++i) row += wx[i] * at(iy - 1 + j, ix - 1 + i);
      sum += wy[j] * row;
    }
    return sum;
  }

 private:
  std::span<const float> plane_;
  int height_;
  int width_;
};

// Source coordinates are clamped before integer conversion so wild flows
// cannot overflow.
double clamp_coord(double v, int size) { return std::clamp(v, -2.0, size + 1.0); }

NoiseField resample(const NoiseField& prev, const FlowField& flow, Interpolation mode) {
  if (flow.height() != prev.height() || flow.width() != prev.width()) {
    throw std::invalid_argument("interp_warped_noise: flow and noise dimensions differ");
  }
  const int h = prev.height(), w = prev.width();
  const std::size_t n = prev.pixel_count();
  std::vector<float> values(prev.size());
  for (int c = 0; c < prev.channels(); ++c) {
    const Sampler sampler(prev.channel(c), h, w);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double sy = clamp_coord(y - static_cast<double>(flow.dy_at(y, x)), h);
        const double sx = clamp_coord(x - static_cast<double>(flow.dx_at(y, x)), w);
        double v = 0.0;
        switch (mode) {
          case Interpolation::kNearest:
            v = sampler.nearest(sy, sx);
            break;
          case Interpolation::kBilinear:
            v = sampler.bilinear(sy, sx);
            break;
          case Interpolation::kBicubic:
            v = sampler.bicubic(sy, sx);
            break;
        }
        values[static_cast<std::size_t>(c) * n + static_cast<std::size_t>(y) * w + x] =
            static_cast<float>(v);
      }
    }
  }
  return NoiseField(h, w, prev.channels(), std::move(values));
}

}  // namespace

NoiseSequence fixed_noise(int height, int width, int channels, int frames, std::uint64_t seed) {
  if (frames < 1) throw std::invalid_argument("frames must be >= 1");
  const NoiseField frame = sample_white_noise(height, width, channels, RngStream(seed));
  return NoiseSequence(std::vector<NoiseField>(static_cast<std::size_t>(frames), frame), seed,
                       {"fixed"});
}

NoiseSequence random_noise(int height, int width, int channels, int frames, std::uint64_t seed) {
  if (frames < 1) throw std::invalid_argument("frames must be >= 1");
  std::vector<NoiseField> out;
  out.reserve(static_cast<std::size_t>(frames));
  for (int t = 0; t < frames; ++t) {
    out.push_back(sample_white_noise(height, width, channels,
                                     RngStream(seed, static_cast<std::uint32_t>(t))));
  }
  return NoiseSequence(std::move(out), seed, {"random"});
}

Interpolation parse_interpolation(std::string_view name) {
  if (name == "nearest") return Interpolation::kNearest;
  if (name == "bilinear") return Interpolation::kBilinear;
  if (name == "bicubic") return Interpolation::kBicubic;
  throw std::invalid_argument("unknown interpolation mode '" + std::string(name) + "'");
}

NoiseSequence interp_warped_noise(const NoiseField& init, std::span<const FlowField> flows,
                                  Interpolation mode) {
  std::vector<NoiseField> out;
  out.reserve(flows.size() + 1);
  out.push_back(init);
  for (const FlowField& flow : flows) out.push_back(resample(out.back(), flow, mode));
  const char* name = mode == Interpolation::kNearest    ? "nearest"
                     : mode == Interpolation::kBilinear ? "bilinear"
                                                        : "bicubic";
  return NoiseSequence(std::move(out), 0, {std::string("interp:") + name});
}

}  // namespace noisewarp
