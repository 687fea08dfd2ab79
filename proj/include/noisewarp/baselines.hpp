#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include "noisewarp/fields.hpp"
#include "noisewarp/sequence.hpp"

namespace noisewarp {

// One white-noise frame repeated `frames` times.
NoiseSequence fixed_noise(int height, int width, int channels, int frames, std::uint64_t seed);

// `frames` independent white-noise frames.
NoiseSequence random_noise(int height, int width, int channels, int frames, std::uint64_t seed);

enum class Interpolation { kNearest, kBilinear, kBicubic };

Interpolation parse_interpolation(std::string_view name);

// Resamples each frame from the previous one at x - f(x) with the chosen
// kernel (bicubic is Catmull-Rom). Samples outside the frame clamp to the
// border. No variance correction is applied.
NoiseSequence interp_warped_noise(const NoiseField& init, std::span<const FlowField> flows,
                                  Interpolation mode);

}  // namespace noisewarp
