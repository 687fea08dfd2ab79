#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "noisewarp/sequence.hpp"
#include "noisewarp/warp.hpp"

namespace noisewarp {

struct PipelineOptions {
  std::uint64_t seed = 0;
  double gamma = 0.0;
  int spatial_down = 1;
  int temporal_down = 1;
  int channels = 1;
};

// Throws std::invalid_argument for out-of-range options or frame sizes the
// spatial factor does not divide, before any work is done.
void validate_pipeline(int height, int width, const PipelineOptions& options);

// White noise from `seed` -> warp along `flows` -> degrade -> downsample.
// `on_frame(index, milliseconds)` is called after every warped frame.
NoiseSequence run_warp_pipeline(std::span<const FlowPair> flows, int height, int width,
                                const PipelineOptions& options,
                                const std::function<void(std::size_t, double)>& on_frame = {});

}  // namespace noisewarp
