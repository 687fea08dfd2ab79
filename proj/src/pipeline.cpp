#include "noisewarp/pipeline.hpp"

#include <chrono>
#include <stdexcept>
#include <string>

#include "noisewarp/noise_post.hpp"

namespace noisewarp {

void validate_pipeline(int height, int width, const PipelineOptions& options) {
  if (!(options.gamma >= 0.0 && options.gamma <= 1.0)) {
    throw std::invalid_argument("gamma must lie in [0, 1]");
  }
  if (options.spatial_down < 1 || options.temporal_down < 1) {
    throw std::invalid_argument("downsample factors must be >= 1");
  }
  if (options.channels < 1) throw std::invalid_argument("channels must be >= 1");
  if (height % options.spatial_down != 0 || width % options.spatial_down != 0) {
    throw std::invalid_argument("frame " + std::to_string(height) + "x" + std::to_string(width) +
                                " is not divisible by spatial factor " +
                                std::to_string(options.spatial_down));
  }
}

NoiseSequence run_warp_pipeline(std::span<const FlowPair> flows, int height, int width,
                                const PipelineOptions& options,
                                const std::function<void(std::size_t, double)>& on_frame) {
  validate_pipeline(height, width, options);
  const RngStream rng(options.seed);
  NoiseWarper warper(sample_white_noise(height, width, options.channels, rng), rng);
  std::vector<NoiseField> frames{warper.noise()};
  frames.reserve(flows.size() + 1);
  for (std::size_t i = 0; i < flows.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    frames.push_back(warper.step(flows[i]));
    const auto stop = std::chrono::steady_clock::now();
    if (on_frame) on_frame(i + 1, std::chrono::duration<double, std::milli>(stop - start).count());
  }
  NoiseSequence seq(std::move(frames), options.seed, {"warp"});
  seq = degrade(seq, options.gamma, rng);
  if (options.spatial_down > 1 || options.temporal_down > 1) {
    seq = downsample_to_latent(seq, options.spatial_down, options.temporal_down);
  }
  return seq;
}

}  // namespace noisewarp
