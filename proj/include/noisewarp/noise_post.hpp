#pragma once

#include "noisewarp/rng.hpp"
#include "noisewarp/sequence.hpp"

namespace noisewarp {

// Blends every element with fresh N(0, 1) noise zeta:
//   Q <- ((1 - gamma) Q + gamma zeta) / sqrt((1 - gamma)^2 + gamma^2)
// Frame t draws from the degradation sub-stream at frame rng.frame() + t.
NoiseSequence degrade(const NoiseSequence& seq, double gamma, const RngStream& rng);

// Keeps frames 0, k, 2k, ... and mean-pools s x s blocks scaled by s, which
// keeps unit variance for white input.
NoiseSequence downsample_to_latent(const NoiseSequence& seq, int spatial, int temporal);

}  // namespace noisewarp
