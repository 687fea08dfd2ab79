#include "noisewarp/noise_post.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace noisewarp {

NoiseSequence degrade(const NoiseSequence& seq, double gamma, const RngStream& rng) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("degradation level must lie in [0, 1], got " +
                                std::to_string(gamma));
  }
  if (gamma == 0.0) return seq.tagged("degrade:0");

  const double keep = 1.0 - gamma;
  const double norm = std::sqrt(keep * keep + gamma * gamma);
  std::vector<NoiseField> out;
  out.reserve(seq.size());
  for (std::size_t t = 0; t < seq.size(); ++t) {
    const NoiseField& frame = seq.frame(t);
    const RngStream frame_rng = rng.at_frame(rng.frame() + static_cast<std::uint32_t>(t));
    const std::size_t n = frame.pixel_count();
    const auto in = frame.values();
    std::vector<float> values(in.size());
    for (int c = 0; c < frame.channels(); ++c) {
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = static_cast<std::size_t>(c) * n + i;
        const double zeta = frame_rng.normal(StreamPurpose::kDegrade, static_cast<std::uint32_t>(c),
                                             static_cast<std::uint32_t>(i), 0);
        values[k] = static_cast<float>((keep * in[k] + gamma * zeta) / norm);
      }
    }
    out.emplace_back(frame.height(), frame.width(), frame.channels(), std::move(values));
  }
  std::vector<std::string> provenance = seq.provenance();
  provenance.push_back("degrade:" + std::to_string(gamma));
  return NoiseSequence(std::move(out), seq.seed(), std::move(provenance));
}

NoiseSequence downsample_to_latent(const NoiseSequence& seq, int spatial, int temporal) {
  if (spatial < 1 || temporal < 1) throw std::invalid_argument("downsample factors must be >= 1");
  if (seq.height() % spatial != 0 || seq.width() % spatial != 0) {
    throw std::invalid_argument("frame " + std::to_string(seq.height()) + "x" +
                                std::to_string(seq.width()) + " is not divisible by spatial factor " +
                                std::to_string(spatial));
  }
  const int oh = seq.height() / spatial;
  const int ow = seq.width() / spatial;
  const int channels = seq.channels();
  const double scale = static_cast<double>(spatial) / (static_cast<double>(spatial) * spatial);

  std::vector<NoiseField> out;
  for (std::size_t t = 0; t < seq.size(); t += static_cast<std::size_t>(temporal)) {
    const NoiseField& frame = seq.frame(t);
    if (spatial == 1) {
      out.push_back(frame);
      continue;
    }
    std::vector<float> values(static_cast<std::size_t>(oh) * ow * channels);
    for (int c = 0; c < channels; ++c) {
      for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
          double sum = 0.0;
          for (int dy = 0; dy < spatial; ++dy) {
            for (int dx = 0; dx < spatial; ++dx) {
              sum += frame.at(c, oy * spatial + dy, ox * spatial + dx);
            }
          }
          values[(static_cast<std::size_t>(c) * oh + oy) * ow + ox] = static_cast<float>(sum * scale);
        }
      }
    }
    out.emplace_back(oh, ow, channels, std::move(values));
  }
  std::vector<std::string> provenance = seq.provenance();
  provenance.push_back("downsample:" + std::to_string(spatial) + "x" + std::to_string(temporal));
  return NoiseSequence(std::move(out), seq.seed(), std::move(provenance));
}

}  // namespace noisewarp
