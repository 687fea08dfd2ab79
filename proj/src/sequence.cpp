#include "noisewarp/sequence.hpp"

#include <stdexcept>

namespace noisewarp {

NoiseSequence::NoiseSequence(std::vector<NoiseField> frames, std::uint64_t seed,
                             std::vector<std::string> provenance)
    : frames_(std::move(frames)), seed_(seed), provenance_(std::move(provenance)) {
  if (frames_.empty()) throw std::invalid_argument("noise sequence must not be empty");
  const NoiseField& first = frames_.front();
  for (const NoiseField& f : frames_) {
    if (f.height() != first.height() || f.width() != first.width() ||
        f.channels() != first.channels()) {
      throw std::invalid_argument("noise sequence frames must share dimensions");
    }
  }
}

NoiseSequence NoiseSequence::tagged(std::string tag) const {
  NoiseSequence copy = *this;
  copy.provenance_.push_back(std::move(tag));
  return copy;
}

}  // namespace noisewarp
