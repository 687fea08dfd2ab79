#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "noisewarp/fields.hpp"

namespace noisewarp {

// Ordered, non-empty run of equally sized noise frames.
class NoiseSequence {
 public:
  explicit NoiseSequence(std::vector<NoiseField> frames, std::uint64_t seed = 0,
                         std::vector<std::string> provenance = {});

  const std::vector<NoiseField>& frames() const { return frames_; }
  const NoiseField& frame(std::size_t i) const { return frames_.at(i); }
  std::size_t size() const { return frames_.size(); }
  int height() const { return frames_.front().height(); }
  int width() const { return frames_.front().width(); }
  int channels() const { return frames_.front().channels(); }
  std::uint64_t seed() const { return seed_; }
  const std::vector<std::string>& provenance() const { return provenance_; }

  // Returns a copy with one more provenance entry.
  NoiseSequence tagged(std::string tag) const;

  friend bool operator==(const NoiseSequence&, const NoiseSequence&) = default;

 private:
  std::vector<NoiseField> frames_;
  std::uint64_t seed_;
  std::vector<std::string> provenance_;
};

}  // namespace noisewarp
