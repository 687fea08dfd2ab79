#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "noisewarp/fields.hpp"
#include "noisewarp/rng.hpp"
#include "noisewarp/sequence.hpp"

namespace noisewarp {

struct MoranResult {
  double index;
  double expected;  // -1 / (N - 1)
  double variance;  // under the normality assumption
  double z_score;
  double p_value;   // two-sided
};

// Moran's I of a single H x W plane with binary rook (4-neighbour) weights.
// Requires H * W >= 100; throws DegenerateInputError for constant planes.
MoranResult morans_i(std::span<const float> plane, int height, int width);
MoranResult morans_i(const NoiseField& field, int channel);

// Same index with a two-sided permutation p-value: (1 + #extreme) / (1 + permutations).
MoranResult morans_i_permutation(std::span<const float> plane, int height, int width,
                                 std::uint32_t permutations, const RngStream& rng);

struct KsResult {
  double statistic;
  double p_value;
};

// Kolmogorov survival function Q(lambda) = 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);
double standard_normal_cdf(double x);

// One-sample K-S test of `sample` against N(0, 1), all values used.
KsResult ks_test_normal(std::span<const double> sample);

// K-S test on `sample_size` pixels drawn uniformly without replacement.
// The subset is drawn from the subsample stream of `rng` under `channel`.
KsResult ks_test(std::span<const float> plane, std::uint32_t sample_size, const RngStream& rng,
                 std::uint32_t channel = 0);
KsResult ks_test(const NoiseField& field, int channel, std::uint32_t sample_size,
                 const RngStream& rng);

struct BatteryConfig {
  double moran_alpha = 0.05;
  double ks_alpha = 0.05;
  std::uint32_t ks_sample_size = 200;
  double variance_tolerance = 0.1;
  // |mean| bound; defaults to 4 / sqrt(N) when unset.
  std::optional<double> mean_tolerance;
  // Minimum fraction of frames that must pass each test.
  double quota = 0.9;
  std::uint64_t seed = 0;
  bool moran_permutation = false;
  std::uint32_t permutations = 999;
};

struct GaussianityReport {
  std::uint32_t frame = 0;
  std::uint32_t channel = 0;
  double morans_i = 0.0;
  double morans_p = 0.0;
  double ks_stat = 0.0;
  double ks_p = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  std::uint64_t n_pixels = 0;
  bool moran_pass = false;
  bool ks_pass = false;
  bool moments_pass = false;
  bool pass = false;

  friend bool operator==(const GaussianityReport&, const GaussianityReport&) = default;
};

struct BatteryResult {
  std::vector<GaussianityReport> reports;
  double moran_pass_rate = 0.0;
  double ks_pass_rate = 0.0;
  double moments_pass_rate = 0.0;
  double joint_pass_rate = 0.0;
  // Every per-test pass rate reaches the quota.
  bool pass = false;
};

GaussianityReport frame_report(const NoiseField& field, int channel, std::uint32_t frame_index,
                               const BatteryConfig& config);
BatteryResult gaussianity_battery(const NoiseSequence& seq, const BatteryConfig& config = {});

std::string report_to_json(const GaussianityReport& report);
GaussianityReport report_from_json(const std::string& line);
// One JSON object per line, then a summary object.
std::string battery_to_jsonl(const BatteryResult& result);
std::string battery_to_table(const BatteryResult& result);

// Mean over frame pairs of the Pearson correlation between frame t+1 at
// v + round(f_t(v)) and frame t at v, over in-bounds destinations.
double temporal_tracking_score(const NoiseSequence& seq, std::span<const FlowField> flows);

double pearson(std::span<const double> a, std::span<const double> b);

}  // namespace noisewarp
