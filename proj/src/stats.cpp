#include "noisewarp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "noisewarp/errors.hpp"

namespace noisewarp {
namespace {

using nlohmann::json;

struct RookWeights {
  double s0;  // sum of weights over ordered pairs
  double s1;
  double s2;
};

RookWeights rook_weights(int height, int width) {
  const double h = height, w = width;
  const double s0 = 2.0 * (h * (w - 1) + w * (h - 1));
  double s2 = 0.0;
  for (int y = 0; y < height; ++y) {
    const int ny = (y > 0) + (y + 1 < height);
    for (int x = 0; x < width; ++x) {
      const double k = ny + (x > 0) + (x + 1 < width);
      s2 += 4.0 * k * k;
    }
  }
  // Binary symmetric weights: (w_ij + w_ji)^2 = 4 for each ordered pair.
  return {s0, 2.0 * s0, s2};
}

// Sum over ordered rook pairs of z_i * z_j.
double rook_cross(std::span<const double> z, int height, int width) {
  double cross = 0.0;
  for (int y = 0; y < height; ++y) {
    const std::size_t row = static_cast<std::size_t>(y) * width;
    for (int x = 0; x < width; ++x) {
      const double zi = z[row + x];
      if (x + 1 < width) cross += zi * z[row + x + 1];
      if (y + 1 < height) cross += zi * z[row + width + x];
    }
  }
  return 2.0 * cross;
}

std::vector<double> centered(std::span<const float> plane, int height, int width, double& m2) {
  const std::size_t n = static_cast<std::size_t>(height) * width;
  if (height < 1 || width < 1 || plane.size() != n) {
    throw std::invalid_argument("morans_i: plane size does not match dimensions");
  }
  if (n < 100) throw std::invalid_argument("morans_i needs at least 100 pixels");
  const auto [lo, hi] = std::minmax_element(plane.begin(), plane.end());
  if (*lo == *hi) throw DegenerateInputError("morans_i: field has zero variance");
  double mean = 0.0;
  for (float v : plane) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> z(n);
  m2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = plane[i] - mean;
    m2 += z[i] * z[i];
  }
  return z;
}

double moments_mean(std::span<const float> plane) {
  double sum = 0.0;
  for (float v : plane) sum += v;
  return sum / static_cast<double>(plane.size());
}

double moments_variance(std::span<const float> plane, double mean) {
  double ss = 0.0;
  for (float v : plane) ss += (v - mean) * (v - mean);
  return plane.size() > 1 ? ss / static_cast<double>(plane.size() - 1) : 0.0;
}

json report_json(const GaussianityReport& r) {
  return json{{"frame", r.frame},       {"channel", r.channel},   {"morans_i", r.morans_i},
              {"morans_p", r.morans_p}, {"ks_stat", r.ks_stat},   {"ks_p", r.ks_p},
              {"mean", r.mean},         {"variance", r.variance}, {"n_pixels", r.n_pixels},
              {"moran_pass", r.moran_pass}, {"ks_pass", r.ks_pass},
              {"moments_pass", r.moments_pass}, {"pass", r.pass}};
}

}  // namespace

MoranResult morans_i(std::span<const float> plane, int height, int width) {
  double m2 = 0.0;
  const std::vector<double> z = centered(plane, height, width, m2);
  const double n = static_cast<double>(z.size());
  const RookWeights w = rook_weights(height, width);
  const double index = n / w.s0 * rook_cross(z, height, width) / m2;
  const double expected = -1.0 / (n - 1.0);
  const double variance =
      (n * n * w.s1 - n * w.s2 + 3.0 * w.s0 * w.s0) / ((n * n - 1.0) * w.s0 * w.s0) -
      expected * expected;
  const double z_score = (index - expected) / std::sqrt(variance);
  return {index, expected, variance, z_score, std::erfc(std::abs(z_score) / std::numbers::sqrt2)};
}

MoranResult morans_i(const NoiseField& field, int channel) {
  return morans_i(field.channel(channel), field.height(), field.width());
}

MoranResult morans_i_permutation(std::span<const float> plane, int height, int width,
                                 std::uint32_t permutations, const RngStream& rng) {
  if (permutations < 1) throw std::invalid_argument("permutations must be >= 1");
  MoranResult observed = morans_i(plane, height, width);
  double m2 = 0.0;
  std::vector<double> z = centered(plane, height, width, m2);
  const double scale = static_cast<double>(z.size()) / rook_weights(height, width).s0 / m2;
  const double observed_dev = std::abs(observed.index - observed.expected);

  std::uint32_t extreme = 0;
  double sum = 0.0, sum_sq = 0.0;
  for (std::uint32_t k = 0; k < permutations; ++k) {
    for (std::size_t i = z.size() - 1; i > 0; --i) {
      const double u = rng.uniform(StreamPurpose::kPermutation, 0, static_cast<std::uint32_t>(i), k);
      std::swap(z[i], z[static_cast<std::size_t>(u * static_cast<double>(i + 1))]);
    }
    const double index = scale * rook_cross(z, height, width);
    sum += index;
    sum_sq += index * index;
    if (std::abs(index - observed.expected) >= observed_dev) ++extreme;
  }
  const double mean = sum / permutations;
  observed.variance = permutations > 1 ? (sum_sq - permutations * mean * mean) / (permutations - 1)
                                       : 0.0;
  observed.z_score = observed.variance > 0.0
                         ? (observed.index - mean) / std::sqrt(observed.variance)
                         : 0.0;
  observed.p_value = (1.0 + extreme) / (1.0 + permutations);
  return observed;
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double q = 0.0;
  if (lambda < 1.18) {
    // Jacobi-transformed series converges fast for small lambda.
    const double c = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double sum = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double m = 2.0 * k - 1.0;
      sum += std::exp(-m * m * c);
    }
    q = 1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum;
  } else {
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
      const double term = std::exp(-2.0 * k * k * lambda * lambda);
      q += sign * term;
      if (term < 1e-17) break;
      sign = -sign;
    }
    q *= 2.0;
  }
  return std::clamp(q, 0.0, 1.0);
}

KsResult ks_test_normal(std::span<const double> sample) {
  if (sample.empty()) throw std::invalid_argument("ks_test: empty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = standard_normal_cdf(sorted[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  const double root_n = std::sqrt(n);
  return {d, kolmogorov_survival((root_n + 0.12 + 0.11 / root_n) * d)};
}

KsResult ks_test(std::span<const float> plane, std::uint32_t sample_size, const RngStream& rng,
                 std::uint32_t channel) {
  if (sample_size < 50) throw std::invalid_argument("ks_test: sample_size must be >= 50");
  if (sample_size > plane.size()) {
    throw std::invalid_argument("ks_test: sample_size " + std::to_string(sample_size) +
                                " exceeds pixel count " + std::to_string(plane.size()));
  }
  std::vector<std::uint32_t> index(plane.size());
  std::iota(index.begin(), index.end(), 0u);
  std::vector<double> sample(sample_size);
  for (std::uint32_t i = 0; i < sample_size; ++i) {
    const double u = rng.uniform(StreamPurpose::kSubsample, channel, i, 0);
    const std::size_t j = i + static_cast<std::size_t>(u * static_cast<double>(plane.size() - i));
    std::swap(index[i], index[j]);
    sample[i] = plane[index[i]];
  }
  return ks_test_normal(sample);
}

KsResult ks_test(const NoiseField& field, int channel, std::uint32_t sample_size,
                 const RngStream& rng) {
  return ks_test(field.channel(channel), sample_size, rng, static_cast<std::uint32_t>(channel));
}

GaussianityReport frame_report(const NoiseField& field, int channel, std::uint32_t frame_index,
                               const BatteryConfig& config) {
  const auto plane = field.channel(channel);
  const RngStream rng(config.seed, frame_index);
  GaussianityReport r;
  r.frame = frame_index;
  r.channel = static_cast<std::uint32_t>(channel);
  r.n_pixels = plane.size();
  r.mean = moments_mean(plane);
  r.variance = moments_variance(plane, r.mean);
  try {
    const MoranResult moran =
        config.moran_permutation
            ? morans_i_permutation(plane, field.height(), field.width(), config.permutations, rng)
            : morans_i(plane, field.height(), field.width());
    r.morans_i = moran.index;
    r.morans_p = moran.p_value;
  } catch (const DegenerateInputError&) {
    r.morans_i = 0.0;
    r.morans_p = 0.0;
  }
  const KsResult ks = ks_test(plane, config.ks_sample_size, rng, r.channel);
  r.ks_stat = ks.statistic;
  r.ks_p = ks.p_value;

  const double mean_tol =
      config.mean_tolerance.value_or(4.0 / std::sqrt(static_cast<double>(plane.size())));
  r.moran_pass = r.morans_p > config.moran_alpha;
  r.ks_pass = r.ks_p > config.ks_alpha;
  r.moments_pass =
      std::abs(r.variance - 1.0) < config.variance_tolerance && std::abs(r.mean) < mean_tol;
  r.pass = r.moran_pass && r.ks_pass && r.moments_pass;
  return r;
}

BatteryResult gaussianity_battery(const NoiseSequence& seq, const BatteryConfig& config) {
  BatteryResult result;
  std::size_t moran = 0, ks = 0, moments = 0, joint = 0;
  for (std::size_t t = 0; t < seq.size(); ++t) {
    for (int c = 0; c < seq.channels(); ++c) {
      GaussianityReport r = frame_report(seq.frame(t), c, static_cast<std::uint32_t>(t), config);
      moran += r.moran_pass;
      ks += r.ks_pass;
      moments += r.moments_pass;
      joint += r.pass;
      result.reports.push_back(r);
    }
  }
  const double total = static_cast<double>(result.reports.size());
  result.moran_pass_rate = moran / total;
  result.ks_pass_rate = ks / total;
  result.moments_pass_rate = moments / total;
  result.joint_pass_rate = joint / total;
  result.pass = result.moran_pass_rate >= config.quota && result.ks_pass_rate >= config.quota &&
                result.moments_pass_rate >= config.quota;
  return result;
}

std::string report_to_json(const GaussianityReport& report) { return report_json(report).dump(); }

GaussianityReport report_from_json(const std::string& line) {
  const json j = json::parse(line);
  GaussianityReport r;
  r.frame = j.at("frame").get<std::uint32_t>();
  r.channel = j.at("channel").get<std::uint32_t>();
  r.morans_i = j.at("morans_i").get<double>();
  r.morans_p = j.at("morans_p").get<double>();
  r.ks_stat = j.at("ks_stat").get<double>();
  r.ks_p = j.at("ks_p").get<double>();
  r.mean = j.at("mean").get<double>();
  r.variance = j.at("variance").get<double>();
  r.n_pixels = j.at("n_pixels").get<std::uint64_t>();
  r.moran_pass = j.at("moran_pass").get<bool>();
  r.ks_pass = j.at("ks_pass").get<bool>();
  r.moments_pass = j.at("moments_pass").get<bool>();
  r.pass = j.at("pass").get<bool>();
  return r;
}

std::string battery_to_jsonl(const BatteryResult& result) {
  std::string out;
  for (const auto& r : result.reports) out += report_to_json(r) + "\n";
  const json summary{{"summary", true},
                     {"reports", result.reports.size()},
                     {"moran_pass_rate", result.moran_pass_rate},
                     {"ks_pass_rate", result.ks_pass_rate},
                     {"moments_pass_rate", result.moments_pass_rate},
                     {"joint_pass_rate", result.joint_pass_rate},
                     {"pass", result.pass}};
  out += summary.dump() + "\n";
  return out;
}

std::string battery_to_table(const BatteryResult& result) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%6s %3s %10s %8s %8s %8s %9s %9s %5s\n", "frame", "ch",
                "moran_i", "moran_p", "ks_stat", "ks_p", "mean", "var", "pass");
  out << line;
  for (const auto& r : result.reports) {
    std::snprintf(line, sizeof line, "%6u %3u %10.5f %8.4f %8.4f %8.4f %9.5f %9.5f %5s\n", r.frame,
                  r.channel, r.morans_i, r.morans_p, r.ks_stat, r.ks_p, r.mean, r.variance,
                  r.pass ? "yes" : "no");
    out << line;
  }
  std::snprintf(line, sizeof line,
                "pass rates: moran %.3f  ks %.3f  moments %.3f  joint %.3f  -> %s\n",
                result.moran_pass_rate, result.ks_pass_rate, result.moments_pass_rate,
                result.joint_pass_rate, result.pass ? "PASS" : "FAIL");
  out << line;
  return out.str();
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) return 0.0;
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

double temporal_tracking_score(const NoiseSequence& seq, std::span<const FlowField> flows) {
  if (flows.size() + 1 != seq.size()) {
    throw std::invalid_argument("temporal_tracking_score: need exactly one flow per frame pair");
  }
  const int h = seq.height(), w = seq.width();
  double total = 0.0;
  std::size_t pairs = 0;
  std::vector<double> prev_values, next_values;
  for (std::size_t t = 0; t < flows.size(); ++t) {
    const FlowField& flow = flows[t];
    if (flow.height() != h || flow.width() != w) {
      throw std::invalid_argument("temporal_tracking_score: flow dimensions differ from noise");
    }
    prev_values.clear();
    next_values.clear();
    const NoiseField& prev = seq.frame(t);
    const NoiseField& next = seq.frame(t + 1);
    for (int c = 0; c < seq.channels(); ++c) {
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          const double tx = x + std::round(static_cast<double>(flow.dx_at(y, x)));
          const double ty = y + std::round(static_cast<double>(flow.dy_at(y, x)));
          if (tx < 0 || ty < 0 || tx > w - 1 || ty > h - 1) continue;
          prev_values.push_back(prev.at(c, y, x));
          next_values.push_back(next.at(c, static_cast<int>(ty), static_cast<int>(tx)));
        }
      }
    }
    if (prev_values.size() < 2) continue;
    total += pearson(prev_values, next_values);
    ++pairs;
  }
  return pairs == 0 ? 0.0 : total / static_cast<double>(pairs);
}

}  // namespace noisewarp
