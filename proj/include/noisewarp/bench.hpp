#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "noisewarp/flow_synth.hpp"

namespace noisewarp {

struct BenchmarkConfig {
  std::vector<int> sizes = {256, 512, 1024, 2048};  // square frames
  int frames = 30;   // timed frames per size
  int warmup = 3;    // untimed frames before timing starts
  CameraMotion kind = CameraMotion::kZoom;
  double magnitude = 1.05;
  int channels = 1;
  std::uint64_t seed = 0;
};

struct BenchmarkSample {
  int size = 0;
  std::uint64_t pixels = 0;
  int frames = 0;
  double median_ms = 0.0;
  double min_ms = 0.0;
  double max_ms = 0.0;
  double total_ms = 0.0;
};

struct BenchmarkReport {
  std::vector<BenchmarkSample> samples;
  double loglog_slope = 0.0;
  std::string machine_json;  // JSON object
};

// Times warp steps (graph build + split + aggregation) on a fixed camera flow.
BenchmarkReport run_warp_benchmark(const BenchmarkConfig& config);
BenchmarkSample time_warp(int size, const BenchmarkConfig& config);

// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

double median(std::vector<double> values);

std::string machine_metadata_json();
// One JSON line per size followed by a summary line.
std::string benchmark_to_jsonl(const BenchmarkReport& report, const BenchmarkConfig& config);

}  // namespace noisewarp
