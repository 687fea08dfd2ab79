#include "noisewarp/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <thread>

#include <unistd.h>

#include <json.hpp>

#include "noisewarp/warp.hpp"

namespace noisewarp {
namespace {

using nlohmann::json;

std::string cpu_model() {
  std::ifstream in("/proc/cpuinfo");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) return line.substr(colon + 2);
    }
  }
  return "unknown";
}

}  // namespace

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  if (values.size() % 2 == 1) return values[mid];
  const double upper = values[mid];
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("loglog_slope needs at least two matching points");
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

BenchmarkSample time_warp(int size, const BenchmarkConfig& config) {
  if (size < 1 || config.frames < 1 || config.warmup < 0) {
    throw std::invalid_argument("benchmark sizes and frame counts must be positive");
  }
  const FlowField forward = camera_flow(config.kind, config.magnitude, size, size, 2).front();
  const FlowField backward = derive_backward_flow(forward);
  NoiseWarper warper(sample_white_noise(size, size, config.channels, RngStream(config.seed)),
                     RngStream(config.seed));
  for (int i = 0; i < config.warmup; ++i) warper.step(forward, backward);

  std::vector<double> times;
  times.reserve(config.frames);
  for (int i = 0; i < config.frames; ++i) {
    const auto start = std::chrono::steady_clock::now();
    warper.step(forward, backward);
    const auto stop = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
  }
  BenchmarkSample sample;
  sample.size = size;
  sample.pixels = static_cast<std::uint64_t>(size) * size;
  sample.frames = config.frames;
  sample.median_ms = median(times);
  sample.min_ms = *std::min_element(times.begin(), times.end());
  sample.max_ms = *std::max_element(times.begin(), times.end());
  for (double t : times) sample.total_ms += t;
  return sample;
}

BenchmarkReport run_warp_benchmark(const BenchmarkConfig& config) {
  BenchmarkReport report;
  std::vector<double> pixels, medians;
  for (int size : config.sizes) {
    report.samples.push_back(time_warp(size, config));
    pixels.push_back(static_cast<double>(report.samples.back().pixels));
    medians.push_back(report.samples.back().median_ms);
  }
  report.loglog_slope = pixels.size() >= 2 ? loglog_slope(pixels, medians) : 0.0;
  report.machine_json = machine_metadata_json();
  return report;
}

std::string machine_metadata_json() {
  char host[256] = {};
  gethostname(host, sizeof host - 1);
  json j{{"hostname", host},
         {"cpu", cpu_model()},
         {"hardware_threads", std::thread::hardware_concurrency()},
         {"threads_used", 1},
#if defined(__clang__)
         {"compiler", std::string("clang ") + __clang_version__},
#elif defined(__GNUC__)
         {"compiler", std::string("gcc ") + __VERSION__},
#endif
#ifdef NDEBUG
         {"build", "release"},
#else
         {"build", "debug"},
#endif
  };
  return j.dump();
}

std::string benchmark_to_jsonl(const BenchmarkReport& report, const BenchmarkConfig& config) {
  std::string out;
  for (const BenchmarkSample& s : report.samples) {
    out += json{{"size", s.size},           {"pixels", s.pixels},     {"frames", s.frames},
                {"median_ms", s.median_ms}, {"min_ms", s.min_ms},     {"max_ms", s.max_ms},
                {"total_ms", s.total_ms},   {"flow", to_string(config.kind)},
                {"magnitude", config.magnitude}}
               .dump() +
           "\n";
  }
  out += json{{"summary", true},
              {"loglog_slope", report.loglog_slope},
              {"warmup", config.warmup},
              {"machine", json::parse(report.machine_json)}}
             .dump() +
         "\n";
  return out;
}

}  // namespace noisewarp
