#include <gtest/gtest.h>

#include "noisewarp/bench.hpp"
#include "noisewarp/flow_synth.hpp"
#include "noisewarp/pipeline.hpp"
#include "noisewarp/sequence.hpp"

namespace nw = noisewarp;

namespace {

std::vector<nw::FlowPair> zoom_pairs(int n, int frames) {
  std::vector<nw::FlowPair> flows;
  for (const auto& f : nw::camera_flow(nw::CameraMotion::kZoom, 1.05, n, n, frames)) {
    flows.push_back({f, std::nullopt});
  }
  return flows;
}

}  // namespace

TEST(Pipeline, ShapesAndDeterminism) {
  const auto flows = zoom_pairs(32, 9);
  nw::PipelineOptions opt;
  opt.seed = 4;
  opt.gamma = 0.4;
  opt.spatial_down = 8;
  opt.temporal_down = 4;
  opt.channels = 3;
  std::size_t calls = 0;
  const auto seq = nw::run_warp_pipeline(flows, 32, 32, opt, [&](std::size_t, double ms) {
    ++calls;
    EXPECT_GE(ms, 0.0);
  });
  EXPECT_EQ(calls, 8u);
  EXPECT_EQ(seq.size(), 3u);
  EXPECT_EQ(seq.height(), 4);
  EXPECT_EQ(seq.channels(), 3);
  EXPECT_EQ(seq.seed(), 4u);
  EXPECT_EQ(seq, nw::run_warp_pipeline(flows, 32, 32, opt));
}

TEST(Pipeline, ValidatesBeforeWork) {
  nw::PipelineOptions opt;
  opt.spatial_down = 3;
  EXPECT_THROW(nw::validate_pipeline(32, 32, opt), std::invalid_argument);
  opt.spatial_down = 1;
  opt.gamma = -0.1;
  EXPECT_THROW(nw::validate_pipeline(32, 32, opt), std::invalid_argument);
  opt.gamma = 0.0;
  opt.channels = 0;
  EXPECT_THROW(nw::validate_pipeline(32, 32, opt), std::invalid_argument);
}

TEST(Sequence, RejectsMixedOrEmpty) {
  EXPECT_THROW(nw::NoiseSequence({}), std::invalid_argument);
  EXPECT_THROW(nw::NoiseSequence({nw::sample_white_noise(4, 4, 1, 0), nw::sample_white_noise(4, 5, 1, 0)}),
               std::invalid_argument);
  const nw::NoiseSequence s({nw::sample_white_noise(4, 4, 1, 0)}, 3, {"a"});
  EXPECT_EQ(s.tagged("b").provenance(), (std::vector<std::string>{"a", "b"}));
}

TEST(Bench, SlopeAndMedian) {
  const std::vector<double> x = {1, 2, 4, 8}, y = {3, 6, 12, 24};
  EXPECT_NEAR(nw::loglog_slope(x, y), 1.0, 1e-12);
  const std::vector<double> y2 = {1, 4, 16, 64};
  EXPECT_NEAR(nw::loglog_slope(x, y2), 2.0, 1e-12);
  EXPECT_DOUBLE_EQ(nw::median({5, 1, 3}), 3.0);
  EXPECT_DOUBLE_EQ(nw::median({4, 1, 3, 2}), 2.5);
}

TEST(Bench, SmallRunReports) {
  nw::BenchmarkConfig cfg;
  cfg.sizes = {32, 64};
  cfg.frames = 3;
  cfg.warmup = 1;
  const auto report = nw::run_warp_benchmark(cfg);
  ASSERT_EQ(report.samples.size(), 2u);
  EXPECT_EQ(report.samples[1].pixels, 4096u);
  EXPECT_LE(report.samples[0].min_ms, report.samples[0].median_ms);
  EXPECT_NE(report.machine_json.find('{'), std::string::npos);
  const std::string jsonl = nw::benchmark_to_jsonl(report, cfg);
  EXPECT_EQ(std::count(jsonl.begin(), jsonl.end(), '\n'), 3);
}
