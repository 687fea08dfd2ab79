#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "noisewarp/flow_synth.hpp"
#include "noisewarp/stats.hpp"
#include "noisewarp/warp.hpp"

namespace nw = noisewarp;

namespace {

std::vector<nw::Transform> linear_track(int frames, double vx, double vy, double rot = 0.0,
                                        double scale_rate = 0.0) {
  std::vector<nw::Transform> track;
  for (int t = 0; t < frames; ++t) track.push_back({vx * t, vy * t, rot * t, 1.0 + scale_rate * t});
  return track;
}

std::vector<nw::Point> rect(double x0, double y0, double x1, double y1) {
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

}  // namespace

TEST(SceneFlows, FullCanvasTranslation) {
  nw::SceneSpec s{16, 20, 4, {}, std::nullopt};
  s.layers.push_back({rect(-100, -100, 200, 200), linear_track(4, 2.0, 0.0)});
  const auto flows = nw::render_scene_flows(s);
  ASSERT_EQ(flows.size(), 3u);
  for (const auto& f : flows) {
    for (std::size_t i = 0; i < f.pixel_count(); ++i) {
      ASSERT_NEAR(f.dx()[i], 2.0f, 1e-5);
      ASSERT_NEAR(f.dy()[i], 0.0f, 1e-5);
    }
  }
}

TEST(SceneFlows, EmptySceneIsZero) {
  nw::SceneSpec s{8, 8, 3, {}, std::nullopt};
  for (const auto& f : nw::render_scene_flows(s)) EXPECT_EQ(f, nw::FlowField::zeros(8, 8));
  s.background = linear_track(3, 0.0, 0.0);
  for (const auto& f : nw::render_scene_flows(s)) EXPECT_EQ(f, nw::FlowField::zeros(8, 8));
}

TEST(SceneFlows, RotatingSquareMatchesAnalyticTracker) {
  const double theta = std::numbers::pi / 90.0;
  nw::SceneSpec s{64, 64, 2, {}, std::nullopt};
  s.layers.push_back({rect(12, 12, 52, 52), linear_track(2, 0.0, 0.0, theta)});
  const auto f = nw::render_scene_flows(s)[0];
  const nw::Point c{32.0, 32.0};
  EXPECT_NEAR(f.dx_at(32, 32), 0.0f, 1e-6);
  EXPECT_NEAR(f.dy_at(32, 32), 0.0f, 1e-6);
  for (int y = 13; y < 52; y += 3) {
    for (int x = 13; x < 52; x += 3) {
      const double rx = x - c.x, ry = y - c.y;
      const double ex = std::cos(theta) * rx - std::sin(theta) * ry - rx;
      const double ey = std::sin(theta) * rx + std::cos(theta) * ry - ry;
      const double err = std::hypot(f.dx_at(y, x) - ex, f.dy_at(y, x) - ey);
      const double mag = std::hypot(ex, ey);
      if (mag > 0.1) ASSERT_LE(err, 0.05 * mag) << x << "," << y;
    }
  }
  // Near a vertex the magnitude is |v - c| * theta.
  const double corner = std::hypot(f.dx_at(13, 13), f.dy_at(13, 13));
  EXPECT_NEAR(corner, std::hypot(19.0, 19.0) * theta, 0.05 * std::hypot(19.0, 19.0) * theta);
  // Outside the layer there is no motion.
  EXPECT_EQ(f.dx_at(2, 2), 0.0f);
}

TEST(SceneFlows, TopLayerOccludes) {
  nw::SceneSpec s{32, 32, 2, {}, linear_track(2, -1.0, 0.0)};
  s.layers.push_back({rect(4, 4, 28, 28), linear_track(2, 3.0, 0.0)});
  s.layers.push_back({rect(10, 10, 20, 20), linear_track(2, 0.0, 2.0)});
  const auto f = nw::render_scene_flows(s)[0];
  EXPECT_NEAR(f.dx_at(15, 15), 0.0f, 1e-5);
  EXPECT_NEAR(f.dy_at(15, 15), 2.0f, 1e-5);
  EXPECT_NEAR(f.dx_at(6, 6), 3.0f, 1e-5);
  EXPECT_NEAR(f.dx_at(1, 1), -1.0f, 1e-5);
}

TEST(SceneFlows, LayerFollowsItsTrack) {
  // Frame 1 to 2 of a layer moving 4 px/frame: the content at frame 1 sits
  // 4 px right of where it started.
  nw::SceneSpec s{32, 32, 3, {}, std::nullopt};
  s.layers.push_back({rect(2, 2, 10, 10), linear_track(3, 4.0, 0.0)});
  const auto flows = nw::render_scene_flows(s);
  EXPECT_NEAR(flows[1].dx_at(5, 12), 4.0f, 1e-5);
  EXPECT_EQ(flows[1].dx_at(5, 3), 0.0f);
}

TEST(SceneSpec, RejectsInvalidInput) {
  nw::SceneSpec bowtie{16, 16, 2, {}, std::nullopt};
  bowtie.layers.push_back({{{0, 0}, {8, 8}, {8, 0}, {0, 8}}, linear_track(2, 0, 0)});
  EXPECT_THROW(nw::render_scene_flows(bowtie), std::invalid_argument);

  nw::SceneSpec two_vertices{16, 16, 2, {}, std::nullopt};
  two_vertices.layers.push_back({{{0, 0}, {8, 8}}, linear_track(2, 0, 0)});
  EXPECT_THROW(two_vertices.validate(), std::invalid_argument);

  nw::SceneSpec short_track{16, 16, 3, {}, std::nullopt};
  short_track.layers.push_back({rect(1, 1, 5, 5), linear_track(2, 0, 0)});
  EXPECT_THROW(short_track.validate(), std::invalid_argument);

  nw::SceneSpec zero_scale{16, 16, 2, {}, std::nullopt};
  zero_scale.layers.push_back({rect(1, 1, 5, 5), {{0, 0, 0, 1}, {0, 0, 0, 0}}});
  EXPECT_THROW(zero_scale.validate(), std::invalid_argument);

  EXPECT_THROW((nw::SceneSpec{0, 16, 2, {}, std::nullopt}.validate()), std::invalid_argument);
  EXPECT_THROW((nw::SceneSpec{16, 16, 1, {}, std::nullopt}.validate()), std::invalid_argument);
}

TEST(Geometry, Basics) {
  const auto sq = rect(0, 0, 4, 2);
  const auto c = nw::polygon_centroid(sq);
  EXPECT_DOUBLE_EQ(c.x, 2.0);
  EXPECT_DOUBLE_EQ(c.y, 1.0);
  EXPECT_TRUE(nw::polygon_is_simple(sq));
  EXPECT_TRUE(nw::point_in_polygon(sq, {1, 1}));
  EXPECT_FALSE(nw::point_in_polygon(sq, {5, 1}));
  const nw::Transform t{1.5, -2.0, 0.3, 1.7};
  const nw::Point p{3.0, 4.0}, pivot{1.0, 1.0};
  const auto back = t.invert(t.apply(p, pivot), pivot);
  EXPECT_NEAR(back.x, p.x, 1e-12);
  EXPECT_NEAR(back.y, p.y, 1e-12);
}

TEST(CameraFlow, PanAndZoomAndRotate) {
  EXPECT_EQ(nw::camera_flow(nw::CameraMotion::kPan, 0.0, 8, 8, 3)[0], nw::FlowField::zeros(8, 8));
  EXPECT_EQ(nw::camera_flow(nw::CameraMotion::kZoom, 1.0, 8, 8, 3)[0], nw::FlowField::zeros(8, 8));
  EXPECT_EQ(nw::camera_flow(nw::CameraMotion::kPan, 1.0, 8, 8, 5).size(), 4u);

  const auto zoom = nw::camera_flow(nw::CameraMotion::kZoom, 1.1, 41, 41, 2)[0];
  EXPECT_EQ(zoom.dx_at(20, 20), 0.0f);
  EXPECT_EQ(zoom.dy_at(20, 20), 0.0f);
  EXPECT_NEAR(zoom.dx_at(20, 30), 1.0f, 1e-6);
  EXPECT_NEAR(zoom.dy_at(20, 30), 0.0f, 1e-6);

  const auto pan = nw::camera_flow(nw::CameraMotion::kPan, 2.0, 4, 4, 2, std::numbers::pi / 2)[0];
  EXPECT_NEAR(pan.dx_at(0, 0), 0.0f, 1e-6);
  EXPECT_NEAR(pan.dy_at(0, 0), 2.0f, 1e-6);

  const auto rot = nw::camera_flow(nw::CameraMotion::kRotate, std::numbers::pi / 2, 5, 5, 2)[0];
  // (4, 2) is 2 px right of center; a quarter turn sends it to (2, 4).
  EXPECT_NEAR(rot.dx_at(2, 4), -2.0f, 1e-6);
  EXPECT_NEAR(rot.dy_at(2, 4), 2.0f, 1e-6);
}

TEST(CameraFlow, RejectsBadParameters) {
  EXPECT_THROW(nw::parse_camera_motion("dolly"), std::invalid_argument);
  EXPECT_EQ(nw::parse_camera_motion("zoom"), nw::CameraMotion::kZoom);
  EXPECT_EQ(nw::to_string(nw::CameraMotion::kRotate), "rotate");
  EXPECT_THROW(nw::camera_flow(nw::CameraMotion::kZoom, 0.0, 8, 8, 2), std::invalid_argument);
  EXPECT_THROW(nw::camera_flow(nw::CameraMotion::kZoom, -1.0, 8, 8, 2), std::invalid_argument);
  EXPECT_THROW(nw::camera_flow(nw::CameraMotion::kPan, NAN, 8, 8, 2), std::invalid_argument);
}

TEST(SceneJson, RoundTripIsStable) {
  nw::SceneSpec s{24, 32, 3, {}, linear_track(3, 0.5, 0.0)};
  s.layers.push_back({rect(2, 3, 12.5, 9), linear_track(3, 1.25, -0.5, 0.01, 0.02)});
  s.layers.push_back({{{4, 4}, {10, 6}, {6, 12}}, linear_track(3, 0.0, 1.0)});
  const std::string a = nw::scene_to_json(s);
  const std::string b = nw::scene_to_json(nw::scene_from_json(a));
  EXPECT_EQ(a, b);
  const auto flows_a = nw::render_scene_flows(s);
  const auto flows_b = nw::render_scene_flows(nw::scene_from_json(a));
  EXPECT_EQ(flows_a, flows_b);
}

TEST(SceneJson, DefaultsAndErrors) {
  const auto s = nw::scene_from_json(
      R"({"canvas":{"h":8,"w":8},"frames":2,"layers":[{"polygon":[[1,1],[6,1],[6,6]],"track":[{},{"tx":1}]}]})");
  EXPECT_EQ(s.layers[0].track[0].scale, 1.0);
  EXPECT_EQ(s.layers[0].track[1].tx, 1.0);
  EXPECT_FALSE(s.background.has_value());
  EXPECT_THROW(nw::scene_from_json("{not json"), std::invalid_argument);
  EXPECT_THROW(nw::scene_from_json(R"({"canvas":{"h":8},"frames":2})"), std::invalid_argument);
  EXPECT_THROW(nw::scene_from_json(R"({"canvas":{"h":8,"w":8},"frames":2,"layers":[{"polygon":[[1,1],[2]],"track":[{},{}]}]})"),
               std::invalid_argument);
}

TEST(SceneFlows, TwoLayerSceneWarpPassesBattery) {
  nw::SceneSpec s{64, 64, 13, {}, linear_track(13, 0.0, 0.0)};
  s.layers.push_back({rect(8, 8, 30, 40), linear_track(13, 1.6, 0.4, 0.02)});
  s.layers.push_back({{{40, 10}, {58, 20}, {44, 50}}, linear_track(13, -1.2, 0.9, 0.0, 0.015)});
  std::vector<nw::FlowPair> flows;
  for (const auto& f : nw::render_scene_flows(s)) flows.push_back({f, std::nullopt});
  std::vector<nw::NoiseField> frames;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto seq = nw::warp_sequence(nw::sample_white_noise(64, 64, 1, seed), flows, nw::RngStream(seed));
    frames.insert(frames.end(), seq.begin() + 1, seq.end());
  }
  EXPECT_TRUE(nw::gaussianity_battery(nw::NoiseSequence(frames)).pass);
}
