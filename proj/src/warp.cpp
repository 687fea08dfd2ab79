#include "noisewarp/warp.hpp"

#include <cassert>
#include <cfloat>
#include <cmath>
#include <stdexcept>
#include <string>

namespace noisewarp {
namespace {

// Accumulated variance below this is treated as the empty-edge case.
constexpr double kMinVariance = DBL_MIN;

void require_same_dims(int h0, int w0, int h1, int w1, const char* what) {
  if (h0 != h1 || w0 != w1) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch " + std::to_string(h0) +
                                "x" + std::to_string(w0) + " vs " + std::to_string(h1) + "x" +
                                std::to_string(w1));
  }
}

// Row-major index of pos + round(displacement), or -1 when it leaves the frame.
inline std::int64_t displaced_index(int x, int y, float dx, float dy, int width, int height) {
  const double tx = x + std::round(static_cast<double>(dx));
  const double ty = y + std::round(static_cast<double>(dy));
  if (tx < 0.0 || ty < 0.0 || tx > width - 1 || ty > height - 1) return -1;
  return static_cast<std::int64_t>(ty) * width + static_cast<std::int64_t>(tx);
}

// Writes X_i = value/d + (Z_i - S/d)/sqrt(d) for i < d into `out`.
void combine_split(float value, std::span<const double> z, float* out) {
  const double d = static_cast<double>(z.size());
  double sum = 0.0;
  for (double zi : z) sum += zi;
  const double mean = sum / d;
  const double inv_sqrt_d = 1.0 / std::sqrt(d);
  for (std::size_t i = 0; i < z.size(); ++i) {
    out[i] = static_cast<float>(value / d + inv_sqrt_d * (z[i] - mean));
  }
}

void split_into(float value, std::uint32_t count, const RngStream& rng, std::uint32_t channel,
                std::uint32_t pixel, std::vector<double>& scratch, float* out) {
  scratch.resize(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    scratch[i] = rng.normal(StreamPurpose::kSplit, channel, pixel, i);
  }
  combine_split(value, scratch, out);
}

}  // namespace

std::optional<std::uint32_t> TransferGraph::contraction_target(std::size_t source) const {
  const std::int32_t t = contraction_target_[source];
  if (t < 0) return std::nullopt;
  return static_cast<std::uint32_t>(t);
}

std::optional<std::uint32_t> TransferGraph::expansion_source(std::size_t target) const {
  const std::int32_t s = expansion_source_[target];
  if (s < 0) return std::nullopt;
  return static_cast<std::uint32_t>(s);
}

std::span<const std::uint32_t> TransferGraph::contraction_sources(std::size_t target) const {
  return std::span<const std::uint32_t>(in_sources_)
      .subspan(in_offsets_[target], in_offsets_[target + 1] - in_offsets_[target]);
}

std::vector<TransferEdge> TransferGraph::in_edges(std::size_t target) const {
  std::vector<TransferEdge> edges;
  const auto t = static_cast<std::uint32_t>(target);
  for (std::uint32_t s : contraction_sources(target)) {
    edges.push_back({s, t, EdgeKind::kContraction, 0});
  }
  if (auto s = expansion_source(target)) {
    edges.push_back({*s, t, EdgeKind::kExpansion, expansion_slot_[target]});
  }
  return edges;
}

std::vector<TransferEdge> TransferGraph::out_edges(std::size_t source) const {
  std::vector<TransferEdge> edges;
  const auto s = static_cast<std::uint32_t>(source);
  if (auto t = contraction_target(source)) edges.push_back({s, *t, EdgeKind::kContraction, 0});
  if (degree_[source] > edges.size()) {
    for (std::size_t t = 0; t < pixel_count(); ++t) {
      if (expansion_source_[t] == static_cast<std::int32_t>(source)) {
        edges.push_back({s, static_cast<std::uint32_t>(t), EdgeKind::kExpansion, expansion_slot_[t]});
      }
    }
  }
  return edges;
}

bool TransferGraph::is_orphan(std::size_t target) const {
  return in_offsets_[target] == in_offsets_[target + 1] && expansion_source_[target] < 0;
}

TransferGraph build_transfer_graph(const FlowField& forward, const FlowField& backward) {
  require_same_dims(forward.height(), forward.width(), backward.height(), backward.width(),
                    "build_transfer_graph");
  const int height = forward.height();
  const int width = forward.width();
  const std::size_t n = forward.pixel_count();

  TransferGraph g;
  g.height_ = height;
  g.width_ = width;
  g.contraction_target_.assign(n, -1);
  g.degree_.assign(n, 0);
  g.in_offsets_.assign(n + 1, 0);

  const auto fdx = forward.dx();
  const auto fdy = forward.dy();
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::size_t v = static_cast<std::size_t>(y) * width + x;
      const std::int64_t t = displaced_index(x, y, fdx[v], fdy[v], width, height);
      if (t < 0) continue;
      g.contraction_target_[v] = static_cast<std::int32_t>(t);
      g.degree_[v] = 1;
      ++g.in_offsets_[t + 1];
      ++g.contraction_edges_;
    }
  }
  for (std::size_t t = 0; t < n; ++t) g.in_offsets_[t + 1] += g.in_offsets_[t];
  g.in_sources_.resize(g.contraction_edges_);
  {
    std::vector<std::uint32_t> cursor(g.in_offsets_.begin(), g.in_offsets_.end() - 1);
    for (std::size_t v = 0; v < n; ++v) {
      const std::int32_t t = g.contraction_target_[v];
      if (t >= 0) g.in_sources_[cursor[t]++] = static_cast<std::uint32_t>(v);
    }
  }

  g.expansion_source_.assign(n, -1);
  g.expansion_slot_.assign(n, 0);
  const auto bdx = backward.dx();
  const auto bdy = backward.dy();
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::size_t t = static_cast<std::size_t>(y) * width + x;
      if (g.in_offsets_[t] != g.in_offsets_[t + 1]) continue;
      const std::int64_t s = displaced_index(x, y, bdx[t], bdy[t], width, height);
      if (s < 0) {
        ++g.orphans_;
        continue;
      }
      g.expansion_source_[t] = static_cast<std::int32_t>(s);
      g.expansion_slot_[t] = g.degree_[s]++;
      ++g.expansion_edges_;
    }
  }

  g.split_offsets_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) g.split_offsets_[v + 1] = g.split_offsets_[v] + g.degree_[v];
  assert(g.edge_count() <= 2 * n);
  return g;
}

std::vector<float> split_gaussian(float value, std::span<const double> standard_normals) {
  if (standard_normals.empty()) throw std::invalid_argument("split_gaussian: count must be >= 1");
  std::vector<float> out(standard_normals.size());
  combine_split(value, standard_normals, out.data());
  return out;
}

std::vector<float> split_gaussian(float value, std::uint32_t count, const RngStream& rng,
                                  std::uint32_t channel, std::uint32_t pixel) {
  if (count == 0) throw std::invalid_argument("split_gaussian: count must be >= 1");
  std::vector<float> out(count);
  if (count == 1) {
    out[0] = value;
    return out;
  }
  std::vector<double> scratch;
  split_into(value, count, rng, channel, pixel, scratch, out.data());
  return out;
}

WarpResult warp_next_frame(const NoiseField& prev_noise, const DensityField& prev_density,
                           const TransferGraph& graph, const RngStream& rng) {
  require_same_dims(prev_noise.height(), prev_noise.width(), graph.height(), graph.width(),
                    "warp_next_frame noise/flow");
  require_same_dims(prev_density.height(), prev_density.width(), graph.height(), graph.width(),
                    "warp_next_frame density/flow");

  const std::size_t n = graph.pixel_count();
  const int channels = prev_noise.channels();
  const std::size_t total_edges = graph.split_offset(n);
  const auto q = prev_noise.values();
  const auto p = prev_density.values();

  // R(v) for every source with more than one edge; single-edge sources pass
  // their value through unchanged, so they are read straight from q.
  std::vector<float> split(total_edges * static_cast<std::size_t>(channels));
  std::vector<double> scratch;
  for (std::size_t v = 0; v < n; ++v) {
    const std::uint32_t d = graph.out_degree(v);
    if (d < 2) continue;
    for (int c = 0; c < channels; ++c) {
      const std::size_t base = static_cast<std::size_t>(c) * total_edges + graph.split_offset(v);
      split_into(q[static_cast<std::size_t>(c) * n + v], d, rng, static_cast<std::uint32_t>(c),
                 static_cast<std::uint32_t>(v), scratch, split.data() + base);
    }
  }
  auto part = [&](int c, std::size_t source, std::uint32_t slot) -> double {
    if (graph.out_degree(source) == 1) return q[static_cast<std::size_t>(c) * n + source];
    return split[static_cast<std::size_t>(c) * total_edges + graph.split_offset(source) + slot];
  };

  std::vector<float> out_noise(n * static_cast<std::size_t>(channels));
  std::vector<double> out_density(n);
  for (std::size_t t = 0; t < n; ++t) {
    double mass = 0.0;
    double variance = 0.0;
    bool orphan = true;
    if (auto source = graph.expansion_source(t)) {
      const double d = graph.out_degree(*source);
      const double alpha = p[*source] / d;
      mass = alpha;
      variance = alpha * alpha / d;
      if (variance >= kMinVariance) {
        orphan = false;
        const double norm = std::sqrt(variance);
        const std::uint32_t slot = graph.expansion_slot(t);
        for (int c = 0; c < channels; ++c) {
          out_noise[static_cast<std::size_t>(c) * n + t] =
              static_cast<float>(alpha * part(c, *source, slot) / norm);
        }
      }
    } else {
      const auto sources = graph.contraction_sources(t);
      for (std::uint32_t s : sources) {
        const double d = graph.out_degree(s);
        const double alpha = p[s] / d;
        mass += alpha;
        variance += alpha * alpha / d;
      }
      if (!sources.empty() && variance >= kMinVariance) {
        orphan = false;
        const double norm = std::sqrt(variance);
        for (int c = 0; c < channels; ++c) {
          double acc = 0.0;
          for (std::uint32_t s : sources) acc += p[s] / graph.out_degree(s) * part(c, s, 0);
          out_noise[static_cast<std::size_t>(c) * n + t] = static_cast<float>(acc / norm);
        }
      }
    }
    if (orphan) {
      mass = 1.0;
      for (int c = 0; c < channels; ++c) {
        out_noise[static_cast<std::size_t>(c) * n + t] = static_cast<float>(
            rng.normal(StreamPurpose::kOrphan, static_cast<std::uint32_t>(c),
                       static_cast<std::uint32_t>(t), 0));
      }
    }
    out_density[t] = mass;
  }

  return {NoiseField(graph.height(), graph.width(), channels, std::move(out_noise)),
          DensityField(graph.height(), graph.width(), std::move(out_density))};
}

WarpResult warp_next_frame(const NoiseField& prev_noise, const DensityField& prev_density,
                           const FlowField& forward, const FlowField& backward,
                           const RngStream& rng) {
  require_same_dims(prev_noise.height(), prev_noise.width(), forward.height(), forward.width(),
                    "warp_next_frame noise/flow");
  return warp_next_frame(prev_noise, prev_density, build_transfer_graph(forward, backward), rng);
}

FlowField derive_backward_flow(const FlowField& forward) {
  std::vector<float> dx(forward.dx().begin(), forward.dx().end());
  std::vector<float> dy(forward.dy().begin(), forward.dy().end());
  for (float& v : dx) v = -v;
  for (float& v : dy) v = -v;
  return FlowField(forward.height(), forward.width(), std::move(dx), std::move(dy));
}

NoiseWarper::NoiseWarper(NoiseField init, RngStream rng, ResolutionPolicy policy)
    : noise_(std::move(init)),
      density_(DensityField::ones(noise_.height(), noise_.width())),
      rng_(rng),
      policy_(policy) {}

FlowField NoiseWarper::conform(const FlowField& flow) const {
  if (flow.height() == noise_.height() && flow.width() == noise_.width()) return flow;
  if (policy_ == ResolutionPolicy::kStrict) {
    require_same_dims(noise_.height(), noise_.width(), flow.height(), flow.width(),
                      "NoiseWarper::step");
  }
  return resize_flow(flow, noise_.height(), noise_.width());
}

const NoiseField& NoiseWarper::step(const FlowField& forward) {
  const FlowField fwd = conform(forward);
  return step(fwd, derive_backward_flow(fwd));
}

const NoiseField& NoiseWarper::step(const FlowField& forward, const FlowField& backward) {
  const TransferGraph graph = build_transfer_graph(conform(forward), conform(backward));
  WarpResult next =
      warp_next_frame(noise_, density_, graph, rng_.at_frame(rng_.frame() + frame_ + 1));
  noise_ = std::move(next.noise);
  density_ = std::move(next.density);
  ++frame_;
  return noise_;
}

const NoiseField& NoiseWarper::step(const FlowPair& flows) {
  if (flows.backward) return step(flows.forward, *flows.backward);
  return step(flows.forward);
}

void warp_sequence(const NoiseField& init, std::span<const FlowPair> flows, const RngStream& rng,
                   ResolutionPolicy policy,
                   const std::function<void(std::size_t, const NoiseField&)>& sink) {
  NoiseWarper warper(init, rng, policy);
  sink(0, warper.noise());
  for (std::size_t i = 0; i < flows.size(); ++i) sink(i + 1, warper.step(flows[i]));
}

std::vector<NoiseField> warp_sequence(const NoiseField& init, std::span<const FlowPair> flows,
                                      const RngStream& rng, ResolutionPolicy policy) {
  std::vector<NoiseField> frames;
  frames.reserve(flows.size() + 1);
  warp_sequence(init, flows, rng, policy,
                [&](std::size_t, const NoiseField& frame) { frames.push_back(frame); });
  return frames;
}

}  // namespace noisewarp
