#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "noisewarp/fields.hpp"
#include "noisewarp/rng.hpp"

namespace noisewarp {

enum class EdgeKind : std::uint8_t { kContraction, kExpansion };

struct TransferEdge {
  std::uint32_t source;
  std::uint32_t target;
  EdgeKind kind;
  // Position of this edge among the source pixel's split values.
  std::uint32_t slot;

  friend bool operator==(const TransferEdge&, const TransferEdge&) = default;
};

// Bipartite transfer graph between previous-frame pixels (sources) and
// next-frame pixels (targets), both indexed row-major.
//
// Every source has at most one contraction edge (along the forward flow)
// and every target at most one expansion edge (pulled back along the
// backward flow, only when the target received no contraction edge), so
// edge_count() <= 2 * H * W.
class TransferGraph {
 public:
  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t pixel_count() const { return degree_.size(); }

  std::uint32_t out_degree(std::size_t source) const { return degree_[source]; }
  std::optional<std::uint32_t> contraction_target(std::size_t source) const;
  std::optional<std::uint32_t> expansion_source(std::size_t target) const;
  // Contraction sources of `target` in row-major order.
  std::span<const std::uint32_t> contraction_sources(std::size_t target) const;
  std::vector<TransferEdge> in_edges(std::size_t target) const;
  std::vector<TransferEdge> out_edges(std::size_t source) const;
  bool is_orphan(std::size_t target) const;

  std::size_t edge_count() const { return contraction_edges_ + expansion_edges_; }
  std::size_t contraction_edge_count() const { return contraction_edges_; }
  std::size_t expansion_edge_count() const { return expansion_edges_; }
  std::size_t orphan_count() const { return orphans_; }

  // Offset of `source`'s first split value in a flat buffer of all edges.
  std::uint32_t split_offset(std::size_t source) const { return split_offsets_[source]; }
  std::uint32_t expansion_slot(std::size_t target) const { return expansion_slot_[target]; }

 private:
  friend TransferGraph build_transfer_graph(const FlowField& forward, const FlowField& backward);

  int height_ = 0;
  int width_ = 0;
  std::vector<std::int32_t> contraction_target_;
  std::vector<std::int32_t> expansion_source_;
  std::vector<std::uint32_t> expansion_slot_;
  std::vector<std::uint32_t> degree_;
  std::vector<std::uint32_t> in_offsets_;
  std::vector<std::uint32_t> in_sources_;
  std::vector<std::uint32_t> split_offsets_;
  std::size_t contraction_edges_ = 0;
  std::size_t expansion_edges_ = 0;
  std::size_t orphans_ = 0;
};

// Builds the transfer graph. Displacements are rounded with quantize_flow's
// rule, so already-integer flows are used as is.
TransferGraph build_transfer_graph(const FlowField& forward, const FlowField& backward);

// Conditional white-noise sampling: splits `value` into standard_normals.size()
// parts X_i = value/d + (Z_i - S/d)/sqrt(d) where S = sum Z. The parts sum to
// `value`; if value ~ N(0,1) each part is N(0, 1/d) and they are independent.
std::vector<float> split_gaussian(float value, std::span<const double> standard_normals);

// Same, drawing Z_i from the split sub-stream at (channel, pixel, draw = i).
std::vector<float> split_gaussian(float value, std::uint32_t count, const RngStream& rng,
                                  std::uint32_t channel, std::uint32_t pixel);

struct WarpResult {
  NoiseField noise;
  DensityField density;
};

// One next-frame warp step. `rng` supplies the frame coordinate for all draws
// made during this step.
WarpResult warp_next_frame(const NoiseField& prev_noise, const DensityField& prev_density,
                           const FlowField& forward, const FlowField& backward,
                           const RngStream& rng);

// Variant that reuses a prebuilt graph.
WarpResult warp_next_frame(const NoiseField& prev_noise, const DensityField& prev_density,
                           const TransferGraph& graph, const RngStream& rng);

// Negated forward flow, a cheap stand-in for a true backward flow.
FlowField derive_backward_flow(const FlowField& forward);

struct FlowPair {
  FlowField forward;
  // Defaults to derive_backward_flow(forward) when absent.
  std::optional<FlowField> backward;
};

enum class ResolutionPolicy {
  // Flows must match the noise dimensions exactly.
  kStrict,
  // Flows of other sizes are resized to the noise grid with resize_flow.
  kResizeFlow,
};

// Streaming warper: holds only the current frame's noise and density.
class NoiseWarper {
 public:
  // Frame 0 is `init`; step k produces frame k using rng.at_frame(rng.frame() + k).
  NoiseWarper(NoiseField init, RngStream rng,
              ResolutionPolicy policy = ResolutionPolicy::kStrict);

  const NoiseField& noise() const { return noise_; }
  const DensityField& density() const { return density_; }
  std::uint32_t frame() const { return frame_; }

  const NoiseField& step(const FlowField& forward);
  const NoiseField& step(const FlowField& forward, const FlowField& backward);
  const NoiseField& step(const FlowPair& flows);

 private:
  FlowField conform(const FlowField& flow) const;

  NoiseField noise_;
  DensityField density_;
  RngStream rng_;
  ResolutionPolicy policy_;
  std::uint32_t frame_ = 0;
};

// Runs the warper over `flows`, handing each frame (including frame 0) to
// `sink` as soon as it is produced.
void warp_sequence(const NoiseField& init, std::span<const FlowPair> flows, const RngStream& rng,
                   ResolutionPolicy policy,
                   const std::function<void(std::size_t, const NoiseField&)>& sink);

// Collects 1 + flows.size() frames.
std::vector<NoiseField> warp_sequence(const NoiseField& init, std::span<const FlowPair> flows,
                                      const RngStream& rng,
                                      ResolutionPolicy policy = ResolutionPolicy::kStrict);

}  // namespace noisewarp
