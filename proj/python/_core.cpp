#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "noisewarp/errors.hpp"
#include "noisewarp/flow_io.hpp"
#include "noisewarp/flow_synth.hpp"
#include "noisewarp/noise_post.hpp"
#include "noisewarp/stats.hpp"
#include "noisewarp/warp.hpp"

namespace py = pybind11;
namespace nw = noisewarp;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

// (C, H, W) array <-> NoiseField
nw::NoiseField to_field(const FloatArray& a) {
  if (a.ndim() != 3) throw std::invalid_argument("noise must have shape (C, H, W)");
  const auto c = static_cast<int>(a.shape(0)), h = static_cast<int>(a.shape(1)),
             w = static_cast<int>(a.shape(2));
  return nw::NoiseField(h, w, c, std::vector<float>(a.data(), a.data() + a.size()));
}

FloatArray from_field(const nw::NoiseField& f) {
  FloatArray out({f.channels(), f.height(), f.width()});
  std::memcpy(out.mutable_data(), f.values().data(), f.size() * sizeof(float));
  return out;
}

// (F, C, H, W) array <-> NoiseSequence
nw::NoiseSequence to_sequence(const FloatArray& a, std::uint64_t seed) {
  if (a.ndim() != 4) throw std::invalid_argument("sequence must have shape (F, C, H, W)");
  const std::size_t frame = a.size() / a.shape(0);
  std::vector<nw::NoiseField> frames;
  for (py::ssize_t t = 0; t < a.shape(0); ++t) {
    frames.emplace_back(static_cast<int>(a.shape(2)), static_cast<int>(a.shape(3)),
                        static_cast<int>(a.shape(1)),
                        std::vector<float>(a.data() + t * frame, a.data() + (t + 1) * frame));
  }
  return nw::NoiseSequence(std::move(frames), seed);
}

FloatArray from_sequence(const nw::NoiseSequence& s) {
  FloatArray out({static_cast<int>(s.size()), s.channels(), s.height(), s.width()});
  float* dst = out.mutable_data();
  for (const auto& f : s.frames()) {
    std::memcpy(dst, f.values().data(), f.size() * sizeof(float));
    dst += f.size();
  }
  return out;
}

// (2, H, W) array of (dx, dy) <-> FlowField
nw::FlowField to_flow(const float* p, int h, int w) {
  const std::size_t n = static_cast<std::size_t>(h) * w;
  return nw::FlowField(h, w, std::vector<float>(p, p + n), std::vector<float>(p + n, p + 2 * n));
}

std::vector<nw::FlowField> to_flows(const FloatArray& a) {
  if (a.ndim() != 4 || a.shape(1) != 2) throw std::invalid_argument("flows must have shape (T, 2, H, W)");
  const int h = static_cast<int>(a.shape(2)), w = static_cast<int>(a.shape(3));
  std::vector<nw::FlowField> flows;
  for (py::ssize_t t = 0; t < a.shape(0); ++t) flows.push_back(to_flow(a.data() + t * 2 * h * w, h, w));
  return flows;
}

FloatArray from_flows(const std::vector<nw::FlowField>& flows, int h, int w) {
  FloatArray out({static_cast<int>(flows.size()), 2, h, w});
  float* dst = out.mutable_data();
  for (const auto& f : flows) {
    std::memcpy(dst, f.dx().data(), f.pixel_count() * sizeof(float));
    std::memcpy(dst + f.pixel_count(), f.dy().data(), f.pixel_count() * sizeof(float));
    dst += 2 * f.pixel_count();
  }
  return out;
}

py::bytes to_bytes(const nw::Bytes& b) {
  return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
}

nw::Bytes from_bytes(const py::bytes& b) {
  const std::string s = b;
  return nw::Bytes(s.begin(), s.end());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  py::register_exception<nw::FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<nw::DegenerateInputError>(m, "DegenerateInputError", PyExc_ValueError);

  m.def("sample_white_noise",
        [](int h, int w, int c, std::uint64_t seed) { return from_field(nw::sample_white_noise(h, w, c, seed)); },
        py::arg("height"), py::arg("width"), py::arg("channels") = 1, py::arg("seed") = 0);

  m.def("warp_sequence",
        [](const FloatArray& init, const FloatArray& flows, std::uint64_t seed,
           std::optional<FloatArray> backward) {
          const auto fwd = to_flows(flows);
          std::vector<nw::FlowPair> pairs;
          std::vector<nw::FlowField> bwd;
          if (backward) {
            bwd = to_flows(*backward);
            if (bwd.size() != fwd.size()) throw std::invalid_argument("backward flow count differs");
          }
          for (std::size_t i = 0; i < fwd.size(); ++i) {
            pairs.push_back({fwd[i], backward ? std::optional(bwd[i]) : std::nullopt});
          }
          const auto field = to_field(init);
          std::vector<nw::NoiseField> frames;
          {
            py::gil_scoped_release release;
            frames = nw::warp_sequence(field, pairs, nw::RngStream(seed));
          }
          return from_sequence(nw::NoiseSequence(std::move(frames), seed));
        },
        py::arg("init"), py::arg("flows"), py::arg("seed") = 0, py::arg("backward") = py::none(),
        "Warp an initial (C, H, W) noise frame along (T, 2, H, W) flows; returns (T + 1, C, H, W).");

  m.def("camera_flow",
        [](const std::string& kind, double magnitude, int h, int w, int frames, double direction) {
          return from_flows(nw::camera_flow(nw::parse_camera_motion(kind), magnitude, h, w, frames, direction), h, w);
        },
        py::arg("kind"), py::arg("magnitude"), py::arg("height"), py::arg("width"), py::arg("frames"),
        py::arg("direction") = 0.0);

  m.def("render_scene_flows", [](const std::string& scene_json) {
    const auto scene = nw::scene_from_json(scene_json);
    return from_flows(nw::render_scene_flows(scene), scene.height, scene.width);
  });

  m.def("degrade",
        [](const FloatArray& seq, double gamma, std::uint64_t seed) {
          return from_sequence(nw::degrade(to_sequence(seq, seed), gamma, nw::RngStream(seed)));
        },
        py::arg("sequence"), py::arg("gamma"), py::arg("seed") = 0);

  m.def("downsample_to_latent",
        [](const FloatArray& seq, int spatial, int temporal) {
          return from_sequence(nw::downsample_to_latent(to_sequence(seq, 0), spatial, temporal));
        },
        py::arg("sequence"), py::arg("spatial") = 8, py::arg("temporal") = 4);

  m.def("morans_i", [](const FloatArray& plane) {
    if (plane.ndim() != 2) throw std::invalid_argument("plane must be 2-D");
    const auto r = nw::morans_i(std::span(plane.data(), plane.size()), static_cast<int>(plane.shape(0)),
                                static_cast<int>(plane.shape(1)));
    return py::dict(py::arg("index") = r.index, py::arg("expected") = r.expected,
                    py::arg("variance") = r.variance, py::arg("z_score") = r.z_score,
                    py::arg("p_value") = r.p_value);
  });

  m.def("ks_test",
        [](const FloatArray& plane, std::uint32_t sample_size, std::uint64_t seed) {
          const auto r = nw::ks_test(std::span(plane.data(), plane.size()), sample_size, nw::RngStream(seed));
          return py::make_tuple(r.statistic, r.p_value);
        },
        py::arg("plane"), py::arg("sample_size") = 200, py::arg("seed") = 0);

  m.def("gaussianity_battery",
        [](const FloatArray& seq, std::uint64_t seed) {
          nw::BatteryConfig cfg;
          cfg.seed = seed;
          const auto r = nw::gaussianity_battery(to_sequence(seq, seed), cfg);
          return py::dict(py::arg("moran_pass_rate") = r.moran_pass_rate,
                          py::arg("ks_pass_rate") = r.ks_pass_rate,
                          py::arg("moments_pass_rate") = r.moments_pass_rate,
                          py::arg("joint_pass_rate") = r.joint_pass_rate, py::arg("pass") = r.pass,
                          py::arg("jsonl") = nw::battery_to_jsonl(r));
        },
        py::arg("sequence"), py::arg("seed") = 0);

  m.def("read_flo", [](const py::bytes& data) {
    const auto f = nw::read_flo(from_bytes(data));
    FloatArray out({2, f.height(), f.width()});
    std::memcpy(out.mutable_data(), f.dx().data(), f.pixel_count() * sizeof(float));
    std::memcpy(out.mutable_data() + f.pixel_count(), f.dy().data(), f.pixel_count() * sizeof(float));
    return out;
  });

  m.def("write_flo", [](const FloatArray& flow) {
    if (flow.ndim() != 3 || flow.shape(0) != 2) throw std::invalid_argument("flow must have shape (2, H, W)");
    return to_bytes(nw::write_flo(to_flow(flow.data(), static_cast<int>(flow.shape(1)), static_cast<int>(flow.shape(2)))));
  });

  m.def("read_container", [](const py::bytes& data) {
    const auto seq = nw::read_noise_container(from_bytes(data));
    return py::make_tuple(from_sequence(seq), seq.seed());
  });

  m.def("write_container",
        [](const FloatArray& seq, std::uint64_t seed) { return to_bytes(nw::write_noise_container(to_sequence(seq, seed))); },
        py::arg("sequence"), py::arg("seed") = 0);
}
