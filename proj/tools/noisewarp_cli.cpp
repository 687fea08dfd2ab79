// noisewarp command-line front end.
//
//   noisewarp warp --flows DIR | --scene FILE --seed N --gamma F
//                  --spatial-down K --temporal-down K [--verify] --out FILE
//   noisewarp synth-flow --scene FILE --out DIR
//   noisewarp stats --in FILE [--json]
//   noisewarp bench --sizes 256,512,1024 --frames 30
//   noisewarp serve --port 8080 [--root DIR]
//
// Exit codes: 0 ok, 2 usage, 3 format or I/O, 4 numeric/argument.

#include <algorithm>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "noisewarp/bench.hpp"
#include "noisewarp/errors.hpp"
#include "noisewarp/flow_io.hpp"
#include "noisewarp/flow_synth.hpp"
#include "noisewarp/pipeline.hpp"
#include "noisewarp/service.hpp"
#include "noisewarp/stats.hpp"

namespace fs = std::filesystem;
using namespace noisewarp;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitFormat = 3;
constexpr int kExitNumeric = 4;

// I/O failures get the format exit code.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Bytes load(const fs::path& path) {
  try {
    return read_file(path);
  } catch (const std::runtime_error& e) {
    throw InputError(e.what());
  }
}

std::vector<fs::path> flo_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InputError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".flo") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

FlowField load_flo(const fs::path& path) {
  try {
    return read_flo(load(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

SceneSpec load_scene(const fs::path& path) {
  const Bytes text = load(path);
  try {
    return scene_from_json(std::string(text.begin(), text.end()));
  } catch (const std::invalid_argument& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

struct WarpArgs {
  std::string flows_dir;
  std::string backward_dir;
  std::string scene_file;
  std::string out;
  PipelineOptions pipeline;
  bool verify = false;
};

int cmd_warp(const WarpArgs& args) {
  std::vector<FlowPair> flows;
  if (!args.scene_file.empty()) {
    for (FlowField& f : render_scene_flows(load_scene(args.scene_file))) {
      flows.push_back({std::move(f), std::nullopt});
    }
  } else {
    const auto forward = flo_files(args.flows_dir);
    if (forward.empty()) throw InputError("no .flo files in " + args.flows_dir);
    std::vector<fs::path> backward;
    if (!args.backward_dir.empty()) {
      backward = flo_files(args.backward_dir);
      if (backward.size() != forward.size()) {
        throw InputError("backward flow count " + std::to_string(backward.size()) +
                         " does not match forward count " + std::to_string(forward.size()));
      }
    }
    for (std::size_t i = 0; i < forward.size(); ++i) {
      FlowPair pair{load_flo(forward[i]), std::nullopt};
      if (!backward.empty()) pair.backward = load_flo(backward[i]);
      flows.push_back(std::move(pair));
    }
  }
  if (flows.empty()) throw InputError("no flows to warp along");
  const int height = flows.front().forward.height();
  const int width = flows.front().forward.width();

  const NoiseSequence seq =
      run_warp_pipeline(flows, height, width, args.pipeline, [](std::size_t t, double ms) {
        std::fprintf(stderr, "frame %zu: %.3f ms\n", t, ms);
      });
  write_file(args.out, write_noise_container(seq));
  std::fprintf(stderr, "wrote %zu frames (%dx%dx%d) to %s\n", seq.size(), seq.height(),
               seq.width(), seq.channels(), args.out.c_str());

  if (args.verify) {
    BatteryConfig config;
    config.seed = args.pipeline.seed;
    const BatteryResult result = gaussianity_battery(seq, config);
    std::printf("battery: moran %.3f  ks %.3f  moments %.3f  joint %.3f -> %s\n",
                result.moran_pass_rate, result.ks_pass_rate, result.moments_pass_rate,
                result.joint_pass_rate, result.pass ? "PASS" : "FAIL");
  }
  return 0;
}

int cmd_synth_flow(const std::string& scene_file, const std::string& out_dir, bool preview) {
  const auto flows = render_scene_flows(load_scene(scene_file));
  fs::create_directories(out_dir);
  char name[64];
  for (std::size_t t = 0; t < flows.size(); ++t) {
    std::snprintf(name, sizeof name, "flow_%04zu.flo", t);
    write_file(fs::path(out_dir) / name, write_flo(flows[t]));
    if (preview) {
      std::snprintf(name, sizeof name, "flow_%04zu.png", t);
      write_file(fs::path(out_dir) / name, encode_png(visualize_flow(flows[t])));
    }
  }
  std::fprintf(stderr, "wrote %zu flows to %s\n", flows.size(), out_dir.c_str());
  return 0;
}

int cmd_stats(const std::string& in, bool as_json, const BatteryConfig& config) {
  NoiseSequence seq = [&] {
    try {
      return read_noise_container(load(in));
    } catch (const FormatError& e) {
      throw FormatError(in + ": " + e.what());
    }
  }();
  const BatteryResult result = gaussianity_battery(seq, config);
  std::fputs(as_json ? battery_to_jsonl(result).c_str() : battery_to_table(result).c_str(), stdout);
  return 0;
}

int cmd_bench(const BenchmarkConfig& config) {
  const BenchmarkReport report = run_warp_benchmark(config);
  std::fputs(benchmark_to_jsonl(report, config).c_str(), stdout);
  return 0;
}

NoiseService* g_service = nullptr;

int cmd_serve(const std::string& host, int port, const std::string& root) {
  ServiceOptions options;
  if (!root.empty()) options.root = root;
  NoiseService service(options);
  const int bound = service.bind(host, port);
  if (bound < 0) {
    std::fprintf(stderr, "cannot bind %s:%d\n", host.c_str(), port);
    return kExitUsage;
  }
  g_service = &service;
  std::signal(SIGINT, [](int) {
    if (g_service) g_service->stop();
  });
  std::fprintf(stderr, "listening on http://%s:%d\n", host.c_str(), bound);
  service.listen();
  g_service = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussianity-preserving noise warping along optical flow"};
  app.require_subcommand(1);

  WarpArgs warp;
  auto* warp_cmd = app.add_subcommand("warp", "Warp white noise along flows into a noise container");
  auto* flows_opt = warp_cmd->add_option("--flows", warp.flows_dir, "Directory of forward .flo files");
  auto* scene_opt = warp_cmd->add_option("--scene", warp.scene_file, "Scene JSON to render flows from");
  flows_opt->excludes(scene_opt);
  warp_cmd->add_option("--backward", warp.backward_dir,
                       "Directory of backward .flo files (default: negated forward)")
      ->needs(flows_opt);
  warp_cmd->add_option("--seed", warp.pipeline.seed, "Noise seed");
  warp_cmd->add_option("--gamma", warp.pipeline.gamma, "Degradation level in [0, 1]");
  warp_cmd->add_option("--spatial-down", warp.pipeline.spatial_down, "Spatial mean-pool factor");
  warp_cmd->add_option("--temporal-down", warp.pipeline.temporal_down, "Keep every k-th frame");
  warp_cmd->add_option("--channels", warp.pipeline.channels, "Noise channels");
  warp_cmd->add_flag("--verify", warp.verify, "Run the Gaussianity battery on the output");
  warp_cmd->add_option("--out", warp.out, "Output container path")->required();

  std::string scene_file, out_dir;
  bool preview = false;
  auto* synth_cmd = app.add_subcommand("synth-flow", "Render a scene's flows to .flo files");
  synth_cmd->add_option("--scene", scene_file, "Scene JSON")->required();
  synth_cmd->add_option("--out", out_dir, "Output directory")->required();
  synth_cmd->add_flag("--preview", preview, "Also write color-wheel PNGs");

  std::string stats_in;
  bool stats_json = false;
  BatteryConfig battery;
  auto* stats_cmd = app.add_subcommand("stats", "Run the Gaussianity battery on a container");
  stats_cmd->add_option("--in", stats_in, "Noise container")->required();
  stats_cmd->add_flag("--json", stats_json, "Emit line-delimited JSON");
  stats_cmd->add_option("--ks-sample", battery.ks_sample_size, "K-S subsample size");
  stats_cmd->add_option("--quota", battery.quota, "Required per-test pass fraction");
  stats_cmd->add_option("--seed", battery.seed, "Subsampling seed");
  stats_cmd->add_flag("--permutation", battery.moran_permutation,
                      "Moran p-values by permutation (999)");

  BenchmarkConfig bench;
  std::string bench_kind = "zoom";
  auto* bench_cmd = app.add_subcommand("bench", "Time warp steps across frame sizes");
  bench_cmd->add_option("--sizes", bench.sizes, "Square frame sizes")->delimiter(',');
  bench_cmd->add_option("--frames", bench.frames, "Timed frames per size");
  bench_cmd->add_option("--flow", bench_kind, "pan, zoom or rotate");
  bench_cmd->add_option("--magnitude", bench.magnitude, "Flow magnitude per frame");

  std::string host = "127.0.0.1", root;
  int port = 8080;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  serve_cmd->add_option("--port", port, "Port (0 picks a free one)");
  serve_cmd->add_option("--host", host, "Bind address");
  serve_cmd->add_option("--root", root, "Directory for persisted scenes and jobs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*warp_cmd) {
      if (warp.flows_dir.empty() && warp.scene_file.empty()) {
        std::fprintf(stderr, "warp: one of --flows or --scene is required\n");
        return kExitUsage;
      }
      return cmd_warp(warp);
    }
    if (*synth_cmd) return cmd_synth_flow(scene_file, out_dir, preview);
    if (*stats_cmd) return cmd_stats(stats_in, stats_json, battery);
    if (*bench_cmd) {
      bench.kind = parse_camera_motion(bench_kind);
      return cmd_bench(bench);
    }
    if (*serve_cmd) return cmd_serve(host, port, root);
  } catch (const FormatError& e) {
    std::fprintf(stderr, "format error: %s\n", e.what());
    return kExitFormat;
  } catch (const InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitFormat;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  } catch (const DegenerateInputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFormat;
  }
  return kExitUsage;
}
