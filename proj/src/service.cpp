#include "noisewarp/service.hpp"

#include <atomic>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "noisewarp/errors.hpp"
#include "noisewarp/flow_io.hpp"
#include "noisewarp/flow_synth.hpp"
#include "noisewarp/pipeline.hpp"

namespace noisewarp {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kJson = "application/json";
constexpr const char* kOctets = "application/octet-stream";

struct HttpError {
  int status;
  std::string code;
  std::string message;
};

void send_error(httplib::Response& res, const HttpError& e) {
  res.status = e.status;
  res.set_content(json{{"error", {{"code", e.code}, {"message", e.message}}}}.dump(), kJson);
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_bytes(httplib::Response& res, const Bytes& bytes, const char* type) {
  res.status = 200;
  res.set_header("Cache-Control", "public, max-age=31536000, immutable");
  res.set_content(std::string(bytes.begin(), bytes.end()), type);
}

struct Scene {
  SceneSpec spec;
  std::string document;
  std::vector<FlowField> flows;
};

enum class JobStatus { kQueued, kRunning, kDone, kFailed };

const char* status_name(JobStatus s) {
  switch (s) {
    case JobStatus::kQueued: return "queued";
    case JobStatus::kRunning: return "running";
    case JobStatus::kDone: return "done";
    case JobStatus::kFailed: return "failed";
  }
  return "unknown";
}

struct Job {
  JobStatus status = JobStatus::kQueued;
  HttpError error{0, "", ""};
  std::shared_ptr<const Bytes> container;
  std::shared_ptr<const NoiseSequence> result;
};

int to_int(const std::string& s) {
  std::size_t used = 0;
  const long v = std::stol(s, &used);
  if (used != s.size()) throw std::invalid_argument("not an integer: " + s);
  return static_cast<int>(v);
}

}  // namespace

struct NoiseService::Impl {
  ServiceOptions options;
  httplib::Server server;
  std::mutex mutex;
  std::map<std::string, std::shared_ptr<const Scene>> scenes;
  std::map<std::string, std::shared_ptr<Job>> jobs;
  std::vector<std::thread> workers;
  std::uint64_t next_scene = 1;
  std::uint64_t next_job = 1;

  explicit Impl(ServiceOptions opts) : options(std::move(opts)) {
    load_persisted();
    routes();
  }

  ~Impl() {
    server.stop();
    for (auto& t : workers) {
      if (t.joinable()) t.join();
    }
  }

  static std::uint64_t id_number(const std::string& id) {
    try {
      return id.size() > 1 ? std::stoull(id.substr(1)) : 0;
    } catch (const std::exception&) {
      return 0;
    }
  }

  void load_persisted() {
    if (!options.root) return;
    fs::create_directories(*options.root / "scenes");
    fs::create_directories(*options.root / "jobs");
    for (const auto& entry : fs::directory_iterator(*options.root / "scenes")) {
      if (entry.path().extension() != ".json") continue;
      const Bytes text = read_file(entry.path());
      const std::string id = entry.path().stem().string();
      scenes[id] = make_scene(std::string(text.begin(), text.end()));
      next_scene = std::max(next_scene, id_number(id) + 1);
    }
    for (const auto& entry : fs::directory_iterator(*options.root / "jobs")) {
      if (entry.path().extension() != ".gwtf") continue;
      auto bytes = std::make_shared<const Bytes>(read_file(entry.path()));
      auto job = std::make_shared<Job>();
      job->result = std::make_shared<const NoiseSequence>(read_noise_container(*bytes));
      job->container = std::move(bytes);
      job->status = JobStatus::kDone;
      const std::string id = entry.path().stem().string();
      jobs[id] = job;
      next_job = std::max(next_job, id_number(id) + 1);
    }
  }

  static std::shared_ptr<const Scene> make_scene(std::string document) {
    auto scene = std::make_shared<Scene>();
    scene->spec = scene_from_json(document);
    scene->flows = render_scene_flows(scene->spec);
    scene->document = std::move(document);
    return scene;
  }

  std::shared_ptr<const Scene> find_scene(const std::string& id) {
    std::lock_guard lock(mutex);
    auto it = scenes.find(id);
    if (it == scenes.end()) throw HttpError{404, "unknown_scene", "no scene with id " + id};
    return it->second;
  }

  std::shared_ptr<Job> find_job(const std::string& id) {
    std::lock_guard lock(mutex);
    auto it = jobs.find(id);
    if (it == jobs.end()) throw HttpError{404, "unknown_job", "no job with id " + id};
    return it->second;
  }

  const FlowField& scene_flow(const Scene& scene, const std::string& t) {
    const int index = to_int(t);
    if (index < 0 || index >= static_cast<int>(scene.flows.size())) {
      throw HttpError{404, "unknown_frame",
                      "flow index " + t + " out of range [0, " +
                          std::to_string(scene.flows.size()) + ")"};
    }
    return scene.flows[index];
  }

  template <typename Handler>
  httplib::Server::Handler guarded(Handler handler) {
    return [handler](const httplib::Request& req, httplib::Response& res) {
      try {
        handler(req, res);
      } catch (const HttpError& e) {
        send_error(res, e);
      } catch (const FormatError& e) {
        send_error(res, {400, "format_error", e.what()});
      } catch (const json::exception& e) {
        send_error(res, {400, "malformed_request", e.what()});
      } catch (const std::invalid_argument& e) {
        send_error(res, {400, "invalid_argument", e.what()});
      } catch (const std::exception& e) {
        send_error(res, {500, "internal", e.what()});
      }
    };
  }

  void routes() {
    server.Post("/scenes", guarded([this](const httplib::Request& req, httplib::Response& res) {
      std::shared_ptr<const Scene> scene;
      try {
        scene = make_scene(req.body);
      } catch (const std::invalid_argument& e) {
        throw HttpError{400, "malformed_spec", e.what()};
      }
      std::string id;
      {
        std::lock_guard lock(mutex);
        id = "s" + std::to_string(next_scene++);
        scenes[id] = scene;
      }
      if (options.root) {
        write_file(*options.root / "scenes" / (id + ".json"),
                   std::span(reinterpret_cast<const std::uint8_t*>(scene->document.data()),
                             scene->document.size()));
      }
      send_json(res, 201,
                {{"id", id},
                 {"frames", scene->spec.frame_count},
                 {"flows", scene->flows.size()},
                 {"height", scene->spec.height},
                 {"width", scene->spec.width}});
    }));

    server.Get(R"(/scenes/([^/]+))",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto scene = find_scene(req.matches[1]);
                 res.set_content(scene_to_json(scene->spec), kJson);
               }));

    server.Get(R"(/scenes/([^/]+)/flows/([^/]+))",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto scene = find_scene(req.matches[1]);
                 send_bytes(res, write_flo(scene_flow(*scene, req.matches[2])), kOctets);
               }));

    server.Get(R"(/scenes/([^/]+)/flow-preview/([^/]+))",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto scene = find_scene(req.matches[1]);
                 send_bytes(res, encode_png(visualize_flow(scene_flow(*scene, req.matches[2]))),
                            "image/png");
               }));

    server.Post("/warp", guarded([this](const httplib::Request& req, httplib::Response& res) {
      submit_warp(req, res);
    }));

    server.Get(R"(/jobs/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      const auto job = find_job(id);
      std::lock_guard lock(mutex);
      json body{{"id", id}, {"status", status_name(job->status)}};
      if (job->status == JobStatus::kDone) {
        const std::string base = "/jobs/" + id;
        body["frames"] = job->result->size();
        body["height"] = job->result->height();
        body["width"] = job->result->width();
        body["channels"] = job->result->channels();
        body["container"] = base + "/container";
        json previews = json::array();
        for (std::size_t t = 0; t < job->result->size(); ++t) {
          previews.push_back(base + "/noise-preview/" + std::to_string(t));
        }
        body["noise_previews"] = previews;
      } else if (job->status == JobStatus::kFailed) {
        body["error"] = {{"code", job->error.code}, {"message", job->error.message}};
      }
      send_json(res, 200, body);
    }));

    server.Get(R"(/jobs/([^/]+)/container)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto job = finished_job(req.matches[1]);
                 send_bytes(res, *job->container, kOctets);
               }));

    server.Get(R"(/jobs/([^/]+)/noise-preview/([^/]+))",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto job = finished_job(req.matches[1]);
                 const int t = to_int(req.matches[2]);
                 if (t < 0 || t >= static_cast<int>(job->result->size())) {
                   throw HttpError{404, "unknown_frame", "frame index out of range"};
                 }
                 send_bytes(res, encode_png(visualize_noise(job->result->frame(t))), "image/png");
               }));
  }

  std::shared_ptr<Job> finished_job(const std::string& id) {
    auto job = find_job(id);
    std::lock_guard lock(mutex);
    if (job->status != JobStatus::kDone) {
      throw HttpError{409, "job_not_ready",
                      "job " + id + " is " + status_name(job->status)};
    }
    return job;
  }

  void submit_warp(const httplib::Request& req, httplib::Response& res) {
    PipelineOptions options;
    std::vector<FlowPair> flows;
    int height = 0, width = 0;

    const std::string type = req.get_header_value("Content-Type");
    if (type.rfind(kOctets, 0) == 0) {
      auto param = [&](const char* name, auto fallback) {
        return req.has_param(name) ? json::parse(req.get_param_value(name)).get<decltype(fallback)>()
                                   : fallback;
      };
      options.seed = param("seed", std::uint64_t{0});
      options.gamma = param("gamma", 0.0);
      options.spatial_down = param("spatial_down", 1);
      options.temporal_down = param("temporal_down", 1);
      options.channels = param("channels", 1);
      const auto uploaded = read_flo_stream(
          std::span(reinterpret_cast<const std::uint8_t*>(req.body.data()), req.body.size()));
      if (uploaded.empty()) throw HttpError{400, "malformed_request", "no flows uploaded"};
      height = uploaded.front().height();
      width = uploaded.front().width();
      for (const FlowField& f : uploaded) {
        if (f.height() != height || f.width() != width) {
          throw HttpError{422, "dimension_mismatch", "uploaded flows differ in size"};
        }
        flows.push_back({f, std::nullopt});
      }
    } else {
      const json body = json::parse(req.body);
      const auto scene = find_scene(body.at("scene").get<std::string>());
      options.seed = body.value("seed", std::uint64_t{0});
      options.gamma = body.value("gamma", 0.0);
      options.spatial_down = body.value("spatial_down", 1);
      options.temporal_down = body.value("temporal_down", 1);
      options.channels = body.value("channels", 1);
      height = scene->spec.height;
      width = scene->spec.width;
      for (const FlowField& f : scene->flows) flows.push_back({f, std::nullopt});
    }

    if (height % std::max(1, options.spatial_down) != 0 ||
        width % std::max(1, options.spatial_down) != 0) {
      throw HttpError{422, "dimension_mismatch",
                      "spatial factor does not divide " + std::to_string(height) + "x" +
                          std::to_string(width)};
    }
    validate_pipeline(height, width, options);

    auto job = std::make_shared<Job>();
    std::string id;
    {
      std::lock_guard lock(mutex);
      id = "j" + std::to_string(next_job++);
      jobs[id] = job;
      workers.emplace_back([this, job, id, flows = std::move(flows), height, width, options] {
        run_job(job, id, flows, height, width, options);
      });
    }
    send_json(res, 202, {{"id", id}, {"status", "queued"}, {"href", "/jobs/" + id}});
  }

  void run_job(const std::shared_ptr<Job>& job, const std::string& id,
               const std::vector<FlowPair>& flows, int height, int width,
               const PipelineOptions& pipeline) {
    {
      std::lock_guard lock(mutex);
      job->status = JobStatus::kRunning;
    }
    try {
      auto result = std::make_shared<const NoiseSequence>(
          run_warp_pipeline(flows, height, width, pipeline));
      auto container = std::make_shared<const Bytes>(write_noise_container(*result));
      if (options.root) write_file(*options.root / "jobs" / (id + ".gwtf"), *container);
      std::lock_guard lock(mutex);
      job->result = std::move(result);
      job->container = std::move(container);
      job->status = JobStatus::kDone;
    } catch (const std::exception& e) {
      std::lock_guard lock(mutex);
      job->status = JobStatus::kFailed;
      job->error = {500, "job_failed", e.what()};
    }
  }
};

NoiseService::NoiseService(ServiceOptions options)
    : impl_(std::make_unique<Impl>(std::move(options))) {}

NoiseService::~NoiseService() = default;

int NoiseService::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

void NoiseService::listen() { impl_->server.listen_after_bind(); }

void NoiseService::stop() { impl_->server.stop(); }

}  // namespace noisewarp
