#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace noisewarp {

struct ServiceOptions {
  // When set, scenes and finished job containers are persisted here and
  // reloaded on startup.
  std::optional<std::filesystem::path> root;
};

// JSON-over-HTTP front end:
//   POST /scenes                        SceneSpec JSON -> 201 {"id"}
//   GET  /scenes/{id}                   SceneSpec JSON
//   GET  /scenes/{id}/flows/{t}         .flo bytes
//   GET  /scenes/{id}/flow-preview/{t}  PNG
//   POST /warp                          JSON {scene, seed, gamma, spatial_down, temporal_down,
//                                       channels}, or an application/octet-stream body of
//                                       concatenated .flo files with the same fields as query
//                                       parameters -> 202 {"id"}
//   GET  /jobs/{id}                     status; when done, container and preview links
//   GET  /jobs/{id}/container           noise container bytes
//   GET  /jobs/{id}/noise-preview/{t}   PNG of output frame t, channel 0
// Errors are {"error": {"code", "message"}} with 400, 404, 409 or 422.
class NoiseService {
 public:
  explicit NoiseService(ServiceOptions options = {});
  ~NoiseService();
  NoiseService(const NoiseService&) = delete;
  NoiseService& operator=(const NoiseService&) = delete;

  // Port 0 picks a free port. Returns the bound port, or -1 on failure.
  int bind(const std::string& host, int port);
  // Serves until stop(). Requires a successful bind().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace noisewarp
