#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "noisewarp/fields.hpp"

namespace noisewarp {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Similarity transform applied about a pivot (the frame-0 centroid):
// scale first, then rotate, then translate.
struct Transform {
  double tx = 0.0;
  double ty = 0.0;
  double rotate = 0.0;  // radians, counter-clockwise in image coordinates
  double scale = 1.0;

  Point apply(Point p, Point pivot) const;
  Point invert(Point p, Point pivot) const;
  void validate() const;
};

struct Layer {
  std::vector<Point> polygon;  // frame-0 pixel coordinates
  std::vector<Transform> track;  // one transform per frame
};

// Layered cut-and-drag scene. Later layers occlude earlier ones.
struct SceneSpec {
  int height = 0;
  int width = 0;
  int frame_count = 0;
  std::vector<Layer> layers;
  std::optional<std::vector<Transform>> background;

  // Throws std::invalid_argument on any structural problem.
  void validate() const;
};

// Area centroid of a simple polygon.
Point polygon_centroid(const std::vector<Point>& polygon);
bool polygon_is_simple(const std::vector<Point>& polygon);
// Even-odd rule.
bool point_in_polygon(const std::vector<Point>& polygon, Point p);

// frame_count - 1 fractional flows, one per consecutive frame pair.
std::vector<FlowField> render_scene_flows(const SceneSpec& scene);

enum class CameraMotion { kPan, kZoom, kRotate };

CameraMotion parse_camera_motion(std::string_view name);
std::string_view to_string(CameraMotion kind);

// Parametric camera flows, constant over time:
//   pan    - `magnitude` pixels per frame along `direction` (radians, 0 = +x)
//   zoom   - ratio per frame; displacement (ratio - 1) * (x - center)
//   rotate - radians per frame about the frame center
// The center is ((width - 1) / 2, (height - 1) / 2).
std::vector<FlowField> camera_flow(CameraMotion kind, double magnitude, int height, int width,
                                   int frame_count, double direction = 0.0);

// JSON document form. Field names: canvas{h,w}, frames,
// layers[{polygon[[x,y],...], track[{tx,ty,rot,scale},...]}], background{track}.
SceneSpec scene_from_json(std::string_view text);
std::string scene_to_json(const SceneSpec& scene);

}  // namespace noisewarp
