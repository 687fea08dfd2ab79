#include "noisewarp/flow_synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace noisewarp {
namespace {

using nlohmann::json;

double cross(Point o, Point a, Point b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(Point p, Point a, Point b) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Point a, Point b, Point c, Point d) {
  const double d1 = cross(c, d, a);
  const double d2 = cross(c, d, b);
  const double d3 = cross(a, b, c);
  const double d4 = cross(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  if (d1 == 0 && on_segment(a, c, d)) return true;
  if (d2 == 0 && on_segment(b, c, d)) return true;
  if (d3 == 0 && on_segment(c, a, b)) return true;
  if (d4 == 0 && on_segment(d, a, b)) return true;
  return false;
}

void validate_track(const std::vector<Transform>& track, int frame_count, const std::string& what) {
  if (static_cast<int>(track.size()) != frame_count) {
    throw std::invalid_argument(what + ": track has " + std::to_string(track.size()) +
                                " entries, expected " + std::to_string(frame_count));
  }
  for (const Transform& t : track) t.validate();
}

struct Box {
  double x0, y0, x1, y1;
  bool contains(Point p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
};

Box bounding_box(const std::vector<Point>& poly) {
  Box b{poly[0].x, poly[0].y, poly[0].x, poly[0].y};
  for (const Point& p : poly) {
    b.x0 = std::min(b.x0, p.x);
    b.y0 = std::min(b.y0, p.y);
    b.x1 = std::max(b.x1, p.x);
    b.y1 = std::max(b.y1, p.y);
  }
  return b;
}

Transform transform_from_json(const json& j) {
  Transform t;
  t.tx = j.value("tx", 0.0);
  t.ty = j.value("ty", 0.0);
  t.rotate = j.value("rot", 0.0);
  t.scale = j.value("scale", 1.0);
  return t;
}

json transform_to_json(const Transform& t) {
  return json{{"tx", t.tx}, {"ty", t.ty}, {"rot", t.rotate}, {"scale", t.scale}};
}

std::vector<Transform> track_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("track must be an array");
  std::vector<Transform> track;
  for (const json& entry : j) track.push_back(transform_from_json(entry));
  return track;
}

}  // namespace

Point Transform::apply(Point p, Point pivot) const {
  const double c = std::cos(rotate);
  const double s = std::sin(rotate);
  const double ux = scale * (p.x - pivot.x);
  const double uy = scale * (p.y - pivot.y);
  return {pivot.x + tx + c * ux - s * uy, pivot.y + ty + s * ux + c * uy};
}

Point Transform::invert(Point p, Point pivot) const {
  const double c = std::cos(rotate);
  const double s = std::sin(rotate);
  const double ux = p.x - pivot.x - tx;
  const double uy = p.y - pivot.y - ty;
  return {pivot.x + (c * ux + s * uy) / scale, pivot.y + (-s * ux + c * uy) / scale};
}

void Transform::validate() const {
  if (!std::isfinite(tx) || !std::isfinite(ty) || !std::isfinite(rotate) || !std::isfinite(scale)) {
    throw std::invalid_argument("transform components must be finite");
  }
  if (!(scale > 0.0)) throw std::invalid_argument("transform scale must be > 0");
}

Point polygon_centroid(const std::vector<Point>& poly) {
  double area2 = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % poly.size()];
    const double w = a.x * b.y - b.x * a.y;
    area2 += w;
    cx += (a.x + b.x) * w;
    cy += (a.y + b.y) * w;
  }
  if (area2 == 0.0) throw std::invalid_argument("polygon has zero area");
  return {cx / (3.0 * area2), cy / (3.0 * area2)};
}

bool polygon_is_simple(const std::vector<Point>& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = poly[i], b = poly[(i + 1) % n];
    if (a.x == b.x && a.y == b.y) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      // Adjacent edges share a vertex by construction.
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(a, b, poly[j], poly[(j + 1) % n])) return false;
    }
  }
  return true;
}

bool point_in_polygon(const std::vector<Point>& poly, Point p) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point& a = poly[i];
    const Point& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) {
      inside = !inside;
    }
  }
  return inside;
}

void SceneSpec::validate() const {
  if (height < 1 || width < 1) throw std::invalid_argument("scene canvas must be at least 1x1");
  if (frame_count < 2) throw std::invalid_argument("scene needs at least 2 frames");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const std::string what = "layer " + std::to_string(i);
    const Layer& layer = layers[i];
    if (layer.polygon.size() < 3) throw std::invalid_argument(what + ": polygon needs >= 3 vertices");
    for (const Point& p : layer.polygon) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        throw std::invalid_argument(what + ": vertex is not finite");
      }
    }
    if (!polygon_is_simple(layer.polygon)) {
      throw std::invalid_argument(what + ": polygon is self-intersecting");
    }
    polygon_centroid(layer.polygon);
    validate_track(layer.track, frame_count, what);
  }
  if (background) validate_track(*background, frame_count, "background");
}

std::vector<FlowField> render_scene_flows(const SceneSpec& scene) {
  scene.validate();
  const int h = scene.height;
  const int w = scene.width;
  const std::size_t n = static_cast<std::size_t>(h) * w;
  const Point canvas_center{(w - 1) / 2.0, (h - 1) / 2.0};

  std::vector<Point> pivots;
  for (const Layer& layer : scene.layers) pivots.push_back(polygon_centroid(layer.polygon));

  std::vector<FlowField> flows;
  flows.reserve(scene.frame_count - 1);
  for (int t = 0; t + 1 < scene.frame_count; ++t) {
    std::vector<std::vector<Point>> shapes;
    std::vector<Box> boxes;
    for (std::size_t l = 0; l < scene.layers.size(); ++l) {
      std::vector<Point> shape;
      for (const Point& p : scene.layers[l].polygon) {
        shape.push_back(scene.layers[l].track[t].apply(p, pivots[l]));
      }
      boxes.push_back(bounding_box(shape));
      shapes.push_back(std::move(shape));
    }

    std::vector<float> dx(n, 0.0f), dy(n, 0.0f);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const Point p{static_cast<double>(x), static_cast<double>(y)};
        const std::vector<Transform>* track = nullptr;
        Point pivot = canvas_center;
        for (std::size_t l = scene.layers.size(); l-- > 0;) {
          if (boxes[l].contains(p) && point_in_polygon(shapes[l], p)) {
            track = &scene.layers[l].track;
            pivot = pivots[l];
            break;
          }
        }
        if (track == nullptr) {
          if (!scene.background) continue;
          track = &*scene.background;
        }
        const Point origin = (*track)[t].invert(p, pivot);
        const Point next = (*track)[t + 1].apply(origin, pivot);
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        dx[i] = static_cast<float>(next.x - p.x);
        dy[i] = static_cast<float>(next.y - p.y);
      }
    }
    flows.emplace_back(h, w, std::move(dx), std::move(dy));
  }
  return flows;
}

CameraMotion parse_camera_motion(std::string_view name) {
  if (name == "pan") return CameraMotion::kPan;
  if (name == "zoom") return CameraMotion::kZoom;
  if (name == "rotate") return CameraMotion::kRotate;
  throw std::invalid_argument("unknown camera motion '" + std::string(name) + "'");
}

std::string_view to_string(CameraMotion kind) {
  switch (kind) {
    case CameraMotion::kPan:
      return "pan";
    case CameraMotion::kZoom:
      return "zoom";
    case CameraMotion::kRotate:
      return "rotate";
  }
  return "unknown";
}

std::vector<FlowField> camera_flow(CameraMotion kind, double magnitude, int height, int width,
                                   int frame_count, double direction) {
  if (!std::isfinite(magnitude) || !std::isfinite(direction)) {
    throw std::invalid_argument("camera magnitude must be finite");
  }
  if (kind == CameraMotion::kZoom && !(magnitude > 0.0)) {
    throw std::invalid_argument("zoom ratio must be > 0");
  }
  if (frame_count < 1) throw std::invalid_argument("frame_count must be >= 1");
  if (height < 1 || width < 1) throw std::invalid_argument("flow dimensions must be >= 1");

  const std::size_t n = static_cast<std::size_t>(height) * width;
  const double cx = (width - 1) / 2.0;
  const double cy = (height - 1) / 2.0;
  std::vector<float> dx(n), dy(n);
  const double c = std::cos(magnitude);
  const double s = std::sin(magnitude);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * width + x;
      const double rx = x - cx;
      const double ry = y - cy;
      switch (kind) {
        case CameraMotion::kPan:
          dx[i] = static_cast<float>(magnitude * std::cos(direction));
          dy[i] = static_cast<float>(magnitude * std::sin(direction));
          break;
        case CameraMotion::kZoom:
          dx[i] = static_cast<float>((magnitude - 1.0) * rx);
          dy[i] = static_cast<float>((magnitude - 1.0) * ry);
          break;
        case CameraMotion::kRotate:
          dx[i] = static_cast<float>(c * rx - s * ry - rx);
          dy[i] = static_cast<float>(s * rx + c * ry - ry);
          break;
      }
    }
  }
  const FlowField flow(height, width, std::move(dx), std::move(dy));
  return std::vector<FlowField>(static_cast<std::size_t>(std::max(0, frame_count - 1)), flow);
}

SceneSpec scene_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("scene is not valid JSON: ") + e.what());
  }
  SceneSpec scene;
  try {
    scene.height = doc.at("canvas").at("h").get<int>();
    scene.width = doc.at("canvas").at("w").get<int>();
    scene.frame_count = doc.at("frames").get<int>();
    for (const json& layer_doc : doc.value("layers", json::array())) {
      Layer layer;
      for (const json& vertex : layer_doc.at("polygon")) {
        if (!vertex.is_array() || vertex.size() != 2) {
          throw std::invalid_argument("polygon vertices must be [x, y] pairs");
        }
        layer.polygon.push_back({vertex[0].get<double>(), vertex[1].get<double>()});
      }
      layer.track = track_from_json(layer_doc.at("track"));
      scene.layers.push_back(std::move(layer));
    }
    if (doc.contains("background") && !doc["background"].is_null()) {
      scene.background = track_from_json(doc["background"].at("track"));
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed scene: ") + e.what());
  }
  scene.validate();
  return scene;
}

std::string scene_to_json(const SceneSpec& scene) {
  json doc;
  doc["canvas"] = {{"h", scene.height}, {"w", scene.width}};
  doc["frames"] = scene.frame_count;
  doc["layers"] = json::array();
  for (const Layer& layer : scene.layers) {
    json polygon = json::array();
    for (const Point& p : layer.polygon) polygon.push_back({p.x, p.y});
    json track = json::array();
    for (const Transform& t : layer.track) track.push_back(transform_to_json(t));
    doc["layers"].push_back({{"polygon", polygon}, {"track", track}});
  }
  if (scene.background) {
    json track = json::array();
    for (const Transform& t : *scene.background) track.push_back(transform_to_json(t));
    doc["background"] = {{"track", track}};
  }
  return doc.dump(2);
}

}  // namespace noisewarp
