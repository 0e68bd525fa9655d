#include "rgbdg/scene.hpp"

#include <cmath>

namespace rgbdg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::dimension_mismatch: return "dimension-mismatch";
    case ErrorCode::out_of_range: return "out-of-range";
    case ErrorCode::degenerate_box: return "degenerate-box";
    case ErrorCode::invalid_kernel: return "invalid-kernel";
    case ErrorCode::invalid_config: return "invalid-config";
    case ErrorCode::malformed_header: return "malformed-header";
    case ErrorCode::truncated_payload: return "truncated-payload";
    case ErrorCode::value_out_of_range: return "value-out-of-range";
    case ErrorCode::schema_violation: return "schema-violation";
    case ErrorCode::duplicate_scene_id: return "duplicate-scene-id";
    case ErrorCode::invalid_spec: return "invalid-spec";
    case ErrorCode::zero_margin: return "zero-margin";
    case ErrorCode::io_failure: return "io-failure";
  }
  return "unknown";
}

namespace {

bool unit_interval(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

void check_extent(Extent extent, std::size_t count, const char* what) {
  if (extent.width < 1 || extent.height < 1) {
    throw Error(ErrorCode::dimension_mismatch,
                std::string(what) + " must be at least 1x1, got " + std::to_string(extent.width) + "x" +
                    std::to_string(extent.height));
  }
  if (count != extent.size()) {
    throw Error(ErrorCode::dimension_mismatch, std::string(what) + " holds " + std::to_string(count) +
                                                   " values for a " + std::to_string(extent.width) + "x" +
                                                   std::to_string(extent.height) + " grid");
  }
}

std::string pixel_name(Extent extent, std::size_t i) {
  return "(" + std::to_string(i % static_cast<std::size_t>(extent.width)) + "," +
         std::to_string(i / static_cast<std::size_t>(extent.width)) + ")";
}

}  // namespace

ActivationHeatmap::ActivationHeatmap(Extent extent, Rgb fill) : extent_(extent) {
  check_extent(extent, extent.size(), "heatmap");
  if (!unit_interval(fill.r) || !unit_interval(fill.g) || !unit_interval(fill.b)) {
    throw Error(ErrorCode::out_of_range, "heatmap fill colour outside [0,1]");
  }
  pixels_.assign(extent.size(), fill);
}

ActivationHeatmap::ActivationHeatmap(Extent extent, std::vector<Rgb> pixels)
    : extent_(extent), pixels_(std::move(pixels)) {
  check_extent(extent, pixels_.size(), "heatmap");
  validate();
}

void ActivationHeatmap::validate() const {
  for (std::size_t i = 0; i < pixels_.size(); ++i) {
    const Rgb& p = pixels_[i];
    if (!unit_interval(p.r) || !unit_interval(p.g) || !unit_interval(p.b)) {
      throw Error(ErrorCode::out_of_range, "heatmap channel outside [0,1] at pixel " + pixel_name(extent_, i));
    }
  }
}

DepthMap::DepthMap(Extent extent, double fill) : extent_(extent) {
  check_extent(extent, extent.size(), "depth map");
  if (!unit_interval(fill)) throw Error(ErrorCode::out_of_range, "depth fill outside [0,1]");
  values_.assign(extent.size(), fill);
}

DepthMap::DepthMap(Extent extent, std::vector<double> values) : extent_(extent), values_(std::move(values)) {
  check_extent(extent, values_.size(), "depth map");
  validate();
}

void DepthMap::validate() const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!unit_interval(values_[i])) {
      throw Error(ErrorCode::out_of_range, "depth outside [0,1] at pixel " + pixel_name(extent_, i));
    }
  }
}

BoundingBox::BoundingBox(int x_min, int y_min, int x_max, int y_max)
    : x_min_(x_min), y_min_(y_min), x_max_(x_max), y_max_(y_max) {
  if (x_min > x_max || y_min > y_max) {
    throw Error(ErrorCode::degenerate_box, "box (" + std::to_string(x_min) + "," + std::to_string(y_min) + "," +
                                               std::to_string(x_max) + "," + std::to_string(y_max) +
                                               ") has inverted corners");
  }
}

std::string to_string(Category category) { return category == Category::easy ? "easy" : "difficult"; }
std::string to_string(Mode mode) { return mode == Mode::rgbd ? "rgbd" : "rgb"; }

Category category_from_string(const std::string& name) {
  if (name == "easy") return Category::easy;
  if (name == "difficult") return Category::difficult;
  throw Error(ErrorCode::invalid_config, "unknown category '" + name + "'");
}

Mode mode_from_string(const std::string& name) {
  if (name == "rgbd") return Mode::rgbd;
  if (name == "rgb") return Mode::rgb;
  throw Error(ErrorCode::invalid_config, "unknown mode '" + name + "'");
}

const Scene& validate_scene(const Scene& scene) {
  const Extent extent = scene.rgb_heatmap.extent();
  check_extent(extent, scene.rgb_heatmap.pixels().size(), "rgb heatmap");
  if (scene.depth_heatmap.extent() != extent) {
    throw Error(ErrorCode::dimension_mismatch, "depth heatmap is " + std::to_string(scene.depth_heatmap.width()) +
                                                   "x" + std::to_string(scene.depth_heatmap.height()) +
                                                   " but rgb heatmap is " + std::to_string(extent.width) + "x" +
                                                   std::to_string(extent.height));
  }
  if (scene.depth_map.extent() != extent) {
    throw Error(ErrorCode::dimension_mismatch, "depth map is " + std::to_string(scene.depth_map.width()) + "x" +
                                                   std::to_string(scene.depth_map.height()) +
                                                   " but rgb heatmap is " + std::to_string(extent.width) + "x" +
                                                   std::to_string(extent.height));
  }
  scene.rgb_heatmap.validate();
  scene.depth_heatmap.validate();
  scene.depth_map.validate();
  const BoundingBox& gt = scene.ground_truth;
  if (gt.x_min() > gt.x_max() || gt.y_min() > gt.y_max()) {
    throw Error(ErrorCode::degenerate_box, "ground truth has inverted corners");
  }
  if (!gt.within(extent)) {
    throw Error(ErrorCode::out_of_range, "ground truth box lies outside the image");
  }
  return scene;
}

}  // namespace rgbdg
