#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rgbdg/error.hpp"

namespace rgbdg {

/// Normalized activation intensities of one heatmap pixel. Red encodes high
/// activation, blue low.
struct Rgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

inline constexpr Rgb kInactive{0.0, 0.0, 1.0};

/// Origin top-left, x to the right, y downward; storage is row-major.
struct Extent {
  int width = 0;
  int height = 0;

  std::size_t size() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
  }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }

  friend bool operator==(const Extent&, const Extent&) = default;
};

class ActivationHeatmap {
 public:
  ActivationHeatmap() = default;
  /// Filled with the inactive colour (0, 0, 1).
  explicit ActivationHeatmap(Extent extent, Rgb fill = kInactive);
  /// Throws out_of_range when any channel is non-finite or outside [0,1].
  ActivationHeatmap(Extent extent, std::vector<Rgb> pixels);

  Extent extent() const { return extent_; }
  int width() const { return extent_.width; }
  int height() const { return extent_.height; }

  const Rgb& at(int x, int y) const { return pixels_[extent_.index(x, y)]; }
  Rgb& at(int x, int y) { return pixels_[extent_.index(x, y)]; }
  std::span<const Rgb> pixels() const { return pixels_; }
  std::span<Rgb> pixels() { return pixels_; }

  /// Re-checks the channel range; used after in-place edits.
  void validate() const;

  friend bool operator==(const ActivationHeatmap&, const ActivationHeatmap&) = default;

 private:
  Extent extent_{};
  std::vector<Rgb> pixels_;
};

class DepthMap {
 public:
  DepthMap() = default;
  explicit DepthMap(Extent extent, double fill = 1.0);
  DepthMap(Extent extent, std::vector<double> values);

  Extent extent() const { return extent_; }
  int width() const { return extent_.width; }
  int height() const { return extent_.height; }

  double at(int x, int y) const { return values_[extent_.index(x, y)]; }
  double& at(int x, int y) { return values_[extent_.index(x, y)]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  void validate() const;

  friend bool operator==(const DepthMap&, const DepthMap&) = default;

 private:
  Extent extent_{};
  std::vector<double> values_;
};

/// Inclusive pixel corners: area = (x_max - x_min + 1) * (y_max - y_min + 1).
class BoundingBox {
 public:
  BoundingBox() = default;
  /// Throws degenerate_box unless x_min <= x_max and y_min <= y_max.
  BoundingBox(int x_min, int y_min, int x_max, int y_max);

  int x_min() const { return x_min_; }
  int y_min() const { return y_min_; }
  int x_max() const { return x_max_; }
  int y_max() const { return y_max_; }
  int width() const { return x_max_ - x_min_ + 1; }
  int height() const { return y_max_ - y_min_ + 1; }
  std::int64_t area() const { return static_cast<std::int64_t>(width()) * height(); }
  double center_x() const { return 0.5 * (x_min_ + x_max_); }
  double center_y() const { return 0.5 * (y_min_ + y_max_); }

  bool contains(int x, int y) const { return x >= x_min_ && x <= x_max_ && y >= y_min_ && y <= y_max_; }
  bool within(Extent extent) const {
    return x_min_ >= 0 && y_min_ >= 0 && x_max_ < extent.width && y_max_ < extent.height;
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;

 private:
  int x_min_ = 0;
  int y_min_ = 0;
  int x_max_ = 0;
  int y_max_ = 0;
};

enum class Category { easy, difficult };
enum class Mode { rgbd, rgb };

std::string to_string(Category category);
std::string to_string(Mode mode);
/// Throw invalid_config on unknown names.
Category category_from_string(const std::string& name);
Mode mode_from_string(const std::string& name);

struct Scene {
  std::string id;
  ActivationHeatmap rgb_heatmap;
  ActivationHeatmap depth_heatmap;
  DepthMap depth_map;
  std::string expression;
  BoundingBox ground_truth;
  Category category = Category::easy;

  Extent extent() const { return rgb_heatmap.extent(); }

  friend bool operator==(const Scene&, const Scene&) = default;
};

/// Returns the scene unchanged when every raster shares one extent, all
/// values lie in [0,1] and the ground truth is an in-bounds box.
const Scene& validate_scene(const Scene& scene);

}  // namespace rgbdg
