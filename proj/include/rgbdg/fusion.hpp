#pragma once

#include "rgbdg/scene.hpp"

namespace rgbdg {

struct FusionConfig {
  /// A pixel is active when max(r, g) is strictly above this.
  double t_rgb = 0.39;

  void validate() const;
};

/// Activity rule shared by fusion: red or green strictly above the threshold.
inline bool is_active(const Rgb& p, double threshold) { return (p.r > threshold) || (p.g > threshold); }

/// Intersection heatmap of the RGB and depth activations. Pixels active in
/// both inputs take the channel-wise mean; every other pixel is (0, 0, 1).
/// Rows are processed in parallel; the output does not depend on thread count.
ActivationHeatmap intersect(const ActivationHeatmap& h_rgb, const ActivationHeatmap& h_depth,
                            const FusionConfig& cfg = {});

}  // namespace rgbdg
