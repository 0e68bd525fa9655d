// OpenMP kernels. Each parallel loop writes disjoint output rows or points,
// so results are independent of the thread count.

#include <cmath>

#include "detail/checks.hpp"
#include "detail/pixel_ops.hpp"
#include "rgbdg/clustering.hpp"
#include "rgbdg/fusion.hpp"

namespace rgbdg {

void FusionConfig::validate() const {
  if (!(t_rgb >= 0.0 && t_rgb <= 1.0)) {
    throw Error(ErrorCode::invalid_config, "t_rgb must lie in [0,1], got " + std::to_string(t_rgb));
  }
}

ActivationHeatmap intersect(const ActivationHeatmap& h_rgb, const ActivationHeatmap& h_depth, const FusionConfig& cfg) {
  cfg.validate();
  detail::require_same_extent(h_rgb.extent(), h_depth.extent(), "rgb heatmap", "depth heatmap");
  ActivationHeatmap out(h_rgb.extent());
  const int h = h_rgb.height();
  const auto w = static_cast<std::size_t>(h_rgb.width());
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    const std::size_t off = static_cast<std::size_t>(y) * w;
    detail::fuse_row(h_rgb.pixels().subspan(off, w), h_depth.pixels().subspan(off, w), out.pixels().subspan(off, w),
                     cfg.t_rgb);
  }
  return out;
}

ActivationHeatmap gaussian_smooth(const ActivationHeatmap& h_int, const ClusteringConfig& cfg) {
  const std::vector<double> taps = gaussian_kernel(cfg.kernel_size, cfg.kernel_sigma);
  const int h = h_int.height();
  std::vector<Rgb> tmp(h_int.extent().size());
  ActivationHeatmap out(h_int.extent());
#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (int y = 0; y < h; ++y) detail::blur_row_horizontal(h_int, tmp, y, taps);
#pragma omp for schedule(static)
    for (int y = 0; y < h; ++y) detail::blur_row_vertical(tmp, out, y, taps);
  }
  return out;
}

FeatureGrid extract_features(const ActivationHeatmap& h_s, const DepthMap* depth, const ClusteringConfig& cfg) {
  FeatureGrid out = detail::make_feature_grid(h_s, depth, cfg);
  const int h = h_s.height();
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) detail::feature_row(h_s, depth, cfg, out, y);
  return out;
}

void assign_nearest(std::span<const double> points, int dims, std::span<const double> centroids,
                    std::span<int> labels) {
  const auto n = static_cast<std::ptrdiff_t>(labels.size());
  const int k = static_cast<int>(centroids.size() / static_cast<std::size_t>(dims));
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    labels[static_cast<std::size_t>(i)] = detail::nearest_centroid(points.data() + i * dims, centroids.data(), k, dims);
  }
}

}  // namespace rgbdg
