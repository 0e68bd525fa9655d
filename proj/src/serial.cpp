#include "rgbdg/serial.hpp"

#include "detail/checks.hpp"
#include "detail/pixel_ops.hpp"

namespace rgbdg::serial {

ActivationHeatmap intersect(const ActivationHeatmap& h_rgb, const ActivationHeatmap& h_depth, const FusionConfig& cfg) {
  cfg.validate();
  detail::require_same_extent(h_rgb.extent(), h_depth.extent(), "rgb heatmap", "depth heatmap");
  ActivationHeatmap out(h_rgb.extent());
  detail::fuse_row(h_rgb.pixels(), h_depth.pixels(), out.pixels(), cfg.t_rgb);
  return out;
}

ActivationHeatmap gaussian_smooth(const ActivationHeatmap& h_int, const ClusteringConfig& cfg) {
  const std::vector<double> taps = gaussian_kernel(cfg.kernel_size, cfg.kernel_sigma);
  std::vector<Rgb> tmp(h_int.extent().size());
  ActivationHeatmap out(h_int.extent());
  for (int y = 0; y < h_int.height(); ++y) detail::blur_row_horizontal(h_int, tmp, y, taps);
  for (int y = 0; y < h_int.height(); ++y) detail::blur_row_vertical(tmp, out, y, taps);
  return out;
}

FeatureGrid extract_features(const ActivationHeatmap& h_s, const DepthMap* depth, const ClusteringConfig& cfg) {
  FeatureGrid out = detail::make_feature_grid(h_s, depth, cfg);
  for (int y = 0; y < h_s.height(); ++y) detail::feature_row(h_s, depth, cfg, out, y);
  return out;
}

void assign_nearest(std::span<const double> points, int dims, std::span<const double> centroids,
                    std::span<int> labels) {
  const int k = static_cast<int>(centroids.size() / static_cast<std::size_t>(dims));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    labels[i] = detail::nearest_centroid(points.data() + i * static_cast<std::size_t>(dims), centroids.data(), k, dims);
  }
}

}  // namespace rgbdg::serial
