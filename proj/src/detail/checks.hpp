#pragma once

#include <string>

#include "rgbdg/clustering.hpp"

namespace rgbdg::detail {

inline void require_same_extent(Extent a, Extent b, const char* a_name, const char* b_name) {
  if (a != b) {
    throw Error(ErrorCode::dimension_mismatch, std::string(a_name) + " is " + std::to_string(a.width) + "x" +
                                                   std::to_string(a.height) + " but " + b_name + " is " +
                                                   std::to_string(b.width) + "x" + std::to_string(b.height));
  }
}

inline FeatureGrid make_feature_grid(const ActivationHeatmap& h_s, const DepthMap* depth, const ClusteringConfig& cfg) {
  FeatureGrid out;
  out.extent = h_s.extent();
  out.dims = feature_dims(cfg.mode);
  if (cfg.mode == Mode::rgbd) {
    if (depth == nullptr) throw Error(ErrorCode::invalid_config, "rgbd features need a depth map");
    require_same_extent(h_s.extent(), depth->extent(), "smoothed heatmap", "depth map");
  }
  out.values.assign(out.extent.size() * static_cast<std::size_t>(out.dims), 0.0);
  return out;
}

}  // namespace rgbdg::detail
