#include "rgbdg/segmentation.hpp"

#include "detail/regions.hpp"

namespace rgbdg {

BinaryMask::BinaryMask(Extent extent, std::vector<std::uint8_t> labels) : extent_(extent), labels_(std::move(labels)) {
  if (labels_.size() != extent.size()) {
    throw Error(ErrorCode::dimension_mismatch, "mask holds " + std::to_string(labels_.size()) + " labels for a " +
                                                   std::to_string(extent.width) + "x" + std::to_string(extent.height) +
                                                   " grid");
  }
  for (auto& v : labels_) v = v != 0 ? 1 : 0;
}

void RegionCountConfig::validate() const {
  if (!(high_activity_threshold >= 0.0 && high_activity_threshold <= 1.0)) {
    throw Error(ErrorCode::invalid_config, "high_activity_threshold must lie in [0,1]");
  }
  if (min_region_area < 1) throw Error(ErrorCode::invalid_config, "min_region_area must be at least 1");
}

BinaryMask label_active(const ActivationHeatmap& h_int, const RegionCountConfig& cfg) {
  cfg.validate();
  std::vector<std::uint8_t> labels(h_int.extent().size());
  const auto pixels = h_int.pixels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    labels[i] = (pixels[i].r > cfg.high_activity_threshold || pixels[i].g > cfg.high_activity_threshold) ? 1 : 0;
  }
  return BinaryMask(h_int.extent(), std::move(labels));
}

std::vector<PixelSet> connected_components(const BinaryMask& mask, Connectivity connectivity) {
  const auto labels = mask.labels();
  return detail::label_regions(
      mask.extent(), [&](std::size_t i) { return labels[i] != 0 ? 0 : -1; }, connectivity);
}

int count_regions(const BinaryMask& mask, const RegionCountConfig& cfg) {
  cfg.validate();
  int n = 0;
  for (const PixelSet& c : connected_components(mask, cfg.connectivity)) {
    if (c.size() >= static_cast<std::size_t>(cfg.min_region_area)) ++n;
  }
  return n + (cfg.count_background ? 1 : 0);
}

}  // namespace rgbdg
