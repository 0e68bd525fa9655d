#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rgbdg/scene.hpp"

namespace rgbdg {

enum class Connectivity { four = 4, eight = 8 };

class BinaryMask {
 public:
  BinaryMask() = default;
  explicit BinaryMask(Extent extent) : extent_(extent), labels_(extent.size(), 0) {}
  BinaryMask(Extent extent, std::vector<std::uint8_t> labels);

  Extent extent() const { return extent_; }
  int width() const { return extent_.width; }
  int height() const { return extent_.height; }
  bool at(int x, int y) const { return labels_[extent_.index(x, y)] != 0; }
  void set(int x, int y, bool on) { labels_[extent_.index(x, y)] = on ? 1 : 0; }
  std::span<const std::uint8_t> labels() const { return labels_; }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  Extent extent_{};
  std::vector<std::uint8_t> labels_;
};

struct RegionCountConfig {
  double high_activity_threshold = 0.9;
  /// Regions with strictly fewer pixels are discarded.
  int min_region_area = 150;
  bool count_background = true;
  Connectivity connectivity = Connectivity::eight;

  void validate() const;
};

/// A set of row-major pixel indices, sorted ascending.
using PixelSet = std::vector<std::size_t>;

BinaryMask label_active(const ActivationHeatmap& h_int, const RegionCountConfig& cfg = {});

/// Maximal connected components of the set pixels, each sorted ascending and
/// the list ordered by each component's smallest index.
std::vector<PixelSet> connected_components(const BinaryMask& mask, Connectivity connectivity = Connectivity::eight);

/// Components of at least min_region_area pixels, plus one for the background
/// when enabled. Never below 1 when the background is counted.
int count_regions(const BinaryMask& mask, const RegionCountConfig& cfg = {});

}  // namespace rgbdg
