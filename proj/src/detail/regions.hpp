#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "rgbdg/segmentation.hpp"

namespace rgbdg::detail {

/// Two-pass raster labelling with union-find. `class_of(i)` returns the
/// class of pixel i, or a negative value for pixels that belong to no region;
/// neighbours join only when they share a class. Components are returned in
/// order of their smallest pixel index, each sorted ascending.
template <typename ClassOf>
std::vector<PixelSet> label_regions(Extent extent, ClassOf class_of, Connectivity connectivity) {
  const int w = extent.width;
  const int h = extent.height;
  constexpr std::uint32_t kNone = 0;
  std::vector<std::uint32_t> label(extent.size(), kNone);
  std::vector<int> cls(extent.size());
  for (std::size_t i = 0; i < cls.size(); ++i) cls[i] = class_of(i);

  std::vector<std::uint32_t> parent{0};
  auto find = [&](std::uint32_t a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  };
  auto unite = [&](std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return a;
    if (b < a) std::swap(a, b);
    parent[b] = a;
    return a;
  };

  const bool eight = connectivity == Connectivity::eight;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = extent.index(x, y);
      const int c = cls[i];
      if (c < 0) continue;
      std::uint32_t current = kNone;
      auto visit = [&](int nx, int ny) {
        if (!extent.contains(nx, ny)) return;
        const std::size_t j = extent.index(nx, ny);
        if (cls[j] != c) return;
        current = current == kNone ? find(label[j]) : unite(current, label[j]);
      };
      visit(x - 1, y);
      visit(x, y - 1);
      if (eight) {
        visit(x - 1, y - 1);
        visit(x + 1, y - 1);
      }
      if (current == kNone) {
        current = static_cast<std::uint32_t>(parent.size());
        parent.push_back(current);
      }
      label[i] = current;
    }
  }

  std::vector<std::int64_t> slot(parent.size(), -1);
  std::vector<PixelSet> components;
  for (std::size_t i = 0; i < label.size(); ++i) {
    if (label[i] == kNone) continue;
    const std::uint32_t root = find(label[i]);
    if (slot[root] < 0) {
      slot[root] = static_cast<std::int64_t>(components.size());
      components.emplace_back();
    }
    components[static_cast<std::size_t>(slot[root])].push_back(i);
  }
  return components;
}

}  // namespace rgbdg::detail
