#pragma once

// Brute-force reference computations used only by tests. None of these call
// into the library code paths they are compared against.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "rgbdg/scene.hpp"

namespace oracle {

/// Scalar restatement of the fusion rule.
inline rgbdg::Rgb fuse(const rgbdg::Rgb& a, const rgbdg::Rgb& b, double t) {
  const bool a_on = std::max(a.r, a.g) > t;
  const bool b_on = std::max(b.r, b.g) > t;
  if (!(a_on && b_on)) return {0.0, 0.0, 1.0};
  return {(a.r + b.r) / 2.0, (a.g + b.g) / 2.0, (a.b + b.b) / 2.0};
}

/// Stack-based flood fill; returns components as sets, in discovery order.
inline std::vector<std::set<std::size_t>> flood_fill(int w, int h, const std::vector<std::uint8_t>& on, bool eight) {
  std::vector<int> seen(on.size(), 0);
  std::vector<std::set<std::size_t>> comps;
  for (int y0 = 0; y0 < h; ++y0) {
    for (int x0 = 0; x0 < w; ++x0) {
      const std::size_t s = static_cast<std::size_t>(y0) * w + x0;
      if (!on[s] || seen[s]) continue;
      std::set<std::size_t> comp;
      std::vector<std::pair<int, int>> stack{{x0, y0}};
      seen[s] = 1;
      while (!stack.empty()) {
        auto [x, y] = stack.back();
        stack.pop_back();
        comp.insert(static_cast<std::size_t>(y) * w + x);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            if (!eight && dx != 0 && dy != 0) continue;
            const int nx = x + dx, ny = y + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
            if (on[j] && !seen[j]) {
              seen[j] = 1;
              stack.emplace_back(nx, ny);
            }
          }
        }
      }
      comps.push_back(std::move(comp));
    }
  }
  return comps;
}

/// Direct 2-D convolution with the outer-product Gaussian, no border handling:
/// only valid where the full window fits inside the image.
inline rgbdg::Rgb direct_gaussian(const rgbdg::ActivationHeatmap& img, int x, int y, int size, double sigma) {
  const int r = size / 2;
  double total = 0.0;
  double acc[3] = {0, 0, 0};
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      const double wgt = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
      total += wgt;
      const rgbdg::Rgb& p = img.at(x + dx, y + dy);
      acc[0] += wgt * p.r;
      acc[1] += wgt * p.g;
      acc[2] += wgt * p.b;
    }
  }
  return {acc[0] / total, acc[1] / total, acc[2] / total};
}

inline double direct_center_weight(int size, double sigma) {
  const int r = size / 2;
  double total = 0.0;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx) total += std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
  return 1.0 / total;
}

/// Best SSE over every split of the points into two non-empty groups.
inline double best_two_partition_sse(const std::vector<std::vector<double>>& pts) {
  const std::size_t n = pts.size();
  const std::size_t dims = pts.front().size();
  double best = INFINITY;
  for (std::uint32_t mask = 1; mask < (1u << n) - 1; ++mask) {
    if (mask & 1u) continue;  // fix point 0 in group B to skip mirrored splits
    double sse = 0.0;
    for (int g = 0; g < 2; ++g) {
      std::vector<double> mean(dims, 0.0);
      int count = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (((mask >> i) & 1u) != static_cast<unsigned>(g)) continue;
        for (std::size_t d = 0; d < dims; ++d) mean[d] += pts[i][d];
        ++count;
      }
      for (double& m : mean) m /= count;
      for (std::size_t i = 0; i < n; ++i) {
        if (((mask >> i) & 1u) != static_cast<unsigned>(g)) continue;
        for (std::size_t d = 0; d < dims; ++d) sse += (pts[i][d] - mean[d]) * (pts[i][d] - mean[d]);
      }
    }
    best = std::min(best, sse);
  }
  return best;
}

/// IoU by counting pixels on a raster covering both boxes.
inline double pixel_iou(const rgbdg::BoundingBox& a, const rgbdg::BoundingBox& b) {
  const int x0 = std::min(a.x_min(), b.x_min()), x1 = std::max(a.x_max(), b.x_max());
  const int y0 = std::min(a.y_min(), b.y_min()), y1 = std::max(a.y_max(), b.y_max());
  long inter = 0, uni = 0;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const bool in_a = a.contains(x, y), in_b = b.contains(x, y);
      inter += in_a && in_b;
      uni += in_a || in_b;
    }
  }
  return static_cast<double>(inter) / static_cast<double>(uni);
}

/// Pixels on the outline of an inclusive box.
inline std::set<std::pair<int, int>> perimeter(const rgbdg::BoundingBox& b) {
  std::set<std::pair<int, int>> out;
  for (int y = b.y_min(); y <= b.y_max(); ++y) {
    for (int x = b.x_min(); x <= b.x_max(); ++x) {
      if (x == b.x_min() || x == b.x_max() || y == b.y_min() || y == b.y_max()) out.emplace(x, y);
    }
  }
  return out;
}

inline rgbdg::ActivationHeatmap random_heatmap(std::mt19937_64& rng, int w, int h) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<rgbdg::Rgb> px(static_cast<std::size_t>(w) * h);
  for (auto& p : px) p = {u(rng), u(rng), u(rng)};
  return rgbdg::ActivationHeatmap({w, h}, std::move(px));
}

inline rgbdg::BoundingBox random_box(std::mt19937_64& rng, int frame) {
  std::uniform_int_distribution<int> c(0, frame - 1);
  const int xa = c(rng), xb = c(rng), ya = c(rng), yb = c(rng);
  return rgbdg::BoundingBox(std::min(xa, xb), std::min(ya, yb), std::max(xa, xb), std::max(ya, yb));
}

}  // namespace oracle
