#pragma once

// Per-row bodies shared by the OpenMP kernels and their serial references so
// both paths compute identical values.

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "rgbdg/clustering.hpp"
#include "rgbdg/fusion.hpp"

namespace rgbdg::detail {

inline Rgb fuse_pixel(const Rgb& a, const Rgb& b, double t_rgb) {
  if (!is_active(a, t_rgb) || !is_active(b, t_rgb)) return kInactive;
  return Rgb{0.5 * (a.r + b.r), 0.5 * (a.g + b.g), 0.5 * (a.b + b.b)};
}

inline void fuse_row(std::span<const Rgb> a, std::span<const Rgb> b, std::span<Rgb> out, double t_rgb) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fuse_pixel(a[i], b[i], t_rgb);
}

/// Half-sample symmetric reflection: ... c b a | a b c ... | c b a ...
inline int reflect_index(int i, int n) {
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

/// Horizontal pass for row y: src and dst are full images.
inline void blur_row_horizontal(const ActivationHeatmap& src, std::vector<Rgb>& dst, int y,
                                std::span<const double> taps) {
  const int w = src.width();
  const int radius = static_cast<int>(taps.size() / 2);
  const Rgb* row = &src.at(0, y);
  Rgb* out = dst.data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(w);
  for (int x = 0; x < w; ++x) {
    double r = 0.0, g = 0.0, b = 0.0;
    for (int k = -radius; k <= radius; ++k) {
      const Rgb& p = row[reflect_index(x + k, w)];
      const double t = taps[static_cast<std::size_t>(k + radius)];
      r += t * p.r;
      g += t * p.g;
      b += t * p.b;
    }
    out[x] = Rgb{r, g, b};
  }
}

inline double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

/// Vertical pass for row y reading the horizontally blurred buffer.
inline void blur_row_vertical(const std::vector<Rgb>& src, ActivationHeatmap& dst, int y,
                              std::span<const double> taps) {
  const int w = dst.width();
  const int h = dst.height();
  const int radius = static_cast<int>(taps.size() / 2);
  for (int x = 0; x < w; ++x) {
    double r = 0.0, g = 0.0, b = 0.0;
    for (int k = -radius; k <= radius; ++k) {
      const Rgb& p = src[static_cast<std::size_t>(reflect_index(y + k, h)) * static_cast<std::size_t>(w) +
                         static_cast<std::size_t>(x)];
      const double t = taps[static_cast<std::size_t>(k + radius)];
      r += t * p.r;
      g += t * p.g;
      b += t * p.b;
    }
    dst.at(x, y) = Rgb{clamp_unit(r), clamp_unit(g), clamp_unit(b)};
  }
}

inline bool feature_active(const Rgb& p, const ClusteringConfig& cfg) {
  const double t = cfg.post_smooth_active_threshold;
  if (cfg.feature_activity == FeatureActivity::red_blue) return p.r > t || p.b > t;
  return p.r > t || p.g > t;
}

inline void feature_row(const ActivationHeatmap& h_s, const DepthMap* depth, const ClusteringConfig& cfg,
                        FeatureGrid& out, int y) {
  const int w = h_s.width();
  const int h = h_s.height();
  const double sx = w > 1 ? 1.0 / (w - 1) : 0.0;
  const double sy = h > 1 ? 1.0 / (h - 1) : 0.0;
  const bool with_depth = out.dims == 6;
  for (int x = 0; x < w; ++x) {
    double* f = out.values.data() + h_s.extent().index(x, y) * static_cast<std::size_t>(out.dims);
    const Rgb& p = h_s.at(x, y);
    if (!feature_active(p, cfg)) {
      std::fill(f, f + out.dims, 0.0);
      continue;
    }
    int d = 0;
    f[d++] = x * sx;
    f[d++] = y * sy;
    if (with_depth) f[d++] = depth->at(x, y);
    f[d++] = p.r;
    f[d++] = p.g;
    f[d++] = p.b;
  }
}

inline double squared_distance(const double* a, const double* b, int dims) {
  double s = 0.0;
  for (int d = 0; d < dims; ++d) {
    const double diff = a[d] - b[d];
    s += diff * diff;
  }
  return s;
}

inline int nearest_centroid(const double* point, const double* centroids, int k, int dims) {
  int best = 0;
  double best_d = squared_distance(point, centroids, dims);
  for (int c = 1; c < k; ++c) {
    const double d = squared_distance(point, centroids + static_cast<std::ptrdiff_t>(c) * dims, dims);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

}  // namespace rgbdg::detail
