#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rgbdg/clustering.hpp"
#include "rgbdg/fusion.hpp"
#include "rgbdg/scene.hpp"

namespace rgbdg {

/// Isotropic Gaussian bump: activation = peak * exp(-d^2 / (2 sigma^2)).
struct Blob {
  double center_x = 0.0;
  double center_y = 0.0;
  double radius_sigma = 10.0;
  double peak = 1.0;
  double depth = 0.5;
};

struct SynthSpec {
  std::string id = "synth";
  int width = 320;
  int height = 240;
  std::vector<Blob> blobs;
  std::vector<int> rgb_active_blobs;
  std::vector<int> depth_active_blobs;
  /// Blob whose region defines the ground truth; -1 means the whole frame.
  int target = -1;
  double noise_amplitude = 0.0;
  std::uint64_t seed = 0;
  std::string expression;
  Category category = Category::easy;

  /// Throws invalid_spec.
  void validate() const;
};

/// (a, 1 - |2a - 1|, 1 - a): blue for 0, green for 0.5, red for 1.
Rgb jet_encode(double activation);

/// Deterministic: the same SynthSpec always yields the same scene.
///
/// Each heatmap is the jet encoding of the maximum over its active blobs,
/// plus uniform noise in [-noise_amplitude, noise_amplitude] per channel,
/// clamped to [0,1]. A pixel's depth is that of the blob it lies closest to
/// in units of sigma, provided it is within two sigma; otherwise 1.0. The
/// ground truth is the minimal box around the target blob's own activation
/// above 0.5.
Scene generate(const SynthSpec& spec);

/// Two identical blobs side by side. Both light up the RGB heatmap; only the
/// target lights up the depth heatmap, so depth is what disambiguates them.
SynthSpec depth_critical_preset(std::uint64_t seed, int width = 320, int height = 240);

/// Same layout, but the RGB heatmap already singles out the target while the
/// depth heatmap lights up both.
SynthSpec easy_preset(std::uint64_t seed, int width = 320, int height = 240);

/// 8-bit interleaved RGB raster.
struct Image8 {
  Extent extent{};
  std::vector<std::uint8_t> rgb;

  std::uint8_t* pixel(int x, int y) { return rgb.data() + 3 * extent.index(x, y); }
  const std::uint8_t* pixel(int x, int y) const { return rgb.data() + 3 * extent.index(x, y); }
};

/// round(v * 255) per channel.
Image8 to_image(const ActivationHeatmap& heatmap);

/// Outlines a box with 1-pixel strokes.
void draw_box(Image8& image, const BoundingBox& box, std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// Fused heatmap (or the RGB heatmap for rgb-mode proposals) with the ground
/// truth in red and candidates in green, rank 1 drawn last.
Image8 render_overlay_image(const Scene& scene, const ProposalSet& proposals, const FusionConfig& fusion_cfg = {});
void render_overlay(const Scene& scene, const ProposalSet& proposals, const std::filesystem::path& path,
                    const FusionConfig& fusion_cfg = {});

}  // namespace rgbdg
