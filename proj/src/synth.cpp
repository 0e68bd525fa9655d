#include "rgbdg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "rgbdg/scene_io.hpp"

namespace rgbdg {

namespace {

bool unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double bump(const Blob& b, double x, double y) {
  const double dx = x - b.center_x;
  const double dy = y - b.center_y;
  return b.peak * std::exp(-(dx * dx + dy * dy) / (2.0 * b.radius_sigma * b.radius_sigma));
}

void check_indices(const std::vector<int>& indices, std::size_t blob_count, const char* field) {
  for (int i : indices) {
    if (i < 0 || static_cast<std::size_t>(i) >= blob_count) {
      throw Error(ErrorCode::invalid_spec, std::string(field) + " refers to blob " + std::to_string(i) + " of " +
                                               std::to_string(blob_count));
    }
  }
}

ActivationHeatmap render_heatmap(const SynthSpec& spec, const std::vector<int>& active, std::mt19937_64& rng) {
  const Extent extent{spec.width, spec.height};
  std::vector<Rgb> pixels(extent.size());
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      double a = 0.0;
      for (int i : active) a = std::max(a, bump(spec.blobs[static_cast<std::size_t>(i)], x, y));
      pixels[extent.index(x, y)] = jet_encode(a);
    }
  }
  if (spec.noise_amplitude > 0.0) {
    for (Rgb& p : pixels) {
      for (double* c : {&p.r, &p.g, &p.b}) {
        *c = std::clamp(*c + (2.0 * uniform01(rng) - 1.0) * spec.noise_amplitude, 0.0, 1.0);
      }
    }
  }
  return ActivationHeatmap(extent, std::move(pixels));
}

}  // namespace

void SynthSpec::validate() const {
  if (width < 1 || height < 1) throw Error(ErrorCode::invalid_spec, "width and height must be positive");
  for (std::size_t i = 0; i < blobs.size(); ++i) {
    const Blob& b = blobs[i];
    const std::string name = "blobs[" + std::to_string(i) + "]";
    if (!(b.center_x >= 0.0 && b.center_x <= width - 1 && b.center_y >= 0.0 && b.center_y <= height - 1)) {
      throw Error(ErrorCode::invalid_spec, name + ".center lies outside the image");
    }
    if (!(b.radius_sigma > 0.0) || !std::isfinite(b.radius_sigma)) {
      throw Error(ErrorCode::invalid_spec, name + ".radius_sigma must be positive");
    }
    if (!unit(b.peak)) throw Error(ErrorCode::invalid_spec, name + ".peak outside [0,1]");
    if (!unit(b.depth)) throw Error(ErrorCode::invalid_spec, name + ".depth outside [0,1]");
  }
  check_indices(rgb_active_blobs, blobs.size(), "rgb_active_blobs");
  check_indices(depth_active_blobs, blobs.size(), "depth_active_blobs");
  if (target < -1 || target >= static_cast<int>(blobs.size())) {
    throw Error(ErrorCode::invalid_spec, "target refers to blob " + std::to_string(target));
  }
  if (!unit(noise_amplitude)) throw Error(ErrorCode::invalid_spec, "noise_amplitude outside [0,1]");
}

Rgb jet_encode(double activation) {
  const double a = std::clamp(activation, 0.0, 1.0);
  return Rgb{a, 1.0 - std::abs(2.0 * a - 1.0), 1.0 - a};
}

Scene generate(const SynthSpec& spec) {
  spec.validate();
  const Extent extent{spec.width, spec.height};
  std::mt19937_64 rng(spec.seed);

  Scene scene;
  scene.id = spec.id;
  scene.expression = spec.expression;
  scene.category = spec.category;
  scene.rgb_heatmap = render_heatmap(spec, spec.rgb_active_blobs, rng);
  scene.depth_heatmap = render_heatmap(spec, spec.depth_active_blobs, rng);

  std::vector<double> depth(extent.size(), 1.0);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      double best = std::numeric_limits<double>::infinity();
      for (const Blob& b : spec.blobs) {
        const double d = std::hypot(x - b.center_x, y - b.center_y) / b.radius_sigma;
        if (d <= 2.0 && d < best) {
          best = d;
          depth[extent.index(x, y)] = b.depth;
        }
      }
    }
  }
  scene.depth_map = DepthMap(extent, std::move(depth));

  if (spec.target < 0) {
    scene.ground_truth = BoundingBox(0, 0, spec.width - 1, spec.height - 1);
  } else {
    const Blob& t = spec.blobs[static_cast<std::size_t>(spec.target)];
    int x0 = spec.width, y0 = spec.height, x1 = -1, y1 = -1;
    for (int y = 0; y < spec.height; ++y) {
      for (int x = 0; x < spec.width; ++x) {
        if (bump(t, x, y) > 0.5) {
          x0 = std::min(x0, x);
          y0 = std::min(y0, y);
          x1 = std::max(x1, x);
          y1 = std::max(y1, y);
        }
      }
    }
    if (x1 < 0) throw Error(ErrorCode::invalid_spec, "target blob never exceeds activation 0.5");
    scene.ground_truth = BoundingBox(x0, y0, x1, y1);
  }
  return validate_scene(scene);
}

namespace {

SynthSpec paired_layout(std::uint64_t seed, int width, int height) {
  std::mt19937_64 rng(seed);
  const double scale = std::min(width / 320.0, height / 240.0);
  const double sigma = (14.0 + 4.0 * uniform01(rng)) * scale;
  const double gap = (5.0 + uniform01(rng)) * sigma;
  const double mid_x = width / 2.0 + (2.0 * uniform01(rng) - 1.0) * 20.0 * scale;
  const double mid_y = height / 2.0 + (2.0 * uniform01(rng) - 1.0) * 30.0 * scale;
  const bool target_left = uniform01(rng) < 0.5;
  const double near = 0.2 + 0.2 * uniform01(rng);
  const double far = 0.6 + 0.2 * uniform01(rng);

  SynthSpec spec;
  spec.width = width;
  spec.height = height;
  const Blob left{std::round(mid_x - gap / 2.0), std::round(mid_y), sigma, 1.0, target_left ? near : far};
  const Blob right{std::round(mid_x + gap / 2.0), std::round(mid_y), sigma, 1.0, target_left ? far : near};
  spec.blobs = {left, right};
  spec.target = target_left ? 0 : 1;
  spec.noise_amplitude = 0.02;
  spec.seed = seed;
  return spec;
}

}  // namespace

SynthSpec depth_critical_preset(std::uint64_t seed, int width, int height) {
  SynthSpec spec = paired_layout(seed, width, height);
  spec.id = "depth-critical-" + std::to_string(seed);
  spec.rgb_active_blobs = {0, 1};
  spec.depth_active_blobs = {spec.target};
  spec.expression = "the mug next to the books";
  spec.category = Category::difficult;
  return spec;
}

SynthSpec easy_preset(std::uint64_t seed, int width, int height) {
  SynthSpec spec = paired_layout(seed, width, height);
  spec.id = "easy-" + std::to_string(seed);
  spec.rgb_active_blobs = {spec.target};
  spec.depth_active_blobs = {0, 1};
  spec.expression = spec.target == 0 ? "the mug on the left" : "the mug on the right";
  spec.category = Category::easy;
  return spec;
}

Image8 to_image(const ActivationHeatmap& heatmap) {
  Image8 img{heatmap.extent(), std::vector<std::uint8_t>(3 * heatmap.extent().size())};
  std::size_t o = 0;
  for (const Rgb& p : heatmap.pixels()) {
    for (double c : {p.r, p.g, p.b}) img.rgb[o++] = static_cast<std::uint8_t>(std::lround(c * 255.0));
  }
  return img;
}

void draw_box(Image8& image, const BoundingBox& box, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  auto put = [&](int x, int y) {
    if (!image.extent.contains(x, y)) return;
    std::uint8_t* p = image.pixel(x, y);
    p[0] = r;
    p[1] = g;
    p[2] = b;
  };
  for (int x = box.x_min(); x <= box.x_max(); ++x) {
    put(x, box.y_min());
    put(x, box.y_max());
  }
  for (int y = box.y_min(); y <= box.y_max(); ++y) {
    put(box.x_min(), y);
    put(box.x_max(), y);
  }
}

Image8 render_overlay_image(const Scene& scene, const ProposalSet& proposals, const FusionConfig& fusion_cfg) {
  validate_scene(scene);
  if (!proposals.scene_id.empty() && proposals.scene_id != scene.id) {
    throw Error(ErrorCode::invalid_config,
                "proposals belong to scene '" + proposals.scene_id + "', not '" + scene.id + "'");
  }
  Image8 img = to_image(proposals.mode == Mode::rgb ? scene.rgb_heatmap
                                                    : intersect(scene.rgb_heatmap, scene.depth_heatmap, fusion_cfg));
  draw_box(img, scene.ground_truth, 255, 0, 0);
  for (auto it = proposals.proposals.rbegin(); it != proposals.proposals.rend(); ++it) {
    if (!it->box.within(scene.extent())) {
      throw Error(ErrorCode::out_of_range, "proposal rank " + std::to_string(it->rank) + " lies outside the image");
    }
    draw_box(img, it->box, 0, 255, 0);
  }
  return img;
}

void render_overlay(const Scene& scene, const ProposalSet& proposals, const std::filesystem::path& path,
                    const FusionConfig& fusion_cfg) {
  write_ppm(render_overlay_image(scene, proposals, fusion_cfg), path);
}

}  // namespace rgbdg
