#include "rgbdg/clustering.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_map>

#include "detail/pixel_ops.hpp"
#include "detail/regions.hpp"

namespace rgbdg {

void ClusteringConfig::validate() const {
  if (kernel_size < 1 || kernel_size % 2 == 0) {
    throw Error(ErrorCode::invalid_kernel, "kernel_size must be odd and positive, got " + std::to_string(kernel_size));
  }
  if (!(kernel_sigma > 0.0) || !std::isfinite(kernel_sigma)) {
    throw Error(ErrorCode::invalid_kernel, "kernel_sigma must be positive");
  }
  if (!(post_smooth_active_threshold >= 0.0 && post_smooth_active_threshold <= 1.0)) {
    throw Error(ErrorCode::invalid_config, "post_smooth_active_threshold must lie in [0,1]");
  }
  if (min_cluster_area < 1) throw Error(ErrorCode::invalid_config, "min_cluster_area must be at least 1");
  if (!(w_r >= 0.0) || !(w_g >= 0.0) || std::abs(w_r + w_g - 1.0) > 1e-9) {
    throw Error(ErrorCode::invalid_config, "w_r and w_g must be non-negative and sum to 1");
  }
  if (kmeans_max_iters < 1) throw Error(ErrorCode::invalid_config, "kmeans_max_iters must be at least 1");
  if (!(kmeans_tol >= 0.0)) throw Error(ErrorCode::invalid_config, "kmeans_tol must be non-negative");
}

bool FeatureGrid::is_zero(std::size_t pixel) const {
  for (double v : at(pixel)) {
    if (v != 0.0) return false;
  }
  return true;
}

std::vector<double> gaussian_kernel(int kernel_size, double sigma) {
  if (kernel_size < 1 || kernel_size % 2 == 0) {
    throw Error(ErrorCode::invalid_kernel, "kernel_size must be odd and positive, got " + std::to_string(kernel_size));
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error(ErrorCode::invalid_kernel, "kernel_sigma must be positive");
  const int radius = kernel_size / 2;
  std::vector<double> taps(static_cast<std::size_t>(kernel_size));
  double total = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    const double v = std::exp(-(k * k) / (2.0 * sigma * sigma));
    taps[static_cast<std::size_t>(k + radius)] = v;
    total += v;
  }
  for (double& t : taps) t /= total;
  return taps;
}

// ---------------------------------------------------------------------------
// K-means

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct DistinctPoints {
  std::vector<double> values;      // distinct vectors, in order of first occurrence
  std::vector<double> weights;     // multiplicity of each distinct vector
  std::vector<std::size_t> owner;  // input point -> distinct index
};

DistinctPoints fold_duplicates(std::span<const double> points, int dims) {
  const std::size_t n = points.size() / static_cast<std::size_t>(dims);
  const auto row = [&](std::size_t i) { return points.data() + i * static_cast<std::size_t>(dims); };
  const auto hash = [&](std::size_t i) {
    std::uint64_t h = 1469598103934665603ULL;
    const double* p = row(i);
    for (int d = 0; d < dims; ++d) {
      h ^= std::bit_cast<std::uint64_t>(p[d] == 0.0 ? 0.0 : p[d]);
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h ^ (h >> 29));
  };
  const auto equal = [&](std::size_t a, std::size_t b) { return std::equal(row(a), row(a) + dims, row(b)); };
  std::unordered_map<std::size_t, std::size_t, decltype(hash), decltype(equal)> seen(64, hash, equal);

  DistinctPoints out;
  out.owner.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, inserted] = seen.try_emplace(i, out.weights.size());
    if (inserted) {
      out.values.insert(out.values.end(), row(i), row(i) + dims);
      out.weights.push_back(0.0);
    }
    out.owner[i] = it->second;
    out.weights[it->second] += 1.0;
  }
  return out;
}

double weighted_sse(const DistinctPoints& pts, int dims, std::span<const int> labels, std::span<const double> centroids) {
  double sse = 0.0;
  for (std::size_t i = 0; i < pts.weights.size(); ++i) {
    sse += pts.weights[i] * detail::squared_distance(pts.values.data() + i * static_cast<std::size_t>(dims),
                                                     centroids.data() + static_cast<std::size_t>(labels[i]) * dims,
                                                     dims);
  }
  return sse;
}

std::size_t sample_index(std::span<const double> mass, double total, double u) {
  const double target = u * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (mass[i] <= 0.0) continue;
    acc += mass[i];
    last_positive = i;
    if (acc > target) return i;
  }
  return last_positive;
}

// Greedy k-means++: each new centre is the best of several D^2-weighted draws.
std::vector<double> seed_centroids(const DistinctPoints& pts, int dims, int k, std::mt19937_64& rng) {
  const std::size_t u = pts.weights.size();
  const auto row = [&](std::size_t i) { return pts.values.data() + i * static_cast<std::size_t>(dims); };
  std::vector<double> centroids;
  centroids.reserve(static_cast<std::size_t>(k) * dims);

  const double total_weight = std::accumulate(pts.weights.begin(), pts.weights.end(), 0.0);
  std::size_t first = sample_index(pts.weights, total_weight, uniform01(rng));
  centroids.insert(centroids.end(), row(first), row(first) + dims);

  std::vector<double> closest(u);
  std::vector<double> mass(u);
  double potential = 0.0;
  for (std::size_t i = 0; i < u; ++i) {
    closest[i] = detail::squared_distance(row(i), row(first), dims);
    mass[i] = pts.weights[i] * closest[i];
    potential += mass[i];
  }

  const int trials = 2 + static_cast<int>(std::log(static_cast<double>(k)));
  std::vector<double> candidate_closest(u);
  std::vector<double> best_closest(u);
  for (int c = 1; c < k; ++c) {
    double best_potential = std::numeric_limits<double>::infinity();
    std::size_t best = 0;
    for (int t = 0; t < trials; ++t) {
      const std::size_t cand = sample_index(mass, potential, uniform01(rng));
      double cand_potential = 0.0;
      for (std::size_t i = 0; i < u; ++i) {
        candidate_closest[i] = std::min(closest[i], detail::squared_distance(row(i), row(cand), dims));
        cand_potential += pts.weights[i] * candidate_closest[i];
      }
      if (cand_potential < best_potential) {
        best_potential = cand_potential;
        best = cand;
        best_closest.swap(candidate_closest);
      }
    }
    centroids.insert(centroids.end(), row(best), row(best) + dims);
    closest.swap(best_closest);
    potential = 0.0;
    for (std::size_t i = 0; i < u; ++i) {
      mass[i] = pts.weights[i] * closest[i];
      potential += mass[i];
    }
  }
  return centroids;
}

}  // namespace

double within_cluster_sse(std::span<const double> points, int dims, std::span<const int> assignment,
                          std::span<const double> centroids) {
  double sse = 0.0;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    sse += detail::squared_distance(points.data() + i * static_cast<std::size_t>(dims),
                                    centroids.data() + static_cast<std::size_t>(assignment[i]) * dims, dims);
  }
  return sse;
}

KMeansResult kmeans(std::span<const double> points, int dims, int n, const KMeansOptions& opts) {
  if (dims < 1 || points.size() % static_cast<std::size_t>(dims) != 0) {
    throw Error(ErrorCode::invalid_config, "point buffer is not a whole number of " + std::to_string(dims) + "-vectors");
  }
  if (points.empty()) throw Error(ErrorCode::invalid_config, "kmeans needs at least one point");
  if (n < 1) throw Error(ErrorCode::invalid_config, "cluster count must be at least 1, got " + std::to_string(n));
  if (opts.max_iters < 1) throw Error(ErrorCode::invalid_config, "kmeans_max_iters must be at least 1");

  const DistinctPoints pts = fold_duplicates(points, dims);
  KMeansResult result;
  result.requested_k = n;
  result.k = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(n), pts.weights.size()));
  result.dims = dims;
  const int k = result.k;

  std::mt19937_64 rng(opts.seed);
  std::vector<double> centroids = seed_centroids(pts, dims, k, rng);
  std::vector<int> labels(pts.weights.size(), 0);
  std::vector<double> sums(centroids.size());
  std::vector<double> mass(static_cast<std::size_t>(k));

  for (int it = 0; it < opts.max_iters; ++it) {
    assign_nearest(pts.values, dims, centroids, labels);
    result.sse_history.push_back(weighted_sse(pts, dims, labels, centroids));
    ++result.iterations;

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(mass.begin(), mass.end(), 0.0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const auto c = static_cast<std::size_t>(labels[i]);
      const double w = pts.weights[i];
      mass[c] += w;
      for (int d = 0; d < dims; ++d) sums[c * dims + d] += w * pts.values[i * dims + d];
    }
    double movement = 0.0;
    for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
      if (mass[c] == 0.0) continue;  // empty cluster keeps its centre
      double shift = 0.0;
      for (int d = 0; d < dims; ++d) {
        const double next = sums[c * dims + d] / mass[c];
        const double diff = next - centroids[c * dims + d];
        shift += diff * diff;
        centroids[c * dims + d] = next;
      }
      movement = std::max(movement, std::sqrt(shift));
    }
    if (movement < opts.tol) {
      result.converged = true;
      break;
    }
  }

  // Final assignment against the final centres.
  assign_nearest(pts.values, dims, centroids, labels);
  result.sse_history.push_back(weighted_sse(pts, dims, labels, centroids));

  result.assignment.resize(pts.owner.size());
  for (std::size_t i = 0; i < pts.owner.size(); ++i) result.assignment[i] = labels[pts.owner[i]];
  result.centroids = std::move(centroids);
  return result;
}

KMeansResult kmeans(const FeatureGrid& features, int n, const ClusteringConfig& cfg) {
  return kmeans(features.values, features.dims, n,
                KMeansOptions{cfg.kmeans_seed, cfg.kmeans_max_iters, cfg.kmeans_tol});
}

// ---------------------------------------------------------------------------
// Clusters and proposals

BoundingBox covering_box(const PixelSet& pixels, Extent extent) {
  if (pixels.empty()) throw Error(ErrorCode::degenerate_box, "cannot cover an empty pixel set");
  int x0 = extent.width, y0 = extent.height, x1 = -1, y1 = -1;
  const auto w = static_cast<std::size_t>(extent.width);
  for (std::size_t i : pixels) {
    const int x = static_cast<int>(i % w);
    const int y = static_cast<int>(i / w);
    x0 = std::min(x0, x);
    y0 = std::min(y0, y);
    x1 = std::max(x1, x);
    y1 = std::max(y1, y);
  }
  return BoundingBox(x0, y0, x1, y1);
}

std::vector<Cluster> refine_clusters(std::span<const int> assignment, const FeatureGrid& features,
                                     const ClusteringConfig& cfg) {
  if (assignment.size() != features.extent.size()) {
    throw Error(ErrorCode::dimension_mismatch, "assignment covers " + std::to_string(assignment.size()) +
                                                   " pixels, feature grid " + std::to_string(features.extent.size()));
  }
  auto pieces = detail::label_regions(
      features.extent, [&](std::size_t i) { return features.is_zero(i) ? -1 : assignment[i]; }, cfg.connectivity);
  std::vector<Cluster> clusters;
  for (PixelSet& piece : pieces) {
    if (piece.size() < static_cast<std::size_t>(cfg.min_cluster_area)) continue;
    Cluster c;
    c.box = covering_box(piece, features.extent);
    c.pixels = std::move(piece);
    clusters.push_back(std::move(c));
  }
  return clusters;
}

void score_clusters(std::vector<Cluster>& clusters, const ActivationHeatmap& h_int, const ClusteringConfig& cfg) {
  const auto pixels = h_int.pixels();
  for (Cluster& c : clusters) {
    if (c.pixels.empty()) {
      c.activation = 0.0;
      continue;
    }
    double sum = 0.0;
    for (std::size_t i : c.pixels) {
      if (i >= pixels.size()) throw Error(ErrorCode::out_of_range, "cluster pixel outside the fused heatmap");
      sum += cfg.w_r * pixels[i].r + cfg.w_g * pixels[i].g;
    }
    c.activation = std::clamp(sum / static_cast<double>(c.pixels.size()), 0.0, 1.0);
  }
}

ProposalSet rank_and_box(std::vector<Cluster>& clusters, std::string scene_id, Mode mode) {
  std::stable_sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    if (a.activation != b.activation) return a.activation > b.activation;
    if (a.pixels.size() != b.pixels.size()) return a.pixels.size() > b.pixels.size();
    const std::size_t fa = a.pixels.empty() ? 0 : a.pixels.front();
    const std::size_t fb = b.pixels.empty() ? 0 : b.pixels.front();
    return fa < fb;
  });
  ProposalSet set{std::move(scene_id), mode, {}};
  set.proposals.reserve(clusters.size());
  int rank = 0;
  for (const Cluster& c : clusters) {
    set.proposals.push_back(RegionProposal{++rank, c.box, c.activation, static_cast<std::int64_t>(c.pixels.size())});
  }
  return set;
}

namespace {

void cluster_fused(PipelineTrace& trace, const std::string& scene_id, const DepthMap* depth,
                   const RegionCountConfig& region_cfg, const ClusteringConfig& cfg) {
  trace.high_activity = label_active(trace.fused, region_cfg);
  trace.region_count = count_regions(trace.high_activity, region_cfg);
  trace.smoothed = gaussian_smooth(trace.fused, cfg);
  trace.features = extract_features(trace.smoothed, depth, cfg);
  trace.proposals = ProposalSet{scene_id, cfg.mode, {}};
  if (trace.region_count < 1) return;
  trace.kmeans = kmeans(trace.features, trace.region_count, cfg);
  trace.clusters = refine_clusters(trace.kmeans.assignment, trace.features, cfg);
  score_clusters(trace.clusters, trace.fused, cfg);
  trace.proposals = rank_and_box(trace.clusters, scene_id, cfg.mode);
}

}  // namespace

PipelineTrace propose_rgbd_trace(const std::string& scene_id, const ActivationHeatmap& h_rgb,
                                 const ActivationHeatmap& h_depth, const DepthMap& depth,
                                 const FusionConfig& fusion_cfg, const RegionCountConfig& region_cfg,
                                 const ClusteringConfig& cluster_cfg) {
  ClusteringConfig cfg = cluster_cfg;
  cfg.mode = Mode::rgbd;
  cfg.validate();
  PipelineTrace trace;
  trace.fused = intersect(h_rgb, h_depth, fusion_cfg);
  cluster_fused(trace, scene_id, &depth, region_cfg, cfg);
  return trace;
}

PipelineTrace propose_rgb_trace(const std::string& scene_id, const ActivationHeatmap& h_rgb,
                                const RegionCountConfig& region_cfg, const ClusteringConfig& cluster_cfg) {
  ClusteringConfig cfg = cluster_cfg;
  cfg.mode = Mode::rgb;
  cfg.validate();
  PipelineTrace trace;
  trace.fused = h_rgb;
  cluster_fused(trace, scene_id, nullptr, region_cfg, cfg);
  return trace;
}

ProposalSet propose(const Scene& scene, const FusionConfig& fusion_cfg, const RegionCountConfig& region_cfg,
                    const ClusteringConfig& cluster_cfg) {
  validate_scene(scene);
  if (cluster_cfg.mode == Mode::rgb) {
    return propose_rgb_trace(scene.id, scene.rgb_heatmap, region_cfg, cluster_cfg).proposals;
  }
  return propose_rgbd_trace(scene.id, scene.rgb_heatmap, scene.depth_heatmap, scene.depth_map, fusion_cfg, region_cfg,
                            cluster_cfg)
      .proposals;
}

}  // namespace rgbdg
