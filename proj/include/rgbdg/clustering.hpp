#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rgbdg/fusion.hpp"
#include "rgbdg/scene.hpp"
#include "rgbdg/segmentation.hpp"

namespace rgbdg {

/// Which channels decide whether a smoothed pixel carries features.
/// red_blue is the literal wording of the original method description and
/// marks most of the background active, so it is only useful for ablations.
enum class FeatureActivity { red_green, red_blue };

struct ClusteringConfig {
  int kernel_size = 11;
  double kernel_sigma = 2.0;
  double post_smooth_active_threshold = 0.5;
  FeatureActivity feature_activity = FeatureActivity::red_green;
  int min_cluster_area = 150;
  double w_r = 0.7;
  double w_g = 0.3;
  std::uint64_t kmeans_seed = 42;
  int kmeans_max_iters = 300;
  double kmeans_tol = 1e-4;
  Mode mode = Mode::rgbd;
  Connectivity connectivity = Connectivity::eight;

  void validate() const;
};

/// Per-pixel feature vectors, row-major, `dims` values per pixel:
/// (x, y, depth, r, g, b) in rgbd mode and (x, y, r, g, b) in rgb mode.
struct FeatureGrid {
  Extent extent{};
  int dims = 6;
  std::vector<double> values;

  std::span<const double> at(std::size_t pixel) const {
    return std::span<const double>(values).subspan(pixel * static_cast<std::size_t>(dims),
                                                   static_cast<std::size_t>(dims));
  }
  bool is_zero(std::size_t pixel) const;
};

inline int feature_dims(Mode mode) { return mode == Mode::rgbd ? 6 : 5; }

/// Normalized Gaussian taps of length kernel_size. Throws invalid_kernel for
/// even or non-positive sizes and non-positive sigma.
std::vector<double> gaussian_kernel(int kernel_size, double sigma);

/// Separable Gaussian blur of each channel with symmetric (half-sample)
/// reflection at the borders, output clamped to [0,1].
ActivationHeatmap gaussian_smooth(const ActivationHeatmap& h_int, const ClusteringConfig& cfg = {});

/// `depth` is required in rgbd mode and ignored in rgb mode.
FeatureGrid extract_features(const ActivationHeatmap& h_s, const DepthMap* depth, const ClusteringConfig& cfg = {});

struct KMeansOptions {
  std::uint64_t seed = 42;
  int max_iters = 300;
  double tol = 1e-4;
};

struct KMeansResult {
  int requested_k = 0;
  /// Lower than requested_k when the input has fewer distinct vectors.
  int k = 0;
  int dims = 0;
  std::vector<int> assignment;
  std::vector<double> centroids;  // k * dims
  /// Within-cluster sum of squares after every assignment step.
  std::vector<double> sse_history;
  int iterations = 0;
  bool converged = false;

  double sse() const { return sse_history.empty() ? 0.0 : sse_history.back(); }
};

/// Lloyd's algorithm with greedy k-means++ seeding over the distinct input
/// vectors (duplicates are folded into weights, which leaves the objective
/// unchanged). Euclidean distance; ties go to the lowest centroid index.
KMeansResult kmeans(std::span<const double> points, int dims, int n, const KMeansOptions& opts = {});
KMeansResult kmeans(const FeatureGrid& features, int n, const ClusteringConfig& cfg = {});

/// Writes the index of the nearest centroid for every point; the first
/// centroid wins ties. Points are processed in parallel.
void assign_nearest(std::span<const double> points, int dims, std::span<const double> centroids,
                    std::span<int> labels);

/// Sum over points of squared distance to the assigned centroid.
double within_cluster_sse(std::span<const double> points, int dims, std::span<const int> assignment,
                          std::span<const double> centroids);

struct Cluster {
  PixelSet pixels;  // ascending row-major indices
  double activation = 0.0;
  BoundingBox box;
};

/// Minimal inclusive box covering a non-empty pixel set.
BoundingBox covering_box(const PixelSet& pixels, Extent extent);

/// Splits every K-means cluster into connected pieces, dropping zero-feature
/// (background) pixels and pieces smaller than min_cluster_area. Clusters come
/// back ordered by their smallest pixel index.
std::vector<Cluster> refine_clusters(std::span<const int> assignment, const FeatureGrid& features,
                                     const ClusteringConfig& cfg = {});

/// Mean of w_r * r + w_g * g over each cluster, read from the fused heatmap.
void score_clusters(std::vector<Cluster>& clusters, const ActivationHeatmap& h_int, const ClusteringConfig& cfg = {});

struct RegionProposal {
  int rank = 0;
  BoundingBox box;
  double activation = 0.0;
  std::int64_t pixel_count = 0;

  friend bool operator==(const RegionProposal&, const RegionProposal&) = default;
};

struct ProposalSet {
  std::string scene_id;
  Mode mode = Mode::rgbd;
  std::vector<RegionProposal> proposals;  // rank order

  friend bool operator==(const ProposalSet&, const ProposalSet&) = default;
};

/// Sorts by activation (descending), then size (descending), then smallest
/// pixel index, and assigns ranks 1..k. `clusters` is reordered in place.
ProposalSet rank_and_box(std::vector<Cluster>& clusters, std::string scene_id = {}, Mode mode = Mode::rgbd);

/// Every intermediate product of one pipeline run.
struct PipelineTrace {
  ActivationHeatmap fused;  // H_int, or the RGB heatmap in rgb mode
  BinaryMask high_activity;
  int region_count = 0;
  ActivationHeatmap smoothed;
  FeatureGrid features;
  KMeansResult kmeans;
  std::vector<Cluster> clusters;  // ranked
  ProposalSet proposals;
};

PipelineTrace propose_rgbd_trace(const std::string& scene_id, const ActivationHeatmap& h_rgb,
                                 const ActivationHeatmap& h_depth, const DepthMap& depth,
                                 const FusionConfig& fusion_cfg, const RegionCountConfig& region_cfg,
                                 const ClusteringConfig& cluster_cfg);
PipelineTrace propose_rgb_trace(const std::string& scene_id, const ActivationHeatmap& h_rgb,
                                const RegionCountConfig& region_cfg, const ClusteringConfig& cluster_cfg);

/// Candidate boxes for a scene, best first. The mode comes from cluster_cfg.
/// An empty set means no cluster survived filtering.
ProposalSet propose(const Scene& scene, const FusionConfig& fusion_cfg = {}, const RegionCountConfig& region_cfg = {},
                    const ClusteringConfig& cluster_cfg = {});

}  // namespace rgbdg
