#pragma once

// Single-threaded reference versions of the data-parallel kernels. They
// produce bit-identical output to the OpenMP versions and exist for tests
// and the benchmark.

#include <span>

#include "rgbdg/clustering.hpp"
#include "rgbdg/fusion.hpp"

namespace rgbdg::serial {

ActivationHeatmap intersect(const ActivationHeatmap& h_rgb, const ActivationHeatmap& h_depth,
                            const FusionConfig& cfg = {});

ActivationHeatmap gaussian_smooth(const ActivationHeatmap& h_int, const ClusteringConfig& cfg = {});

FeatureGrid extract_features(const ActivationHeatmap& h_s, const DepthMap* depth, const ClusteringConfig& cfg = {});

void assign_nearest(std::span<const double> points, int dims, std::span<const double> centroids,
                    std::span<int> labels);

}  // namespace rgbdg::serial
