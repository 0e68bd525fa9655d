#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "rgbdg/clustering.hpp"
#include "rgbdg/serial.hpp"

using namespace rgbdg;

TEST_CASE("parallel kernels reproduce the serial reference bit for bit") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::pair<int, int> sizes[] = {{1, 1}, {7, 3}, {64, 48}, {321, 17}, {640, 480}};
  for (auto [w, h] : sizes) {
    const auto a = oracle::random_heatmap(rng, w, h);
    const auto b = oracle::random_heatmap(rng, w, h);
    std::vector<double> dv(static_cast<std::size_t>(w) * h);
    for (double& v : dv) v = u(rng);
    const DepthMap d({w, h}, dv);

    const auto fused = intersect(a, b);
    CHECK(fused == serial::intersect(a, b));
    const auto smooth = gaussian_smooth(a);
    CHECK(smooth == serial::gaussian_smooth(a));
    for (Mode mode : {Mode::rgbd, Mode::rgb}) {
      ClusteringConfig cfg;
      cfg.mode = mode;
      const DepthMap* dp = mode == Mode::rgbd ? &d : nullptr;
      CHECK(extract_features(smooth, dp, cfg).values == serial::extract_features(smooth, dp, cfg).values);
    }
  }
}
