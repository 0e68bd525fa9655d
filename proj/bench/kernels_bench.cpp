// Serial reference kernels against their OpenMP counterparts on 640x480 input.

#include <benchmark/benchmark.h>

#include <random>

#include "rgbdg/clustering.hpp"
#include "rgbdg/serial.hpp"
#include "rgbdg/synth.hpp"

using namespace rgbdg;

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 480;

ActivationHeatmap noise_heatmap(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Rgb> px(static_cast<std::size_t>(kWidth) * kHeight);
  for (Rgb& p : px) p = {u(rng), u(rng), u(rng)};
  return ActivationHeatmap({kWidth, kHeight}, std::move(px));
}

struct Inputs {
  ActivationHeatmap a = noise_heatmap(1);
  ActivationHeatmap b = noise_heatmap(2);
  DepthMap depth{{kWidth, kHeight}, 0.5};
  std::vector<double> points;
  std::vector<double> centroids;

  Inputs() {
    const FeatureGrid f = extract_features(a, &depth);
    points = f.values;
    centroids.assign(points.begin(), points.begin() + 6 * 6);
  }
};

const Inputs& inputs() {
  static const Inputs in;
  return in;
}

void BM_IntersectSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(serial::intersect(inputs().a, inputs().b));
}
void BM_IntersectParallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(intersect(inputs().a, inputs().b));
}

void BM_SmoothSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(serial::gaussian_smooth(inputs().a));
}
void BM_SmoothParallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(gaussian_smooth(inputs().a));
}

void BM_FeaturesSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(serial::extract_features(inputs().a, &inputs().depth));
}
void BM_FeaturesParallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(extract_features(inputs().a, &inputs().depth));
}

void BM_AssignSerial(benchmark::State& st) {
  std::vector<int> labels(inputs().points.size() / 6);
  for (auto _ : st) {
    serial::assign_nearest(inputs().points, 6, inputs().centroids, labels);
    benchmark::DoNotOptimize(labels.data());
  }
}
void BM_AssignParallel(benchmark::State& st) {
  std::vector<int> labels(inputs().points.size() / 6);
  for (auto _ : st) {
    assign_nearest(inputs().points, 6, inputs().centroids, labels);
    benchmark::DoNotOptimize(labels.data());
  }
}

void BM_ProposeEndToEnd(benchmark::State& st) {
  const Scene scene = generate(depth_critical_preset(1, kWidth, kHeight));
  for (auto _ : st) benchmark::DoNotOptimize(propose(scene));
}

}  // namespace

BENCHMARK(BM_IntersectSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IntersectParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SmoothSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SmoothParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FeaturesSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FeaturesParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssignSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssignParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ProposeEndToEnd)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
