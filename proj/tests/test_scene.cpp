#include <cmath>

#include "doctest.h"
#include "rgbdg/scene.hpp"

using namespace rgbdg;

namespace {

Scene make_scene(int w, int h) {
  Scene s;
  s.id = "s";
  s.rgb_heatmap = ActivationHeatmap({w, h});
  s.depth_heatmap = ActivationHeatmap({w, h});
  s.depth_map = DepthMap({w, h}, 0.5);
  s.ground_truth = BoundingBox(10, 10, 50, 50);
  return s;
}

}  // namespace

TEST_CASE("validate_scene accepts a consistent scene and is idempotent") {
  const Scene s = make_scene(640, 480);
  const Scene& v = validate_scene(s);
  CHECK(v == s);
  CHECK(validate_scene(validate_scene(s)) == s);
}

TEST_CASE("validate_scene rejects mismatched rasters") {
  Scene s = make_scene(640, 480);
  s.depth_map = DepthMap({320, 240}, 0.5);
  try {
    validate_scene(s);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::dimension_mismatch);
  }
  Scene t = make_scene(64, 48);
  t.depth_heatmap = ActivationHeatmap({48, 64});
  CHECK_THROWS_AS(validate_scene(t), Error);
}

TEST_CASE("out-of-range channel values are rejected") {
  std::vector<Rgb> px(4, Rgb{0, 0, 1});
  px[2].g = 1.5;
  try {
    ActivationHeatmap h({2, 2}, px);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::out_of_range);
  }
  Scene s = make_scene(8, 8);
  s.ground_truth = BoundingBox(0, 0, 3, 3);
  s.rgb_heatmap.at(1, 1).r = 1.5;
  CHECK_THROWS_AS(validate_scene(s), Error);
  s.rgb_heatmap.at(1, 1).r = std::nan("");
  CHECK_THROWS_AS(validate_scene(s), Error);
  CHECK_THROWS_AS(DepthMap({1, 1}, std::vector<double>{-0.1}), Error);
}

TEST_CASE("bounding boxes") {
  CHECK_THROWS_AS(BoundingBox(5, 0, 4, 0), Error);
  try {
    BoundingBox(0, 3, 0, 2);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::degenerate_box);
  }
  const BoundingBox one(3, 3, 3, 3);
  CHECK(one.area() == 1);
  CHECK(BoundingBox(0, 0, 9, 4).area() == 50);
  CHECK(BoundingBox(2, 2, 5, 5).center_x() == doctest::Approx(3.5));

  Scene s = make_scene(20, 20);
  s.ground_truth = BoundingBox(10, 10, 20, 19);
  try {
    validate_scene(s);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::out_of_range);
  }
}

TEST_CASE("empty rasters are not allowed") {
  CHECK_THROWS_AS(ActivationHeatmap({0, 4}), Error);
  CHECK_THROWS_AS(DepthMap({3, 0}), Error);
  CHECK_THROWS_AS(ActivationHeatmap({2, 2}, std::vector<Rgb>(3)), Error);
}

TEST_CASE("mode and category names") {
  CHECK(mode_from_string("rgbd") == Mode::rgbd);
  CHECK(to_string(Mode::rgb) == "rgb");
  CHECK(category_from_string("difficult") == Category::difficult);
  CHECK_THROWS_AS(mode_from_string("depth"), Error);
}
