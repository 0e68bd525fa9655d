#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "rgbdg/evaluation.hpp"

using namespace rgbdg;

namespace {

ProposalSet proposals_of(const std::vector<BoundingBox>& boxes, Mode mode = Mode::rgbd) {
  ProposalSet set;
  set.scene_id = "s";
  set.mode = mode;
  int rank = 1;
  for (const auto& b : boxes) set.proposals.push_back(RegionProposal{rank++, b, 0.5, 200});
  return set;
}

MatchReport report(Mode mode, Category cat, MatchRank rank) {
  MatchReport r;
  r.scene_id = "s";
  r.mode = mode;
  r.category = cat;
  r.matched_rank = rank;
  return r;
}

}  // namespace

TEST_CASE("identical boxes score 1, disjoint boxes score below 0") {
  const BoundingBox a(10, 10, 20, 30);
  CHECK(diou_matching_score(a, a) == 1.0);
  CHECK(iou(a, a) == 1.0);
  CHECK(iou(BoundingBox(0, 0, 1, 1), BoundingBox(2, 2, 3, 3)) == 0.0);
  CHECK(diou_matching_score(BoundingBox(0, 0, 1, 1), BoundingBox(5, 5, 6, 6)) < 0.0);
}

TEST_CASE("golden DIoU value") {
  const double m = diou_matching_score(BoundingBox(0, 0, 2, 2), BoundingBox(1, 1, 3, 3));
  CHECK(std::abs(m - 0.22321428571428573) < 1e-12);
  CHECK(std::abs(iou(BoundingBox(0, 0, 2, 2), BoundingBox(1, 1, 3, 3)) - 4.0 / 14.0) < 1e-15);
}

TEST_CASE("far-apart boxes approach -1") {
  const double m = diou_matching_score(BoundingBox(0, 0, 0, 0), BoundingBox(1000, 1000, 1000, 1000));
  CHECK(m < -0.99);
  CHECK(m > -1.0);
}

TEST_CASE("IoU matches pixel counting; the score is symmetric and bounded") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    const auto a = oracle::random_box(rng, 40);
    const auto b = oracle::random_box(rng, 40);
    REQUIRE(std::abs(iou(a, b) - oracle::pixel_iou(a, b)) < 1e-12);
    const double m = diou_matching_score(a, b);
    CHECK(std::abs(m - diou_matching_score(b, a)) < 1e-12);
    CHECK(m > -1.0);
    CHECK(m <= 1.0);
    CHECK(m <= iou(a, b) + 1e-15);
  }
}

TEST_CASE("match_rank picks the first positive candidate among the top three") {
  const BoundingBox gt(10, 10, 20, 20);
  const BoundingBox far(100, 100, 110, 110);
  CHECK(match_rank(proposals_of({gt, far, far}), gt).matched_rank == MatchRank::first);
  CHECK(match_rank(proposals_of({far, BoundingBox(11, 11, 21, 21), gt}), gt).matched_rank == MatchRank::second);
  CHECK(match_rank(proposals_of({far, far, gt}), gt).matched_rank == MatchRank::third);
  CHECK(match_rank(proposals_of({far, far, far, gt}), gt).matched_rank == MatchRank::none);
  const auto empty = match_rank(proposals_of({}), gt, Category::difficult);
  CHECK(empty.matched_rank == MatchRank::none);
  CHECK(empty.scores.empty());
  CHECK(empty.category == Category::difficult);
  const auto r = match_rank(proposals_of({far, far, far, gt}), gt);
  CHECK(r.scores.size() == 3);
}

TEST_CASE("a score of exactly zero does not match") {
  // Touching boxes whose IoU is zero and whose centre penalty is positive.
  const auto r = match_rank(proposals_of({BoundingBox(0, 0, 1, 1)}), BoundingBox(2, 0, 3, 1));
  CHECK(r.scores[0] <= 0.0);
  CHECK(r.matched_rank == MatchRank::none);
}

TEST_CASE("rank names round-trip") {
  for (auto r : {MatchRank::first, MatchRank::second, MatchRank::third, MatchRank::none}) {
    CHECK(match_rank_from_string(to_string(r)) == r);
  }
  CHECK_THROWS_AS(match_rank_from_string("fourth"), Error);
}

TEST_CASE("aggregate counts per mode and category") {
  const std::vector<MatchReport> reports{
      report(Mode::rgbd, Category::easy, MatchRank::first),
      report(Mode::rgb, Category::easy, MatchRank::second),
      report(Mode::rgbd, Category::difficult, MatchRank::first),
      report(Mode::rgb, Category::difficult, MatchRank::none),
  };
  const auto whole = aggregate(reports, {Mode::rgbd, Mode::rgb});
  CHECK(whole.counts[0] == std::array<std::int64_t, 4>{2, 0, 0, 0});
  CHECK(whole.counts[1] == std::array<std::int64_t, 4>{0, 1, 0, 1});
  CHECK(whole.row_total(0) == 2);
  CHECK(whole.column_total(0) == 2);
  const auto diff = aggregate(reports, {Mode::rgbd, Mode::rgb}, Category::difficult);
  CHECK(diff.counts[1] == std::array<std::int64_t, 4>{0, 0, 0, 1});
  const auto only = aggregate(reports, {Mode::rgb});
  CHECK(only.counts.size() == 1);
  CHECK(only.row_total(0) == 2);
}

TEST_CASE("chi-squared examples") {
  const auto c = chi_squared(std::vector<std::vector<double>>{{10, 20}, {20, 10}});
  CHECK(std::abs(c.statistic - 20.0 / 3.0) < 1e-9);
  CHECK(c.degrees_of_freedom == 1);
  const auto p = chi_squared(std::vector<std::vector<double>>{{5, 10, 15}, {10, 20, 30}});
  CHECK(std::abs(p.statistic) < 1e-12);
  CHECK(p.degrees_of_freedom == 2);
}

TEST_CASE("chi-squared rejects zero margins") {
  try {
    chi_squared(std::vector<std::vector<double>>{{10, 0}, {20, 0}});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::zero_margin);
  }
  CHECK_THROWS_AS(chi_squared(std::vector<std::vector<double>>{{0, 0}, {1, 2}}), Error);
  ContingencyTable t{{Mode::rgbd, Mode::rgb}, {{3, 1, 0, 1}, {1, 1, 0, 3}}};
  CHECK_THROWS_AS(chi_squared(t), Error);
}
