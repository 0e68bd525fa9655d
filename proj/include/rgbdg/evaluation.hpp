#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rgbdg/clustering.hpp"
#include "rgbdg/scene.hpp"

namespace rgbdg {

/// Intersection over union with inclusive pixel corners; 0 for disjoint boxes.
double iou(const BoundingBox& a, const BoundingBox& b);

/// 1 - L_DIoU = IoU - rho^2 / c^2. rho is the distance between box centres,
/// c the diagonal of the smallest enclosing box measured between its outer
/// pixel edges, so the score lies in (-1, 1].
double diou_matching_score(const BoundingBox& candidate, const BoundingBox& target);

enum class MatchRank { first = 0, second = 1, third = 2, none = 3 };
inline constexpr int kMatchRankCount = 4;
inline constexpr int kRanksEvaluated = 3;

std::string to_string(MatchRank rank);
MatchRank match_rank_from_string(const std::string& name);

struct MatchReport {
  std::string scene_id;
  Mode mode = Mode::rgbd;
  Category category = Category::easy;
  MatchRank matched_rank = MatchRank::none;
  /// Scores of the first (up to) three candidates, in rank order.
  std::vector<double> scores;

  friend bool operator==(const MatchReport&, const MatchReport&) = default;
};

/// A candidate matches when its score is strictly positive; the reported rank
/// is the first matching one among the top three.
MatchReport match_rank(const ProposalSet& proposals, const BoundingBox& target, Category category = Category::easy);

struct ContingencyTable {
  std::vector<Mode> modes;
  std::vector<std::array<std::int64_t, kMatchRankCount>> counts;  // one row per mode

  std::int64_t row_total(std::size_t row) const;
  std::int64_t column_total(int column) const;

  friend bool operator==(const ContingencyTable&, const ContingencyTable&) = default;
};

/// Counts outcomes per mode, rows in the order given. Reports for modes not
/// listed, or outside the category filter, are ignored.
ContingencyTable aggregate(const std::vector<MatchReport>& reports, const std::vector<Mode>& modes,
                           std::optional<Category> category_filter = std::nullopt);

struct ChiSquared {
  double statistic = 0.0;
  int degrees_of_freedom = 0;
};

/// Pearson statistic with expected counts from the margins. Throws
/// zero_margin when any row or column sums to zero.
ChiSquared chi_squared(const std::vector<std::vector<double>>& observed);
ChiSquared chi_squared(const ContingencyTable& table);

}  // namespace rgbdg
