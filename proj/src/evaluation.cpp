#include "rgbdg/evaluation.hpp"

#include <algorithm>

namespace rgbdg {

double iou(const BoundingBox& a, const BoundingBox& b) {
  const int ix0 = std::max(a.x_min(), b.x_min());
  const int iy0 = std::max(a.y_min(), b.y_min());
  const int ix1 = std::min(a.x_max(), b.x_max());
  const int iy1 = std::min(a.y_max(), b.y_max());
  if (ix0 > ix1 || iy0 > iy1) return 0.0;
  const std::int64_t inter = static_cast<std::int64_t>(ix1 - ix0 + 1) * (iy1 - iy0 + 1);
  const std::int64_t uni = a.area() + b.area() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double diou_matching_score(const BoundingBox& candidate, const BoundingBox& target) {
  const double overlap = iou(candidate, target);
  const double dx = candidate.center_x() - target.center_x();
  const double dy = candidate.center_y() - target.center_y();
  const double rho2 = dx * dx + dy * dy;
  const double ex = std::max(candidate.x_max(), target.x_max()) - std::min(candidate.x_min(), target.x_min()) + 1;
  const double ey = std::max(candidate.y_max(), target.y_max()) - std::min(candidate.y_min(), target.y_min()) + 1;
  const double c2 = ex * ex + ey * ey;
  if (c2 == 0.0) return overlap;
  return overlap - rho2 / c2;
}

std::string to_string(MatchRank rank) {
  switch (rank) {
    case MatchRank::first: return "first";
    case MatchRank::second: return "second";
    case MatchRank::third: return "third";
    case MatchRank::none: return "none";
  }
  return "none";
}

MatchRank match_rank_from_string(const std::string& name) {
  if (name == "first") return MatchRank::first;
  if (name == "second") return MatchRank::second;
  if (name == "third") return MatchRank::third;
  if (name == "none") return MatchRank::none;
  throw Error(ErrorCode::invalid_config, "unknown match rank '" + name + "'");
}

MatchReport match_rank(const ProposalSet& proposals, const BoundingBox& target, Category category) {
  MatchReport report{proposals.scene_id, proposals.mode, category, MatchRank::none, {}};
  const std::size_t n = std::min<std::size_t>(proposals.proposals.size(), kRanksEvaluated);
  for (std::size_t i = 0; i < n; ++i) {
    const double m = diou_matching_score(proposals.proposals[i].box, target);
    report.scores.push_back(m);
    if (report.matched_rank == MatchRank::none && m > 0.0) report.matched_rank = static_cast<MatchRank>(i);
  }
  return report;
}

std::int64_t ContingencyTable::row_total(std::size_t row) const {
  std::int64_t s = 0;
  for (auto v : counts.at(row)) s += v;
  return s;
}

std::int64_t ContingencyTable::column_total(int column) const {
  std::int64_t s = 0;
  for (const auto& row : counts) s += row.at(static_cast<std::size_t>(column));
  return s;
}

ContingencyTable aggregate(const std::vector<MatchReport>& reports, const std::vector<Mode>& modes,
                           std::optional<Category> category_filter) {
  ContingencyTable table;
  table.modes = modes;
  table.counts.assign(modes.size(), {0, 0, 0, 0});
  for (const MatchReport& r : reports) {
    if (category_filter && r.category != *category_filter) continue;
    const auto it = std::find(modes.begin(), modes.end(), r.mode);
    if (it == modes.end()) continue;
    ++table.counts[static_cast<std::size_t>(it - modes.begin())][static_cast<std::size_t>(r.matched_rank)];
  }
  return table;
}

ChiSquared chi_squared(const std::vector<std::vector<double>>& observed) {
  if (observed.empty() || observed.front().empty()) {
    throw Error(ErrorCode::zero_margin, "empty contingency table");
  }
  const std::size_t rows = observed.size();
  const std::size_t cols = observed.front().size();
  std::vector<double> row_sum(rows, 0.0);
  std::vector<double> col_sum(cols, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (observed[i].size() != cols) throw Error(ErrorCode::dimension_mismatch, "ragged contingency table");
    for (std::size_t j = 0; j < cols; ++j) {
      row_sum[i] += observed[i][j];
      col_sum[j] += observed[i][j];
      total += observed[i][j];
    }
  }
  for (std::size_t i = 0; i < rows; ++i) {
    if (row_sum[i] <= 0.0) throw Error(ErrorCode::zero_margin, "row " + std::to_string(i) + " sums to zero");
  }
  for (std::size_t j = 0; j < cols; ++j) {
    if (col_sum[j] <= 0.0) throw Error(ErrorCode::zero_margin, "column " + std::to_string(j) + " sums to zero");
  }
  double stat = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double expected = row_sum[i] * col_sum[j] / total;
      const double diff = observed[i][j] - expected;
      stat += diff * diff / expected;
    }
  }
  return ChiSquared{stat, static_cast<int>((rows - 1) * (cols - 1))};
}

ChiSquared chi_squared(const ContingencyTable& table) {
  std::vector<std::vector<double>> observed;
  for (const auto& row : table.counts) observed.emplace_back(row.begin(), row.end());
  return chi_squared(observed);
}

}  // namespace rgbdg
