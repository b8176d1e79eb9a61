#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "autorank/complexity.hpp"
#include "autorank/error.hpp"
#include "autorank/mcda.hpp"

namespace autorank::rank {

inline constexpr double kDefaultFloor = 0.1;

struct RankAssignment {
  std::string participant_id;
  std::optional<double> closeness;  // empty for modes that do not run TOPSIS
  double rank_ratio = 1.0;
  int rank = 1;

  bool operator==(const RankAssignment&) const = default;
};

/// round-half-up of global_rank * ratio, clamped to [1, global_rank].
inline int integer_rank(int global_rank, double ratio) {
  const double scaled = static_cast<double>(global_rank) * ratio;
  const int r = static_cast<int>(std::floor(scaled + 0.5));
  return std::clamp(r, 1, global_rank);
}

inline void check_floor(double floor) {
  if (!(floor > 0.0 && floor <= 1.0)) fail(ErrorCode::InvalidFloor, "rank floor must lie in (0, 1]");
}

inline void check_global_rank(int global_rank) {
  if (global_rank < 1) fail(ErrorCode::InvalidParams, "global rank must be >= 1");
}

/// Min-max rank ratios with a floor: r_i = max((C_i - C_min)/(C_max - C_min), floor).
/// Equal closeness everywhere maps every participant to ratio 1.
inline std::vector<double> rank_ratios(const std::vector<double>& closeness, double floor) {
  check_floor(floor);
  if (closeness.empty()) return {};
  const auto [lo, hi] = std::minmax_element(closeness.begin(), closeness.end());
  const double c_min = *lo, c_max = *hi;
  std::vector<double> out(closeness.size(), 1.0);
  if (c_max == c_min) return out;
  for (std::size_t i = 0; i < closeness.size(); ++i)
    out[i] = std::max((closeness[i] - c_min) / (c_max - c_min), floor);
  return out;
}

/// CRITIC -> TOPSIS -> floored min-max ratio -> integer rank.
inline std::vector<RankAssignment> assign_ranks(const mcda::DecisionMatrix& matrix, int global_rank, double floor) {
  check_floor(floor);
  check_global_rank(global_rank);
  const auto weights = mcda::critic_weights(matrix);
  const auto scores = mcda::topsis_scores(matrix, weights);
  const auto ratios = rank_ratios(scores.scores, floor);

  std::vector<RankAssignment> out(matrix.participants());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].participant_id = matrix.participant_ids.empty() ? std::to_string(i) : matrix.participant_ids[i];
    out[i].closeness = scores.scores[i];
    out[i].rank_ratio = ratios[i];
    out[i].rank = integer_rank(global_rank, ratios[i]);
  }
  return out;
}

/// sim[i][j] = 1 - |r_i - r_j| / max(range(r), 1e-12)
inline std::vector<std::vector<double>> rank_similarity_matrix(const std::vector<RankAssignment>& assignments) {
  const std::size_t n = assignments.size();
  std::vector<std::vector<double>> sim(n, std::vector<double>(n, 1.0));
  if (n == 0) return sim;
  double lo = assignments[0].rank_ratio, hi = lo;
  for (const auto& a : assignments) {
    lo = std::min(lo, a.rank_ratio);
    hi = std::max(hi, a.rank_ratio);
  }
  const double range = std::max(hi - lo, 1e-12);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = std::clamp(1.0 - std::abs(assignments[i].rank_ratio - assignments[j].rank_ratio) / range, 0.0, 1.0);
      sim[i][j] = s;
      sim[j][i] = s;
    }
  return sim;
}

// --- CSV outputs ------------------------------------------------------------

inline constexpr const char* kRanksCsvHeader =
    "participant_id,loss_entropy,label_entropy,gini_simpson,log_data_volume,closeness,rank_ratio,rank";

/// Reports and assignments are joined positionally.
inline std::string ranks_csv(const std::vector<complexity::ComplexityReport>& reports,
                             const std::vector<RankAssignment>& assignments) {
  if (reports.size() != assignments.size())
    fail(ErrorCode::DimensionMismatch, "reports and rank assignments differ in length");
  using complexity::format_g6;
  std::string out = std::string(kRanksCsvHeader) + "\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    const auto& a = assignments[i];
    out += r.participant_id + "," + format_g6(r.loss_entropy) + "," + format_g6(r.label_entropy) + "," +
           format_g6(r.gini_simpson) + "," + format_g6(r.log_data_volume) + "," +
           (a.closeness ? format_g6(*a.closeness) : std::string()) + "," + format_g6(a.rank_ratio) + "," +
           std::to_string(a.rank) + "\n";
  }
  return out;
}

inline std::string similarity_csv(const std::vector<RankAssignment>& assignments) {
  const auto sim = rank_similarity_matrix(assignments);
  std::string out = "participant_id";
  for (const auto& a : assignments) out += "," + a.participant_id;
  out += "\n";
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    out += assignments[i].participant_id;
    for (double s : sim[i]) out += "," + complexity::format_g6(s);
    out += "\n";
  }
  return out;
}

}  // namespace autorank::rank
