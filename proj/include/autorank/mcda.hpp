#pragma once

// CRITIC objective weighting and TOPSIS closeness scoring over a
// participants x metrics decision matrix. All metric columns are treated as
// benefit-type; cost-type metrics must be negated by the caller.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "autorank/error.hpp"
#include "autorank/matrix.hpp"

namespace autorank::mcda {

struct DecisionMatrix {
  Matrix values;  // N participants x n metrics
  std::vector<std::string> participant_ids;
  std::vector<std::string> metric_names;

  std::size_t participants() const noexcept { return values.rows(); }
  std::size_t metrics() const noexcept { return values.cols(); }

  /// Builds a matrix with ids "0".."N-1" and metric names "m0".."m{n-1}".
  static DecisionMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    DecisionMatrix dm;
    dm.values = Matrix::from_rows(rows);
    for (std::size_t i = 0; i < dm.values.rows(); ++i) dm.participant_ids.push_back(std::to_string(i));
    for (std::size_t k = 0; k < dm.values.cols(); ++k) dm.metric_names.push_back("m" + std::to_string(k));
    return dm;
  }
};

struct MetricWeights {
  std::vector<double> weights;      // w^k
  std::vector<double> information;  // I_k
  std::vector<double> stddevs;      // population sigma^k
  Matrix correlations;              // Pearson r^{k,j}
  bool degenerate_fallback = false;
};

struct ClosenessScores {
  std::vector<double> scores;        // C_i
  std::vector<double> sep_ideal;     // S_i^+
  std::vector<double> sep_negative;  // S_i^-
};

inline void validate(const DecisionMatrix& m) {
  if (m.participants() == 0 || m.metrics() == 0) fail(ErrorCode::EmptyMatrix, "decision matrix has no entries");
  if (!all_finite(m.values.flat())) fail(ErrorCode::NonFiniteInput, "decision matrix contains NaN/Inf");
  if (!m.participant_ids.empty() && m.participant_ids.size() != m.participants())
    fail(ErrorCode::DimensionMismatch, "participant id count does not match rows");
  if (!m.metric_names.empty() && m.metric_names.size() != m.metrics())
    fail(ErrorCode::DimensionMismatch, "metric name count does not match columns");
}

namespace detail {

inline std::vector<double> column(const Matrix& m, std::size_t k) {
  std::vector<double> out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) out[i] = m(i, k);
  return out;
}

}  // namespace detail

/// CRITIC weights computed on the raw values (no pre-normalization).
/// Population (1/N) standard deviation, Pearson correlation, and
/// I_k = sigma_k * (1 - mean_{j != k} r_kj). A zero-variance column gets
/// r = 0 against every other column. When the information total is not
/// positive (or N == 1) the weights fall back to 1/n and the flag is set.
inline MetricWeights critic_weights(const DecisionMatrix& matrix) {
  validate(matrix);
  const std::size_t n_rows = matrix.participants();
  const std::size_t n_cols = matrix.metrics();
  const double inv_n = 1.0 / static_cast<double>(n_rows);

  MetricWeights out;
  out.stddevs.assign(n_cols, 0.0);
  out.information.assign(n_cols, 0.0);
  out.correlations = Matrix(n_cols, n_cols, 0.0);

  // Centered columns and their sums of squares.
  std::vector<std::vector<double>> centered(n_cols);
  std::vector<double> sum_sq(n_cols, 0.0);
  for (std::size_t k = 0; k < n_cols; ++k) {
    auto col = detail::column(matrix.values, k);
    const double mean = ordered_sum(col) * inv_n;
    std::vector<double> sq(n_rows);
    for (std::size_t i = 0; i < n_rows; ++i) {
      col[i] -= mean;
      sq[i] = col[i] * col[i];
    }
    sum_sq[k] = ordered_sum(std::move(sq));
    out.stddevs[k] = std::sqrt(sum_sq[k] * inv_n);
    centered[k] = std::move(col);
  }

  for (std::size_t k = 0; k < n_cols; ++k) {
    out.correlations(k, k) = sum_sq[k] > 0.0 ? 1.0 : 0.0;
    for (std::size_t j = k + 1; j < n_cols; ++j) {
      double r = 0.0;
      if (sum_sq[k] > 0.0 && sum_sq[j] > 0.0) {
        std::vector<double> prod(n_rows);
        for (std::size_t i = 0; i < n_rows; ++i) prod[i] = centered[k][i] * centered[j][i];
        r = ordered_sum(std::move(prod)) / std::sqrt(sum_sq[k] * sum_sq[j]);
        r = std::clamp(r, -1.0, 1.0);
      }
      out.correlations(k, j) = r;
      out.correlations(j, k) = r;
    }
  }

  if (n_cols == 1) {
    out.information[0] = out.stddevs[0];
    out.weights = {1.0};
    return out;
  }

  bool finite = true;
  for (std::size_t k = 0; k < n_cols; ++k) {
    std::vector<double> others;
    others.reserve(n_cols - 1);
    for (std::size_t j = 0; j < n_cols; ++j)
      if (j != k) others.push_back(out.correlations(k, j));
    const double conflict = 1.0 - ordered_sum(std::move(others)) / static_cast<double>(n_cols - 1);
    out.information[k] = out.stddevs[k] * conflict;
    finite = finite && std::isfinite(out.information[k]);
  }

  const double total = finite ? ordered_sum(out.information) : 0.0;
  if (n_rows == 1 || !finite || total <= 1e-12) {
    out.degenerate_fallback = true;
    out.weights.assign(n_cols, 1.0 / static_cast<double>(n_cols));
    return out;
  }
  out.weights.resize(n_cols);
  for (std::size_t k = 0; k < n_cols; ++k) out.weights[k] = out.information[k] / total;
  return out;
}

/// TOPSIS relative closeness C_i = S^- / (S^+ + S^-) with vector
/// normalization per column. An all-zero column normalizes to zero; when
/// every row coincides in weighted space all scores are 0.5.
inline ClosenessScores topsis_scores(const DecisionMatrix& matrix, const std::vector<double>& weights) {
  validate(matrix);
  const std::size_t n_rows = matrix.participants();
  const std::size_t n_cols = matrix.metrics();
  if (weights.size() != n_cols) fail(ErrorCode::DimensionMismatch, "weights length does not match metric count");
  if (!all_finite(weights)) fail(ErrorCode::NonFiniteInput, "weights contain NaN/Inf");

  Matrix weighted(n_rows, n_cols);
  std::vector<double> ideal(n_cols), negative(n_cols);
  for (std::size_t k = 0; k < n_cols; ++k) {
    // Dividing by the max magnitude first makes the result bit-identical
    // under exact positive column scaling (lambda*x / lambda*m == x / m).
    double peak = 0.0;
    for (std::size_t i = 0; i < n_rows; ++i) peak = std::max(peak, std::abs(matrix.values(i, k)));
    std::vector<double> unit(n_rows, 0.0), sq(n_rows);
    for (std::size_t i = 0; i < n_rows; ++i) {
      if (peak > 0.0) unit[i] = matrix.values(i, k) / peak;
      sq[i] = unit[i] * unit[i];
    }
    const double norm = std::sqrt(ordered_sum(std::move(sq)));
    for (std::size_t i = 0; i < n_rows; ++i) {
      const double normalized = norm > 0.0 ? unit[i] / norm : 0.0;
      weighted(i, k) = weights[k] * normalized;
    }
    ideal[k] = weighted(0, k);
    negative[k] = weighted(0, k);
    for (std::size_t i = 1; i < n_rows; ++i) {
      if (weighted(i, k) > ideal[k]) ideal[k] = weighted(i, k);
      if (weighted(i, k) < negative[k]) negative[k] = weighted(i, k);
    }
  }

  ClosenessScores out;
  out.scores.resize(n_rows);
  out.sep_ideal.resize(n_rows);
  out.sep_negative.resize(n_rows);
  for (std::size_t i = 0; i < n_rows; ++i) {
    double plus = 0.0, minus = 0.0;
    for (std::size_t k = 0; k < n_cols; ++k) {
      const double dp = weighted(i, k) - ideal[k];
      const double dm = weighted(i, k) - negative[k];
      plus += dp * dp;
      minus += dm * dm;
    }
    plus = std::sqrt(plus);
    minus = std::sqrt(minus);
    out.sep_ideal[i] = plus;
    out.sep_negative[i] = minus;
    // Written as 1 / (1 + S+/S-) so that rounding stays monotone in both
    // separations (dominance ordering survives floating point).
    if (plus + minus == 0.0)
      out.scores[i] = 0.5;
    else if (minus == 0.0)
      out.scores[i] = 0.0;
    else
      out.scores[i] = 1.0 / (1.0 + plus / minus);
  }
  return out;
}

inline ClosenessScores topsis_scores(const DecisionMatrix& matrix, const MetricWeights& weights) {
  return topsis_scores(matrix, weights.weights);
}

}  // namespace autorank::mcda
