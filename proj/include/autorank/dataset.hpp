#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "autorank/error.hpp"
#include "autorank/matrix.hpp"

namespace autorank {

/// Features are N x d with values in [0, 1]; labels lie in [0, classes).
struct LabeledDataset {
  Matrix features;
  std::vector<int> labels;
  std::size_t classes = 0;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t dim() const noexcept { return features.cols(); }

  void validate() const {
    if (labels.empty()) fail(ErrorCode::EmptyDataset, "dataset has no samples");
    if (features.rows() != labels.size()) fail(ErrorCode::DimensionMismatch, "feature/label count mismatch");
    if (!all_finite(features.flat())) fail(ErrorCode::NonFiniteInput, "dataset features contain NaN/Inf");
    for (int l : labels)
      if (l < 0 || static_cast<std::size_t>(l) >= classes) fail(ErrorCode::InvalidParams, "label out of range");
  }

  /// Copies the given sample indices (in order) into a new dataset.
  LabeledDataset select(std::span<const std::size_t> indices) const {
    LabeledDataset out;
    out.classes = classes;
    out.features = Matrix(indices.size(), dim());
    out.labels.resize(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
      auto src = features.row(indices[i]);
      std::copy(src.begin(), src.end(), out.features.row(i).begin());
      out.labels[i] = labels[indices[i]];
    }
    return out;
  }

  bool operator==(const LabeledDataset&) const = default;
};

}  // namespace autorank
