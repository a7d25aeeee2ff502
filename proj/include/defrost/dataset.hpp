#pragma once

#include <cstdint>
#include <vector>

#include "defrost/matrix.hpp"

namespace defrost {

/// Feature matrix plus class labels; the unit of source/target tasks.
/// Row i of features and labels[i] describe the same sample.
struct LabeledDataset {
  Matrix features;           // N x D
  std::vector<int> labels;   // length N, values in [0, num_classes)
  int num_classes = 0;

  std::size_t size() const { return features.rows(); }
  std::size_t dim() const { return features.cols(); }

  /// Throws if labels are out of range, lengths disagree or entries are non-finite.
  void validate() const;

  /// Number of samples carrying each label.
  std::vector<std::size_t> class_counts() const;
};

/// Per-feature statistics from standardize(); reusable on held-out data.
struct FeatureStats {
  std::vector<double> mean;
  std::vector<double> stddev;            // 1.0 where the column was constant
  std::vector<bool> constant_column;     // degenerate-column flags
};

/// Shifts/scales every feature column to empirical mean 0 and std 1
/// (population normalization). Constant columns are left at 0 with the
/// divisor replaced by 1 and the column flagged in the returned stats.
std::pair<LabeledDataset, FeatureStats> standardize(const LabeledDataset& dataset);

/// Applies previously computed stats (e.g. train-set stats to a test set).
LabeledDataset apply_standardization(const LabeledDataset& dataset, const FeatureStats& stats);

/// Draws exactly n_per_class samples of every class without replacement.
/// Deterministic given the seed. Throws naming the first class with too few samples.
LabeledDataset subsample_balanced(const LabeledDataset& dataset, std::size_t n_per_class,
                                  std::uint64_t rng_seed);

}  // namespace defrost
