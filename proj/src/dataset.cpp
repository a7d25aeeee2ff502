#include "defrost/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "defrost/rng.hpp"

namespace defrost {

void LabeledDataset::validate() const {
  if (labels.size() != features.rows())
    throw std::invalid_argument("dataset: label count " + std::to_string(labels.size()) +
                                " does not match row count " + std::to_string(features.rows()));
  if (num_classes < 2) throw std::invalid_argument("dataset: num_classes must be >= 2");
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] < 0 || labels[i] >= num_classes)
      throw std::invalid_argument("dataset: label " + std::to_string(labels[i]) + " at row " +
                                  std::to_string(i) + " outside [0, " + std::to_string(num_classes) + ")");
  for (std::size_t i = 0; i < features.rows(); ++i)
    for (std::size_t j = 0; j < features.cols(); ++j)
      if (!std::isfinite(features(i, j)))
        throw std::invalid_argument("dataset: non-finite feature at row " + std::to_string(i));
}

std::vector<std::size_t> LabeledDataset::class_counts() const {
  std::vector<std::size_t> counts(num_classes, 0);
  for (int label : labels) {
    if (label >= 0 && label < num_classes) ++counts[label];
  }
  return counts;
}

std::pair<LabeledDataset, FeatureStats> standardize(const LabeledDataset& dataset) {
  const std::size_t n = dataset.size(), d = dataset.dim();
  if (n < 2) throw std::invalid_argument("standardize: need at least 2 samples");

  FeatureStats stats;
  stats.mean.assign(d, 0.0);
  stats.stddev.assign(d, 0.0);
  stats.constant_column.assign(d, false);

  for (std::size_t i = 0; i < n; ++i) {
    const double* row = dataset.features.row_ptr(i);
    for (std::size_t j = 0; j < d; ++j) stats.mean[j] += row[j];
  }
  for (std::size_t j = 0; j < d; ++j) stats.mean[j] /= static_cast<double>(n);

  for (std::size_t i = 0; i < n; ++i) {
    const double* row = dataset.features.row_ptr(i);
    for (std::size_t j = 0; j < d; ++j) {
      const double delta = row[j] - stats.mean[j];
      stats.stddev[j] += delta * delta;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    stats.stddev[j] = std::sqrt(stats.stddev[j] / static_cast<double>(n));
    if (stats.stddev[j] == 0.0) {
      stats.stddev[j] = 1.0;
      stats.constant_column[j] = true;
    }
  }

  return {apply_standardization(dataset, stats), stats};
}

LabeledDataset apply_standardization(const LabeledDataset& dataset, const FeatureStats& stats) {
  const std::size_t d = dataset.dim();
  if (stats.mean.size() != d || stats.stddev.size() != d)
    throw std::invalid_argument("apply_standardization: stats dimension mismatch");
  LabeledDataset out;
  out.labels = dataset.labels;
  out.num_classes = dataset.num_classes;
  out.features = Matrix(dataset.size(), d);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const double* src = dataset.features.row_ptr(i);
    double* dst = out.features.row_ptr(i);
    for (std::size_t j = 0; j < d; ++j) dst[j] = (src[j] - stats.mean[j]) / stats.stddev[j];
  }
  return out;
}

LabeledDataset subsample_balanced(const LabeledDataset& dataset, std::size_t n_per_class,
                                  std::uint64_t rng_seed) {
  if (n_per_class < 1) throw std::invalid_argument("subsample_balanced: n_per_class must be >= 1");
  std::vector<std::vector<std::size_t>> by_class(dataset.num_classes);
  for (std::size_t i = 0; i < dataset.labels.size(); ++i) by_class[dataset.labels[i]].push_back(i);

  for (int c = 0; c < dataset.num_classes; ++c)
    if (by_class[c].size() < n_per_class)
      throw std::invalid_argument("subsample_balanced: class " + std::to_string(c) + " has only " +
                                  std::to_string(by_class[c].size()) + " samples, need " +
                                  std::to_string(n_per_class));

  auto rng = make_rng(rng_seed);
  std::vector<std::size_t> chosen;
  chosen.reserve(n_per_class * static_cast<std::size_t>(dataset.num_classes));
  for (int c = 0; c < dataset.num_classes; ++c) {
    auto& pool = by_class[c];
    // Partial Fisher-Yates: the first n_per_class slots are a uniform draw
    // without replacement.
    for (std::size_t i = 0; i < n_per_class; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
      std::swap(pool[i], pool[pick(rng)]);
      chosen.push_back(pool[i]);
    }
  }

  LabeledDataset out;
  out.num_classes = dataset.num_classes;
  out.features = dataset.features.gather_rows(chosen);
  out.labels.reserve(chosen.size());
  for (std::size_t idx : chosen) out.labels.push_back(dataset.labels[idx]);
  return out;
}

}  // namespace defrost
