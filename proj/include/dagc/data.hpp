// Copyright 2026 The DAGC Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

// Datasets, worker weights and non-IID partitioning.

#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dagc/random.hpp"
#include "dagc/weights.hpp"

namespace dagc::data {

using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Samples x features matrix with values in [0, 1] plus class labels.
class LabeledDataset {
 public:
  LabeledDataset() = default;
  LabeledDataset(FeatureMatrix features, std::vector<std::uint32_t> labels, std::size_t num_classes);

  std::size_t size() const { return labels_.size(); }
  std::size_t num_features() const { return static_cast<std::size_t>(features_.cols()); }
  std::size_t num_classes() const { return num_classes_; }
  const FeatureMatrix& features() const { return features_; }
  const std::vector<std::uint32_t>& labels() const { return labels_; }
  auto row(std::size_t i) const { return features_.row(static_cast<Eigen::Index>(i)); }
  std::uint32_t label(std::size_t i) const { return labels_[i]; }

  /// Rows [begin, end) as a new dataset.
  LabeledDataset slice(std::size_t begin, std::size_t end) const;

 private:
  FeatureMatrix features_;
  std::vector<std::uint32_t> labels_;
  std::size_t num_classes_ = 0;
};

/// Disjoint, non-empty per-worker lists of sample indices (ascending).
struct Partition {
  std::vector<std::vector<std::size_t>> shards;

  std::size_t num_workers() const { return shards.size(); }
  std::size_t total() const;
  /// |shard_i| / sum_j |shard_j|.
  std::vector<double> realized_weights() const;
  /// Throws std::invalid_argument if shards overlap, are empty, reference
  /// indices >= dataset_size or are not sorted by size descending.
  void validate(std::size_t dataset_size) const;
};

/// Approximately arithmetic descending series with p_1/p_n = skew_ratio.
/// Interior entries get Dirichlet(0.5) noise bounded by half the series
/// step, so the ordering survives.
WeightVector skewed_weights(std::size_t n, double skew_ratio, Rng& rng);

/// One large worker holding p_large and n-1 equal small workers.
WeightVector dichotomous_weights(std::size_t n, double p_large);

/// Per-worker sample counts: largest-remainder rounding of w_i * total, so
/// each count is within one sample of w_i * total and they sum to total.
std::vector<std::size_t> target_sizes(std::span<const double> weights, std::size_t total);

/// Splits every label class across workers with Dirichlet(alpha)
/// proportions, then moves surplus samples to under-filled workers so that
/// shard sizes equal target_sizes(weights, dataset.size()).
Partition dirichlet_label_partition(const LabeledDataset& dataset, std::span<const double> weights,
                                    double alpha, Rng& rng);

/// Gaussian clusters: each class has a centroid drawn from
/// N(0, centroid_scale^2) per feature and samples add unit-variance noise.
/// Features are min-max scaled to [0, 1]; labels cycle 0, 1, ..., K-1.
LabeledDataset synthetic_classification(std::size_t num_samples, std::size_t num_features,
                                        std::size_t num_classes, Rng& rng, double centroid_scale = 1.0);

/// IDX (MNIST-style) image/label pair; pixels divided by 255.
LabeledDataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels);

/// Writes features (rounded to bytes after scaling by 255) as a rows x cols
/// image file and the labels file.
void write_idx(const LabeledDataset& dataset, std::size_t rows, std::size_t cols,
               const std::filesystem::path& images, const std::filesystem::path& labels);

/// {"workers": [{"worker": 1, "size": .., "weight": .., "indices": [..]}, ..]}
std::string partition_to_json(const Partition& partition);

}  // namespace dagc::data
