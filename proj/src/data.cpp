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

#include "dagc/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <json.hpp>
#include <numeric>
#include <stdexcept>
#include <string>

#include "dagc/error.hpp"

namespace dagc::data {
namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::vector<double> sample_dirichlet(std::size_t k, double alpha, Rng& rng) {
  std::gamma_distribution<double> gamma(alpha, 1.0);
  std::vector<double> draw(k);
  double total = 0.0;
  for (double& d : draw) {
    d = gamma(rng);
    total += d;
  }
  if (!(total > 0.0)) {
    // every component underflowed; put all mass on one uniformly chosen slot
    std::fill(draw.begin(), draw.end(), 0.0);
    draw[std::uniform_int_distribution<std::size_t>(0, k - 1)(rng)] = 1.0;
    return draw;
  }
  for (double& d : draw) d /= total;
  return draw;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<std::uint8_t>& bytes, std::size_t offset, const std::string& file) {
  if (offset + 4 > bytes.size()) throw FormatError(file + ": truncated header", offset);
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void write_be32(std::ofstream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16), static_cast<char>(v >> 8),
                     static_cast<char>(v)};
  out.write(b, 4);
}

}  // namespace

LabeledDataset::LabeledDataset(FeatureMatrix features, std::vector<std::uint32_t> labels, std::size_t num_classes)
    : features_(std::move(features)), labels_(std::move(labels)), num_classes_(num_classes) {
  if (static_cast<std::size_t>(features_.rows()) != labels_.size()) {
    throw std::invalid_argument("dataset: " + std::to_string(features_.rows()) + " feature rows but " +
                                std::to_string(labels_.size()) + " labels");
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] >= num_classes_) {
      throw std::invalid_argument("dataset: label " + std::to_string(labels_[i]) + " at row " +
                                  std::to_string(i) + " >= num_classes");
    }
  }
}

LabeledDataset LabeledDataset::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > size()) throw std::out_of_range("dataset slice out of range");
  const auto rows = static_cast<Eigen::Index>(end - begin);
  FeatureMatrix f = features_.middleRows(static_cast<Eigen::Index>(begin), rows);
  std::vector<std::uint32_t> l(labels_.begin() + static_cast<std::ptrdiff_t>(begin),
                               labels_.begin() + static_cast<std::ptrdiff_t>(end));
  return LabeledDataset(std::move(f), std::move(l), num_classes_);
}

std::size_t Partition::total() const {
  std::size_t t = 0;
  for (const auto& s : shards) t += s.size();
  return t;
}

std::vector<double> Partition::realized_weights() const {
  const double t = static_cast<double>(total());
  std::vector<double> w;
  for (const auto& s : shards) w.push_back(static_cast<double>(s.size()) / t);
  return w;
}

void Partition::validate(std::size_t dataset_size) const {
  std::vector<bool> seen(dataset_size, false);
  for (std::size_t w = 0; w < shards.size(); ++w) {
    if (shards[w].empty()) throw std::invalid_argument("partition: worker " + std::to_string(w + 1) + " is empty");
    if (w > 0 && shards[w].size() > shards[w - 1].size()) {
      throw std::invalid_argument("partition: shard sizes not descending at worker " + std::to_string(w + 1));
    }
    for (std::size_t idx : shards[w]) {
      if (idx >= dataset_size) throw std::invalid_argument("partition: index out of range");
      if (seen[idx]) throw std::invalid_argument("partition: sample " + std::to_string(idx) + " assigned twice");
      seen[idx] = true;
    }
  }
}

WeightVector skewed_weights(std::size_t n, double skew_ratio, Rng& rng) {
  if (n < 2) throw std::invalid_argument("skewed_weights: need n >= 2");
  if (!(skew_ratio >= 1.0) || !std::isfinite(skew_ratio)) {
    throw std::invalid_argument("skewed_weights: skew ratio must be >= 1");
  }
  const double step = (skew_ratio - 1.0) / static_cast<double>(n - 1);
  std::vector<double> series(n);
  for (std::size_t i = 0; i < n; ++i) series[i] = skew_ratio - step * static_cast<double>(i);
  series[n - 1] = 1.0;

  if (n > 2 && step > 0.0) {
    const std::size_t interior = n - 2;
    const auto noise = sample_dirichlet(interior, 0.5, rng);
    const double centre = 1.0 / static_cast<double>(interior);
    // |noise - centre| < 1, so each shift stays strictly inside half a step
    for (std::size_t k = 0; k < interior; ++k) series[k + 1] += 0.5 * step * (noise[k] - centre);
  }
  const double total = std::accumulate(series.begin(), series.end(), 0.0);
  for (double& s : series) s /= total;
  return WeightVector(std::move(series));
}

WeightVector dichotomous_weights(std::size_t n, double p_large) {
  if (n < 2) throw std::invalid_argument("dichotomous_weights: need n >= 2");
  if (!(p_large > 0.0 && p_large < 1.0)) throw std::invalid_argument("dichotomous_weights: p_large must be in (0, 1)");
  std::vector<double> w(n, (1.0 - p_large) / static_cast<double>(n - 1));
  w[0] = p_large;
  return WeightVector(std::move(w));
}

std::vector<std::size_t> target_sizes(std::span<const double> weights, std::size_t total) {
  validate_weights(weights);
  const std::size_t n = weights.size();
  std::vector<std::size_t> sizes(n);
  std::vector<double> remainder(n);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double exact = weights[i] * static_cast<double>(total);
    sizes[i] = static_cast<std::size_t>(std::floor(exact));
    remainder[i] = exact - static_cast<double>(sizes[i]);
    assigned += sizes[i];
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  // largest fractional part first; ties go to the larger (earlier) worker
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) sizes[order[k % n]] += 1;
  return sizes;
}

Partition dirichlet_label_partition(const LabeledDataset& dataset, std::span<const double> weights, double alpha,
                                    Rng& rng) {
  if (!(alpha > 0.0)) throw std::invalid_argument("dirichlet_label_partition: alpha must be positive");
  const std::size_t n = weights.size();
  const auto targets = target_sizes(weights, dataset.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (targets[i] == 0) {
      throw std::invalid_argument("dirichlet_label_partition: dataset of " + std::to_string(dataset.size()) +
                                  " samples is too small for " + std::to_string(n) + " workers (worker " +
                                  std::to_string(i + 1) + " would be empty)");
    }
  }

  std::vector<std::vector<std::size_t>> by_class(dataset.num_classes());
  for (std::size_t i = 0; i < dataset.size(); ++i) by_class[dataset.label(i)].push_back(i);

  std::vector<std::vector<std::size_t>> shards(n);
  for (auto& members : by_class) {
    if (members.empty()) continue;
    std::shuffle(members.begin(), members.end(), rng);
    const auto proportions = sample_dirichlet(n, alpha, rng);
    // largest-remainder split of this class; proportions need not be sorted
    std::vector<std::size_t> counts(n);
    std::vector<double> remainder(n);
    std::size_t assigned = 0;
    for (std::size_t w = 0; w < n; ++w) {
      const double exact = proportions[w] * static_cast<double>(members.size());
      counts[w] = static_cast<std::size_t>(std::floor(exact));
      remainder[w] = exact - static_cast<double>(counts[w]);
      assigned += counts[w];
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t k = 0; assigned < members.size(); ++k, ++assigned) counts[order[k % n]] += 1;

    std::size_t cursor = 0;
    for (std::size_t w = 0; w < n; ++w) {
      shards[w].insert(shards[w].end(), members.begin() + static_cast<std::ptrdiff_t>(cursor),
                       members.begin() + static_cast<std::ptrdiff_t>(cursor + counts[w]));
      cursor += counts[w];
    }
  }

  // Sizes are hard targets: move random surplus samples to short workers.
  std::vector<std::size_t> pool;
  for (std::size_t w = 0; w < n; ++w) {
    if (shards[w].size() > targets[w]) {
      std::shuffle(shards[w].begin(), shards[w].end(), rng);
      pool.insert(pool.end(), shards[w].begin() + static_cast<std::ptrdiff_t>(targets[w]), shards[w].end());
      shards[w].resize(targets[w]);
    }
  }
  std::shuffle(pool.begin(), pool.end(), rng);
  std::size_t cursor = 0;
  for (std::size_t w = 0; w < n; ++w) {
    while (shards[w].size() < targets[w]) shards[w].push_back(pool[cursor++]);
  }
  for (auto& s : shards) std::sort(s.begin(), s.end());

  Partition partition{std::move(shards)};
  partition.validate(dataset.size());
  return partition;
}

LabeledDataset synthetic_classification(std::size_t num_samples, std::size_t num_features, std::size_t num_classes,
                                        Rng& rng, double centroid_scale) {
  if (num_classes < 2) throw std::invalid_argument("synthetic_classification: need at least 2 classes");
  if (num_samples == 0) throw std::invalid_argument("synthetic_classification: empty dataset requested");
  if (num_features == 0) throw std::invalid_argument("synthetic_classification: need at least 1 feature");

  std::normal_distribution<double> normal(0.0, 1.0);
  FeatureMatrix centroids(static_cast<Eigen::Index>(num_classes), static_cast<Eigen::Index>(num_features));
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    for (Eigen::Index f = 0; f < centroids.cols(); ++f) centroids(c, f) = centroid_scale * normal(rng);
  }

  FeatureMatrix x(static_cast<Eigen::Index>(num_samples), static_cast<Eigen::Index>(num_features));
  std::vector<std::uint32_t> labels(num_samples);
  for (std::size_t i = 0; i < num_samples; ++i) {
    labels[i] = static_cast<std::uint32_t>(i % num_classes);
    const auto row = static_cast<Eigen::Index>(i);
    for (Eigen::Index f = 0; f < x.cols(); ++f) x(row, f) = centroids(labels[i], f) + normal(rng);
  }
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    const double lo = x.col(f).minCoeff();
    const double hi = x.col(f).maxCoeff();
    if (hi > lo) {
      x.col(f) = (x.col(f).array() - lo) / (hi - lo);
    } else {
      x.col(f).setZero();
    }
  }
  return LabeledDataset(std::move(x), std::move(labels), num_classes);
}

LabeledDataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels) {
  const auto img = read_file(images);
  const auto lab = read_file(labels);
  const std::string img_name = images.filename().string();
  const std::string lab_name = labels.filename().string();

  if (read_be32(img, 0, img_name) != kImageMagic) throw FormatError(img_name + ": bad image magic", 0);
  if (read_be32(lab, 0, lab_name) != kLabelMagic) throw FormatError(lab_name + ": bad label magic", 0);
  const std::size_t count = read_be32(img, 4, img_name);
  const std::size_t rows = read_be32(img, 8, img_name);
  const std::size_t cols = read_be32(img, 12, img_name);
  const std::size_t label_count = read_be32(lab, 4, lab_name);
  if (label_count != count) {
    throw FormatError(lab_name + ": " + std::to_string(label_count) + " labels but " + std::to_string(count) +
                          " images",
                      4);
  }
  const std::size_t pixels = rows * cols;
  if (img.size() != 16 + count * pixels) {
    throw FormatError(img_name + ": expected " + std::to_string(16 + count * pixels) + " bytes", img.size());
  }
  if (lab.size() != 8 + count) {
    throw FormatError(lab_name + ": expected " + std::to_string(8 + count) + " bytes", lab.size());
  }

  FeatureMatrix x(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(pixels));
  std::vector<std::uint32_t> y(count);
  std::uint32_t max_label = 0;
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t p = 0; p < pixels; ++p) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) = img[16 + i * pixels + p] / 255.0;
    }
    y[i] = lab[8 + i];
    max_label = std::max(max_label, y[i]);
  }
  return LabeledDataset(std::move(x), std::move(y), std::max<std::size_t>(2, max_label + 1));
}

void write_idx(const LabeledDataset& dataset, std::size_t rows, std::size_t cols, const std::filesystem::path& images,
               const std::filesystem::path& labels) {
  if (rows * cols != dataset.num_features()) throw std::invalid_argument("write_idx: rows*cols != features");
  std::ofstream img(images, std::ios::binary);
  std::ofstream lab(labels, std::ios::binary);
  if (!img || !lab) throw IoError("write_idx: cannot open output files");
  write_be32(img, kImageMagic);
  write_be32(img, static_cast<std::uint32_t>(dataset.size()));
  write_be32(img, static_cast<std::uint32_t>(rows));
  write_be32(img, static_cast<std::uint32_t>(cols));
  write_be32(lab, kLabelMagic);
  write_be32(lab, static_cast<std::uint32_t>(dataset.size()));
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    for (std::size_t p = 0; p < dataset.num_features(); ++p) {
      const double v = std::clamp(dataset.features()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)), 0.0, 1.0);
      img.put(static_cast<char>(static_cast<std::uint8_t>(std::lround(v * 255.0))));
    }
    if (dataset.label(i) > 255) throw std::invalid_argument("write_idx: label does not fit in a byte");
    lab.put(static_cast<char>(dataset.label(i)));
  }
}

std::string partition_to_json(const Partition& partition) {
  nlohmann::json workers = nlohmann::json::array();
  const auto weights = partition.realized_weights();
  for (std::size_t w = 0; w < partition.shards.size(); ++w) {
    workers.push_back({{"worker", w + 1},
                       {"size", partition.shards[w].size()},
                       {"weight", weights[w]},
                       {"indices", partition.shards[w]}});
  }
  return nlohmann::json{{"workers", workers}}.dump(2);
}

}  // namespace dagc::data
