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

// Non-uniform distributed SGD with error feedback. Every iteration each
// worker compresses (error + gradient) with its own parameter, keeps the
// remainder as its next error, and the server applies
// x <- x - lr * sum_i p_i * update_i in fixed worker order.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dagc/compress.hpp"
#include "dagc/data.hpp"
#include "dagc/model.hpp"
#include "dagc/random.hpp"
#include "dagc/vector.hpp"

namespace dagc::train {

enum class Strategy { dagc_r, dagc_a, uniform_topk, uniform_ht, accordion_r, accordion_a, manual };
enum class WeightSource { skew_ratio, dichotomous, explicit_list };
/// How a fractional element budget ratio*d becomes an integer count:
/// ceil gives max(1, ceil(ratio*d)) every step; carry accumulates the
/// fractional part per worker so the long-run count equals ratio*d exactly.
enum class Rounding { ceil, carry };
enum class DatasetKind { synthetic, idx };
enum class RelativeCompressor { top_k, random_k };
enum class CompressorKind { top_k, random_k, hard_threshold };

std::string to_string(Strategy s);
std::string to_string(WeightSource s);
std::string to_string(Rounding r);
std::string to_string(DatasetKind k);
std::string to_string(RelativeCompressor c);
Strategy strategy_from_string(const std::string& s);
WeightSource weight_source_from_string(const std::string& s);
Rounding rounding_from_string(const std::string& s);
DatasetKind dataset_kind_from_string(const std::string& s);
RelativeCompressor relative_compressor_from_string(const std::string& s);

bool is_relative(Strategy s, bool manual_uses_ratios);

struct DatasetSpec {
  DatasetKind kind = DatasetKind::synthetic;
  std::size_t samples = 5000;
  std::size_t test_samples = 1000;
  std::size_t features = 50;
  std::size_t classes = 10;
  double centroid_scale = 1.0;
  std::optional<std::uint64_t> seed;  // defaults to a stream of the master seed
  std::string train_images;
  std::string train_labels;
  std::string test_images;
  std::string test_labels;

  friend bool operator==(const DatasetSpec&, const DatasetSpec&) = default;
};

struct TrainConfig {
  DatasetSpec dataset;

  std::size_t workers = 10;
  WeightSource weight_source = WeightSource::skew_ratio;
  double skew_ratio = 10.0;
  double p_large = 0.5;
  std::vector<double> explicit_weights;
  double alpha = 0.5;

  Strategy strategy = Strategy::uniform_topk;
  std::optional<double> mean_ratio;
  std::optional<double> mean_threshold;
  std::vector<double> manual_ratios;
  std::vector<double> manual_thresholds;
  RelativeCompressor relative_compressor = RelativeCompressor::top_k;
  Rounding rounding = Rounding::ceil;
  double accordion_switch = 0.5;
  std::size_t accordion_epoch = 50;

  model::Architecture arch = model::Architecture::softmax_regression;
  std::size_t hidden = 32;

  double lr = 0.1;
  std::size_t batch = 32;
  std::size_t iterations = 1000;
  std::size_t eval_interval = 50;
  std::uint64_t seed = 1;
  std::size_t threads = 0;  // 0: DAGC_THREADS or hardware concurrency
  std::string trace_path;   // empty: no sparse-update trace

  /// Throws ConfigError naming the offending field and its bound.
  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Compression parameters handed to the workers before training.
struct AllocationRecord {
  std::string strategy;
  std::string kind;  // "ratio", "threshold", "adaptive_ratio", "adaptive_threshold"
  std::vector<double> weights;
  std::vector<double> values;  // per-worker delta_i or lambda_i (initial values when adaptive)
  double mean = 0.0;           // mean ratio, or harmonic mean threshold
  std::optional<double> aggressive;
  std::optional<double> conservative;
  double skew_ratio() const { return weights.front() / weights.back(); }
};

struct MetricsRow {
  std::size_t iteration = 0;
  double train_loss = 0.0;
  double test_accuracy = 0.0;
  std::uint64_t elements_total = 0;               // cumulative, all workers
  std::vector<std::uint64_t> elements_per_worker;  // cumulative

  friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

struct RunMetrics {
  std::vector<MetricsRow> rows;
  std::vector<std::uint64_t> elements_per_iteration;  // all workers, one entry per iteration
  AllocationRecord allocation;
  data::Partition partition;
  DenseVector final_parameters;

  std::size_t num_workers() const { return allocation.weights.size(); }
};

/// Dense model vector plus per-worker error-feedback state.
class DsgdSimulator {
 public:
  struct Worker {
    CompressorKind kind = CompressorKind::top_k;
    double param = 1.0;  // ratio or threshold
    double weight = 1.0;
  };

  DsgdSimulator(std::vector<Worker> workers, std::size_t dim, Rounding rounding, std::uint64_t seed);

  std::size_t num_workers() const { return workers_.size(); }
  std::size_t dim() const { return dim_; }
  const DenseVector& error(std::size_t worker) const { return errors_[worker]; }
  void set_param(std::size_t worker, double param);
  double param(std::size_t worker) const { return workers_[worker].param; }

  /// Worker side for one worker: compress error + gradient and update the
  /// error. Safe to call concurrently for distinct workers.
  compress::SparseUpdate compress_worker(std::size_t worker, const DenseVector& gradient);

  /// Server side: parameters -= lr * sum_i p_i * updates[i], accumulated in
  /// worker order.
  void apply(DenseVector& parameters, std::span<const compress::SparseUpdate> updates, double lr) const;

  /// compress_worker for every worker then apply; returns the updates.
  std::vector<compress::SparseUpdate> step(DenseVector& parameters, std::span<const DenseVector> gradients, double lr);

 private:
  std::size_t element_count(std::size_t worker);

  std::vector<Worker> workers_;
  std::size_t dim_;
  Rounding rounding_;
  std::vector<DenseVector> errors_;
  std::vector<double> credit_;
  std::vector<Rng> rngs_;
};

/// Cycles through a shard in freshly shuffled order; a batch that runs past
/// the end reshuffles and continues.
class BatchSampler {
 public:
  BatchSampler(std::vector<std::size_t> shard, Rng rng);
  std::vector<std::size_t> next(std::size_t batch_size);

 private:
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
  Rng rng_;
};

/// Random streams used by run_dsgd, exposed so a plain SGD loop can be
/// replayed against it.
Rng batch_rng(std::uint64_t seed, std::size_t worker);
Rng model_rng(std::uint64_t seed);

/// Training and test splits described by the config's dataset section.
struct Datasets {
  data::LabeledDataset train;
  data::LabeledDataset test;
};
Datasets load_datasets(const TrainConfig& config);

/// Target weights from the configured source (descending, summing to one).
std::vector<double> configured_weights(const TrainConfig& config);

/// Full run: data, partition, allocation, then iterations. Throws
/// BudgetInfeasibleError before the first iteration when the allocation
/// cannot be honoured.
RunMetrics run_dsgd(const TrainConfig& config);

/// Threads used for worker gradients: config.threads if set, else
/// DAGC_THREADS, else hardware concurrency.
std::size_t resolve_threads(const TrainConfig& config);

void write_metrics_csv(std::ostream& out, const RunMetrics& metrics);
void write_metrics_csv(const std::filesystem::path& path, const RunMetrics& metrics);
/// Parses the CSV written above; throws std::runtime_error naming the line
/// on malformed input.
std::vector<MetricsRow> read_metrics_csv(const std::filesystem::path& path);

struct TrafficInput {
  std::string name;
  const RunMetrics* metrics = nullptr;
  std::optional<double> relative_budget;  // n * mean ratio for relative strategies
};

struct TrafficEntry {
  std::string name;
  std::uint64_t total = 0;
  double mean_per_iteration = 0.0;
  std::uint64_t min_per_iteration = 0;
  std::uint64_t max_per_iteration = 0;
};

struct TrafficSummary {
  std::vector<TrafficEntry> entries;
  bool parity_ok = true;
  std::uint64_t max_parity_gap = 0;  // largest per-iteration difference within a budget group
  std::string violation;
};

/// Totals per run; relative runs with equal n*mean ratio must agree per
/// iteration within n elements.
TrafficSummary traffic_report(std::span<const TrafficInput> runs);

}  // namespace dagc::train
