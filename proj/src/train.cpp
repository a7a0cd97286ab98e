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

#include "dagc/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "dagc/alloc.hpp"
#include "dagc/error.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dagc::train {
namespace {

// Stream tags for derive_rng.
constexpr std::uint64_t kDatasetStream = 1;
constexpr std::uint64_t kWeightStream = 2;
constexpr std::uint64_t kPartitionStream = 3;
constexpr std::uint64_t kModelStream = 4;
constexpr std::uint64_t kSamplerStream = 100;
constexpr std::uint64_t kCompressorStream = 200;

template <typename E>
struct Names {
  E value;
  const char* name;
};

constexpr Names<Strategy> kStrategies[] = {
    {Strategy::dagc_r, "dagc_r"},           {Strategy::dagc_a, "dagc_a"},
    {Strategy::uniform_topk, "uniform_topk"}, {Strategy::uniform_ht, "uniform_ht"},
    {Strategy::accordion_r, "accordion_r"}, {Strategy::accordion_a, "accordion_a"},
    {Strategy::manual, "manual"}};
constexpr Names<WeightSource> kWeightSources[] = {{WeightSource::skew_ratio, "skew"},
                                                  {WeightSource::dichotomous, "dichotomous"},
                                                  {WeightSource::explicit_list, "explicit"}};
constexpr Names<Rounding> kRoundings[] = {{Rounding::ceil, "ceil"}, {Rounding::carry, "carry"}};
constexpr Names<DatasetKind> kDatasetKinds[] = {{DatasetKind::synthetic, "synthetic"}, {DatasetKind::idx, "idx"}};
constexpr Names<RelativeCompressor> kRelative[] = {{RelativeCompressor::top_k, "topk"},
                                                   {RelativeCompressor::random_k, "randomk"}};

template <typename E, std::size_t N>
std::string name_of(const Names<E> (&table)[N], E value) {
  for (const auto& entry : table) {
    if (entry.value == value) return entry.name;
  }
  throw std::logic_error("unnamed enum value");
}

template <typename E, std::size_t N>
E value_of(const Names<E> (&table)[N], const std::string& name, const char* what) {
  for (const auto& entry : table) {
    if (name == entry.name) return entry.value;
  }
  std::string allowed;
  for (const auto& entry : table) allowed += std::string(allowed.empty() ? "" : ", ") + entry.name;
  throw ConfigError(std::string("unknown ") + what + " '" + name + "' (expected one of: " + allowed + ")");
}

[[noreturn]] void range_error(const std::string& field, double value, const std::string& bound) {
  std::ostringstream msg;
  msg << "field '" << field << "' = " << value << " out of range: must be " << bound;
  throw ConfigError(msg.str());
}

bool needs_mean_ratio(Strategy s) {
  return s == Strategy::dagc_r || s == Strategy::uniform_topk || s == Strategy::accordion_r;
}

bool needs_mean_threshold(Strategy s) {
  return s == Strategy::dagc_a || s == Strategy::uniform_ht || s == Strategy::accordion_a;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::string to_string(Strategy s) { return name_of(kStrategies, s); }
std::string to_string(WeightSource s) { return name_of(kWeightSources, s); }
std::string to_string(Rounding r) { return name_of(kRoundings, r); }
std::string to_string(DatasetKind k) { return name_of(kDatasetKinds, k); }
std::string to_string(RelativeCompressor c) { return name_of(kRelative, c); }
Strategy strategy_from_string(const std::string& s) { return value_of(kStrategies, s, "strategy"); }
WeightSource weight_source_from_string(const std::string& s) { return value_of(kWeightSources, s, "weight source"); }
Rounding rounding_from_string(const std::string& s) { return value_of(kRoundings, s, "rounding"); }
DatasetKind dataset_kind_from_string(const std::string& s) { return value_of(kDatasetKinds, s, "dataset kind"); }
RelativeCompressor relative_compressor_from_string(const std::string& s) {
  return value_of(kRelative, s, "relative compressor");
}

bool is_relative(Strategy s, bool manual_uses_ratios) {
  if (s == Strategy::manual) return manual_uses_ratios;
  return needs_mean_ratio(s);
}

void TrainConfig::validate() const {
  if (dataset.kind == DatasetKind::synthetic) {
    if (dataset.samples < 1) range_error("dataset.samples", 0, ">= 1");
    if (dataset.test_samples < 1) range_error("dataset.test_samples", 0, ">= 1");
    if (dataset.features < 1) range_error("dataset.features", 0, ">= 1");
    if (dataset.classes < 2) range_error("dataset.classes", static_cast<double>(dataset.classes), ">= 2");
    if (!(dataset.centroid_scale > 0.0)) range_error("dataset.centroid_scale", dataset.centroid_scale, "> 0");
  } else {
    if (dataset.train_images.empty() || dataset.train_labels.empty() || dataset.test_images.empty() ||
        dataset.test_labels.empty()) {
      throw ConfigError("missing field: idx datasets need dataset.train_images, dataset.train_labels, "
                        "dataset.test_images and dataset.test_labels");
    }
  }

  if (workers < 1) range_error("partition.workers", 0, ">= 1");
  switch (weight_source) {
    case WeightSource::skew_ratio:
      if (workers < 2) range_error("partition.workers", static_cast<double>(workers), ">= 2 for skewed weights");
      if (!(skew_ratio >= 1.0)) range_error("partition.skew_ratio", skew_ratio, ">= 1");
      break;
    case WeightSource::dichotomous:
      if (workers < 2) range_error("partition.workers", static_cast<double>(workers), ">= 2 for dichotomous weights");
      if (!(p_large > 0.0 && p_large < 1.0)) range_error("partition.p_large", p_large, "in (0, 1)");
      break;
    case WeightSource::explicit_list:
      if (explicit_weights.size() != workers) {
        throw ConfigError("field 'partition.explicit' has " + std::to_string(explicit_weights.size()) +
                          " entries but partition.workers = " + std::to_string(workers));
      }
      for (double w : explicit_weights) {
        if (!(w > 0.0)) range_error("partition.explicit", w, "> 0 for every entry");
      }
      break;
  }
  if (!(alpha > 0.0)) range_error("partition.alpha", alpha, "> 0");

  if (needs_mean_ratio(strategy)) {
    if (!mean_ratio) throw ConfigError("missing field: strategy " + to_string(strategy) + " needs compression.mean_ratio");
    if (!(*mean_ratio > 0.0 && *mean_ratio < 1.0)) range_error("compression.mean_ratio", *mean_ratio, "in (0, 1)");
  }
  if (needs_mean_threshold(strategy)) {
    if (!mean_threshold) {
      throw ConfigError("missing field: strategy " + to_string(strategy) + " needs compression.mean_threshold");
    }
    if (!(*mean_threshold > 0.0)) range_error("compression.mean_threshold", *mean_threshold, "> 0");
  }
  if ((strategy == Strategy::dagc_r || strategy == Strategy::dagc_a) && workers < 2) {
    range_error("partition.workers", static_cast<double>(workers), ">= 2 for " + to_string(strategy));
  }
  if (strategy == Strategy::manual) {
    if (manual_ratios.empty() == manual_thresholds.empty()) {
      throw ConfigError("strategy manual needs exactly one of compression.ratios or compression.thresholds");
    }
    const auto& list = manual_ratios.empty() ? manual_thresholds : manual_ratios;
    const std::string field = manual_ratios.empty() ? "compression.thresholds" : "compression.ratios";
    if (list.size() != workers) {
      throw ConfigError("field '" + field + "' has " + std::to_string(list.size()) + " entries but partition.workers = " +
                        std::to_string(workers));
    }
    for (double v : list) {
      if (!manual_ratios.empty() && !(v > 0.0 && v <= 1.0)) range_error(field, v, "in (0, 1]");
      if (manual_ratios.empty() && !(v > 0.0)) range_error(field, v, "> 0");
    }
  }
  if (!(accordion_switch > 0.0)) range_error("compression.accordion_switch", accordion_switch, "> 0");
  if (accordion_epoch < 1) range_error("compression.accordion_epoch", 0, ">= 1");
  if (arch == model::Architecture::mlp1 && hidden < 1) range_error("model.hidden", 0, ">= 1");
  if (!(lr >= 0.0) || !std::isfinite(lr)) range_error("train.lr", lr, ">= 0");
  if (batch < 1) range_error("train.batch", 0, ">= 1");
  if (iterations < 1) range_error("train.iterations", 0, ">= 1");
  if (eval_interval < 1) range_error("train.eval_interval", 0, ">= 1");
}

DsgdSimulator::DsgdSimulator(std::vector<Worker> workers, std::size_t dim, Rounding rounding, std::uint64_t seed)
    : workers_(std::move(workers)), dim_(dim), rounding_(rounding) {
  if (workers_.empty()) throw std::invalid_argument("simulator: need at least one worker");
  if (dim_ == 0) throw std::invalid_argument("simulator: zero-dimensional model");
  errors_.assign(workers_.size(), DenseVector(dim_));
  credit_.assign(workers_.size(), 0.0);
  for (std::size_t i = 0; i < workers_.size(); ++i) {
    rngs_.push_back(derive_rng(seed, kCompressorStream, i));
    set_param(i, workers_[i].param);
  }
}

void DsgdSimulator::set_param(std::size_t worker, double param) {
  auto& w = workers_.at(worker);
  if (w.kind == CompressorKind::hard_threshold) {
    if (!(param > 0.0)) throw std::invalid_argument("simulator: threshold must be positive");
  } else if (!(param > 0.0 && param <= 1.0)) {
    throw std::invalid_argument("simulator: ratio must lie in (0, 1]");
  }
  w.param = param;
}

std::size_t DsgdSimulator::element_count(std::size_t worker) {
  const double ratio = workers_[worker].param;
  if (rounding_ == Rounding::ceil) return compress::element_budget(ratio, dim_);
  credit_[worker] += ratio * static_cast<double>(dim_);
  const double whole = std::floor(credit_[worker] + 1e-9);
  credit_[worker] = std::max(0.0, credit_[worker] - whole);
  return std::min(static_cast<std::size_t>(whole), dim_);
}

compress::SparseUpdate DsgdSimulator::compress_worker(std::size_t worker, const DenseVector& gradient) {
  const Worker& w = workers_.at(worker);
  compress::Compressor compressor;
  switch (w.kind) {
    case CompressorKind::top_k: {
      const std::size_t k = element_count(worker);
      compressor = [k](const DenseVector& x) { return compress::top_k_count(x.view(), k); };
      break;
    }
    case CompressorKind::random_k: {
      const std::size_t k = element_count(worker);
      Rng& rng = rngs_[worker];
      compressor = [k, &rng](const DenseVector& x) { return compress::random_k_count(x.view(), k, rng); };
      break;
    }
    case CompressorKind::hard_threshold: {
      const double threshold = w.param;
      compressor = [threshold](const DenseVector& x) { return compress::hard_threshold(x, threshold); };
      break;
    }
  }
  auto result = compress::compress_with_feedback(errors_[worker], gradient, compressor);
  errors_[worker] = std::move(result.error);
  return std::move(result.update);
}

void DsgdSimulator::apply(DenseVector& parameters, std::span<const compress::SparseUpdate> updates, double lr) const {
  if (parameters.size() != dim_ || updates.size() != workers_.size()) {
    throw std::invalid_argument("simulator: apply called with mismatched shapes");
  }
  std::vector<double> aggregate(dim_, 0.0);
  for (std::size_t i = 0; i < updates.size(); ++i) updates[i].scatter_add(aggregate, workers_[i].weight);
  for (std::size_t j = 0; j < dim_; ++j) parameters[j] -= lr * aggregate[j];
}

std::vector<compress::SparseUpdate> DsgdSimulator::step(DenseVector& parameters, std::span<const DenseVector> gradients,
                                                        double lr) {
  if (gradients.size() != workers_.size()) throw std::invalid_argument("simulator: one gradient per worker expected");
  std::vector<compress::SparseUpdate> updates;
  updates.reserve(workers_.size());
  for (std::size_t i = 0; i < workers_.size(); ++i) updates.push_back(compress_worker(i, gradients[i]));
  apply(parameters, updates, lr);
  return updates;
}

BatchSampler::BatchSampler(std::vector<std::size_t> shard, Rng rng) : order_(std::move(shard)), rng_(std::move(rng)) {
  if (order_.empty()) throw std::invalid_argument("batch sampler: empty shard");
  std::shuffle(order_.begin(), order_.end(), rng_);
}

std::vector<std::size_t> BatchSampler::next(std::size_t batch_size) {
  std::vector<std::size_t> batch;
  batch.reserve(batch_size);
  while (batch.size() < batch_size) {
    if (cursor_ == order_.size()) {
      std::shuffle(order_.begin(), order_.end(), rng_);
      cursor_ = 0;
    }
    batch.push_back(order_[cursor_++]);
  }
  return batch;
}

Rng batch_rng(std::uint64_t seed, std::size_t worker) { return derive_rng(seed, kSamplerStream, worker); }
Rng model_rng(std::uint64_t seed) { return derive_rng(seed, kModelStream); }

Datasets load_datasets(const TrainConfig& config) {
  const auto& spec = config.dataset;
  if (spec.kind == DatasetKind::idx) {
    auto train = data::load_idx(spec.train_images, spec.train_labels);
    auto test = data::load_idx(spec.test_images, spec.test_labels);
    if (train.num_features() != test.num_features()) {
      throw ConfigError("idx train and test sets have different feature counts");
    }
    return {std::move(train), std::move(test)};
  }
  Rng rng = spec.seed ? derive_rng(*spec.seed, kDatasetStream) : derive_rng(config.seed, kDatasetStream);
  auto all = data::synthetic_classification(spec.samples + spec.test_samples, spec.features, spec.classes, rng,
                                            spec.centroid_scale);
  return {all.slice(0, spec.samples), all.slice(spec.samples, all.size())};
}

std::vector<double> configured_weights(const TrainConfig& config) {
  switch (config.weight_source) {
    case WeightSource::skew_ratio: {
      Rng rng = derive_rng(config.seed, kWeightStream);
      return data::skewed_weights(config.workers, config.skew_ratio, rng).values();
    }
    case WeightSource::dichotomous:
      return data::dichotomous_weights(config.workers, config.p_large).values();
    case WeightSource::explicit_list: {
      std::vector<double> w = config.explicit_weights;
      std::sort(w.begin(), w.end(), std::greater<>());
      const double total = std::accumulate(w.begin(), w.end(), 0.0);
      for (double& v : w) v /= total;
      validate_weights(w);
      return w;
    }
  }
  throw std::logic_error("unhandled weight source");
}

std::size_t resolve_threads(const TrainConfig& config) {
  std::size_t threads = config.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DAGC_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap > 0) threads = std::min(threads, static_cast<std::size_t>(cap));
  }
  return std::max<std::size_t>(1, threads);
}

RunMetrics run_dsgd(const TrainConfig& config) {
  config.validate();
  const Datasets datasets = load_datasets(config);
  const data::LabeledDataset& train = datasets.train;

  const std::vector<double> target = configured_weights(config);
  Rng partition_rng = derive_rng(config.seed, kPartitionStream);
  const data::Partition partition = data::dirichlet_label_partition(train, target, config.alpha, partition_rng);
  const std::vector<double> weights = partition.realized_weights();
  const std::size_t n = weights.size();

  // Allocation happens once, before iteration 0.
  AllocationRecord record;
  record.strategy = to_string(config.strategy);
  record.weights = weights;
  CompressorKind kind = config.relative_compressor == RelativeCompressor::random_k ? CompressorKind::random_k
                                                                                   : CompressorKind::top_k;
  std::optional<compress::AccordionParams> accordion;
  switch (config.strategy) {
    case Strategy::dagc_r: {
      const auto a = alloc::dagc_r(WeightVector(weights), *config.mean_ratio);
      record.kind = "ratio";
      record.values = a.ratios();
      record.mean = a.mean_ratio();
      break;
    }
    case Strategy::dagc_a: {
      const auto a = alloc::dagc_a(WeightVector(weights), *config.mean_threshold);
      record.kind = "threshold";
      record.values = a.thresholds();
      record.mean = a.mean_threshold();
      kind = CompressorKind::hard_threshold;
      break;
    }
    case Strategy::uniform_topk:
      record.kind = "ratio";
      record.values.assign(n, *config.mean_ratio);
      record.mean = *config.mean_ratio;
      break;
    case Strategy::uniform_ht:
      record.kind = "threshold";
      record.values.assign(n, *config.mean_threshold);
      record.mean = *config.mean_threshold;
      kind = CompressorKind::hard_threshold;
      break;
    case Strategy::accordion_r:
      accordion = compress::accordion_ratio_params(*config.mean_ratio);
      record.kind = "adaptive_ratio";
      record.mean = *config.mean_ratio;
      break;
    case Strategy::accordion_a:
      accordion = compress::accordion_threshold_params(*config.mean_threshold);
      record.kind = "adaptive_threshold";
      record.mean = *config.mean_threshold;
      kind = CompressorKind::hard_threshold;
      break;
    case Strategy::manual:
      if (!config.manual_ratios.empty()) {
        const auto a = alloc::RatioAllocation::from_ratios(config.manual_ratios);
        record.kind = "ratio";
        record.values = a.ratios();
        record.mean = a.mean_ratio();
      } else {
        const auto a = alloc::ThresholdAllocation::from_thresholds(config.manual_thresholds);
        record.kind = "threshold";
        record.values = a.thresholds();
        record.mean = a.mean_threshold();
        kind = CompressorKind::hard_threshold;
      }
      break;
  }
  if (accordion) {
    record.values.assign(n, accordion->aggressive);
    record.aggressive = accordion->aggressive;
    record.conservative = accordion->conservative;
  }

  Rng init_rng = model_rng(config.seed);
  model::Model model(model::ModelShape{config.arch, train.num_features(), config.hidden,
                                       std::max(train.num_classes(), datasets.test.num_classes())},
                     init_rng);
  const std::size_t dim = model.dim();

  std::vector<DsgdSimulator::Worker> workers(n);
  for (std::size_t i = 0; i < n; ++i) workers[i] = {kind, record.values[i], weights[i]};
  DsgdSimulator sim(std::move(workers), dim, config.rounding, config.seed);

  std::vector<BatchSampler> samplers;
  for (std::size_t i = 0; i < n; ++i) {
    samplers.emplace_back(partition.shards[i], batch_rng(config.seed, i));
  }

  std::ofstream trace;
  if (!config.trace_path.empty()) {
    trace.open(config.trace_path, std::ios::binary);
    if (!trace) throw IoError("cannot open trace file " + config.trace_path);
  }

  RunMetrics metrics;
  metrics.allocation = record;
  metrics.partition = partition;
  metrics.elements_per_iteration.reserve(config.iterations);
  std::vector<std::uint64_t> cumulative(n, 0);
  std::uint64_t cumulative_total = 0;
  auto record_row = [&](std::size_t iteration) {
    metrics.rows.push_back(MetricsRow{iteration, model::mean_loss(model, train),
                                      model::evaluate(model, datasets.test), cumulative_total, cumulative});
  };

  compress::AccordionState accordion_state;
  accordion_state.switch_threshold = config.accordion_switch;
  std::vector<double> epoch_gradient(accordion ? dim : 0, 0.0);

  const int threads = static_cast<int>(std::min(resolve_threads(config), n));
  std::vector<DenseVector> gradients(n);
  std::vector<compress::SparseUpdate> updates(n);
  std::vector<std::exception_ptr> failures(n);

  record_row(0);
  for (std::size_t t = 0; t < config.iterations; ++t) {
#pragma omp parallel for num_threads(threads) schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
      const auto w = static_cast<std::size_t>(i);
      try {
        const auto batch = samplers[w].next(config.batch);
        gradients[w] = model::local_gradient(model, train, batch);
        updates[w] = sim.compress_worker(w, gradients[w]);
      } catch (...) {
        failures[w] = std::current_exception();
      }
    }
    for (auto& f : failures) {
      if (f) std::rethrow_exception(f);
    }

    sim.apply(model.parameters(), updates, config.lr);

    std::uint64_t step_total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      cumulative[i] += updates[i].nnz();
      step_total += updates[i].nnz();
      if (trace.is_open()) compress::write_update(trace, updates[i]);
    }
    cumulative_total += step_total;
    metrics.elements_per_iteration.push_back(step_total);

    if (accordion) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < dim; ++j) epoch_gradient[j] += weights[i] * gradients[i][j];
      }
      if ((t + 1) % config.accordion_epoch == 0) {
        double norm_sq = 0.0;
        for (double g : epoch_gradient) norm_sq += g * g;
        const auto choice = compress::accordion_select(accordion_state, std::sqrt(norm_sq), accordion->aggressive,
                                                       accordion->conservative);
        accordion_state = choice.state;
        for (std::size_t i = 0; i < n; ++i) sim.set_param(i, choice.param);
        std::fill(epoch_gradient.begin(), epoch_gradient.end(), 0.0);
      }
    }

    if ((t + 1) % config.eval_interval == 0 || t + 1 == config.iterations) record_row(t + 1);
  }
  metrics.final_parameters = model.parameters();
  return metrics;
}

void write_metrics_csv(std::ostream& out, const RunMetrics& metrics) {
  out << "iter,loss,acc,elements_total";
  for (std::size_t i = 0; i < metrics.num_workers(); ++i) out << ",elements_w" << (i + 1);
  out << '\n';
  for (const auto& row : metrics.rows) {
    out << row.iteration << ',' << format_double(row.train_loss) << ',' << format_double(row.test_accuracy) << ','
        << row.elements_total;
    for (auto e : row.elements_per_worker) out << ',' << e;
    out << '\n';
  }
}

void write_metrics_csv(const std::filesystem::path& path, const RunMetrics& metrics) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_metrics_csv(out, metrics);
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<MetricsRow> read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  auto fail = [&](std::size_t line, const std::string& why) -> std::runtime_error {
    return std::runtime_error(path.string() + ":" + std::to_string(line) + ": " + why);
  };
  std::string line;
  if (!std::getline(in, line)) throw fail(1, "empty file");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 4 || header[0] != "iter" || header[1] != "loss" || header[2] != "acc" ||
      header[3] != "elements_total") {
    throw fail(1, "unexpected header");
  }
  const std::size_t workers = header.size() - 4;
  std::vector<MetricsRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != header.size()) {
      throw fail(line_no, "expected " + std::to_string(header.size()) + " columns, found " + std::to_string(cells.size()));
    }
    try {
      std::size_t used = 0;
      MetricsRow row;
      row.iteration = std::stoull(cells[0], &used);
      if (used != cells[0].size()) throw std::invalid_argument("iter");
      row.train_loss = std::stod(cells[1], &used);
      if (used != cells[1].size()) throw std::invalid_argument("loss");
      row.test_accuracy = std::stod(cells[2], &used);
      if (used != cells[2].size()) throw std::invalid_argument("acc");
      row.elements_total = std::stoull(cells[3], &used);
      if (used != cells[3].size()) throw std::invalid_argument("elements_total");
      for (std::size_t w = 0; w < workers; ++w) row.elements_per_worker.push_back(std::stoull(cells[4 + w]));
      rows.push_back(std::move(row));
    } catch (const std::exception&) {
      throw fail(line_no, "malformed number");
    }
  }
  return rows;
}

TrafficSummary traffic_report(std::span<const TrafficInput> runs) {
  TrafficSummary summary;
  for (const auto& run : runs) {
    if (!run.metrics || run.metrics->elements_per_iteration.empty()) {
      throw std::invalid_argument("traffic_report: run '" + run.name + "' has no iterations");
    }
    const auto& per = run.metrics->elements_per_iteration;
    TrafficEntry e;
    e.name = run.name;
    e.total = std::accumulate(per.begin(), per.end(), std::uint64_t{0});
    e.mean_per_iteration = static_cast<double>(e.total) / static_cast<double>(per.size());
    e.min_per_iteration = *std::min_element(per.begin(), per.end());
    e.max_per_iteration = *std::max_element(per.begin(), per.end());
    summary.entries.push_back(e);
  }
  for (std::size_t a = 0; a < runs.size(); ++a) {
    for (std::size_t b = a + 1; b < runs.size(); ++b) {
      const auto& ra = runs[a];
      const auto& rb = runs[b];
      if (!ra.relative_budget || !rb.relative_budget) continue;
      if (std::abs(*ra.relative_budget - *rb.relative_budget) > 1e-12 * *ra.relative_budget) continue;
      const auto& pa = ra.metrics->elements_per_iteration;
      const auto& pb = rb.metrics->elements_per_iteration;
      const std::uint64_t allowed = std::max(ra.metrics->num_workers(), rb.metrics->num_workers());
      for (std::size_t t = 0; t < std::min(pa.size(), pb.size()); ++t) {
        const std::uint64_t gap = pa[t] > pb[t] ? pa[t] - pb[t] : pb[t] - pa[t];
        summary.max_parity_gap = std::max(summary.max_parity_gap, gap);
        if (gap > allowed && summary.parity_ok) {
          summary.parity_ok = false;
          summary.violation = ra.name + " vs " + rb.name + " differ by " + std::to_string(gap) + " elements at iteration " +
                              std::to_string(t + 1);
        }
      }
    }
  }
  return summary;
}

}  // namespace dagc::train
