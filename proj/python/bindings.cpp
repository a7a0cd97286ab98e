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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "dagc/alloc.hpp"
#include "dagc/compress.hpp"
#include "dagc/config.hpp"
#include "dagc/data.hpp"
#include "dagc/error.hpp"
#include "dagc/experiment.hpp"
#include "dagc/train.hpp"

namespace py = pybind11;

namespace {

using namespace dagc;

py::tuple sparse_tuple(const compress::SparseUpdate& u) {
  return py::make_tuple(std::vector<std::uint32_t>(u.indices().begin(), u.indices().end()),
                        std::vector<double>(u.values().begin(), u.values().end()));
}

py::dict allocation_dict(const train::AllocationRecord& r) {
  py::dict d;
  d["strategy"] = r.strategy;
  d["kind"] = r.kind;
  d["weights"] = r.weights;
  d["values"] = r.values;
  d["mean"] = r.mean;
  d["aggressive"] = r.aggressive;
  d["conservative"] = r.conservative;
  return d;
}

py::dict run(const std::string& config_text) {
  const train::TrainConfig config = config::parse_config_text(config_text);
  train::RunMetrics metrics;
  {
    py::gil_scoped_release release;
    metrics = train::run_dsgd(config);
  }
  py::list rows;
  for (const auto& row : metrics.rows) {
    py::dict r;
    r["iteration"] = row.iteration;
    r["loss"] = row.train_loss;
    r["accuracy"] = row.test_accuracy;
    r["elements_total"] = row.elements_total;
    r["elements_per_worker"] = row.elements_per_worker;
    rows.append(r);
  }
  py::dict out;
  out["rows"] = rows;
  out["allocation"] = allocation_dict(metrics.allocation);
  out["elements_per_iteration"] = metrics.elements_per_iteration;
  out["final_parameters"] = metrics.final_parameters.values();
  return out;
}

}  // namespace

PYBIND11_MODULE(_dagc, m) {
  m.doc() = "Data-aware compression ratio allocation and a distributed SGD simulator";

  py::register_exception<BudgetInfeasibleError>(m, "BudgetInfeasibleError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const IoError& e) {
      py::set_error(PyExc_OSError, e.what());
    }
  });

  m.def(
      "phi",
      [](const std::vector<double>& ratios, const std::vector<double>& weights) {
        return alloc::phi(alloc::RatioAllocation::from_ratios(ratios), WeightVector(weights));
      },
      py::arg("ratios"), py::arg("weights"), "Key convergence factor (sum p_i / sqrt(d_i)) / sqrt(min d).");

  m.def(
      "dagc_r",
      [](const std::vector<double>& weights, double mean_ratio) {
        return alloc::dagc_r(WeightVector(weights), mean_ratio).ratios();
      },
      py::arg("weights"), py::arg("mean_ratio"), "Per-worker compression ratios summing to n * mean_ratio.");

  m.def(
      "dagc_r_pivot",
      [](const std::vector<double>& weights, double mean_ratio) {
        return alloc::dagc_r_trace(WeightVector(weights), mean_ratio).best_pivot;
      },
      py::arg("weights"), py::arg("mean_ratio"));

  m.def(
      "dagc_a",
      [](const std::vector<double>& weights, double mean_threshold) {
        return alloc::dagc_a(WeightVector(weights), mean_threshold).thresholds();
      },
      py::arg("weights"), py::arg("mean_threshold"), "Per-worker thresholds with the given harmonic mean.");

  m.def(
      "key_factor_absolute",
      [](const std::vector<double>& weights, const std::vector<double>& thresholds) {
        return alloc::key_factor_absolute(WeightVector(weights),
                                          alloc::ThresholdAllocation::from_thresholds(thresholds));
      },
      py::arg("weights"), py::arg("thresholds"));

  m.def(
      "top_k", [](const std::vector<double>& x, double ratio) { return sparse_tuple(compress::top_k(DenseVector(x), ratio)); },
      py::arg("x"), py::arg("ratio"), "Returns (indices, values).");
  m.def(
      "random_k",
      [](const std::vector<double>& x, double ratio, std::uint64_t seed) {
        Rng rng(seed);
        return sparse_tuple(compress::random_k(DenseVector(x), ratio, rng));
      },
      py::arg("x"), py::arg("ratio"), py::arg("seed"));
  m.def(
      "hard_threshold",
      [](const std::vector<double>& x, double threshold) {
        return sparse_tuple(compress::hard_threshold(DenseVector(x), threshold));
      },
      py::arg("x"), py::arg("threshold"));

  m.def(
      "skewed_weights",
      [](std::size_t n, double skew_ratio, std::uint64_t seed) {
        Rng rng(seed);
        return data::skewed_weights(n, skew_ratio, rng).values();
      },
      py::arg("n"), py::arg("skew_ratio"), py::arg("seed"));
  m.def(
      "dichotomous_weights", [](std::size_t n, double p_large) { return data::dichotomous_weights(n, p_large).values(); },
      py::arg("n"), py::arg("p_large"));

  m.def(
      "normalize_config", [](const std::string& text) { return config::to_toml(config::parse_config_text(text)); },
      py::arg("text"), "Parses and validates a config, returning it with every field spelled out.");
  m.def("run", &run, py::arg("config_text"), "Runs one simulation and returns its metrics.");

  m.def(
      "savings_percent",
      [](std::optional<double> run_iterations, std::optional<double> baseline) {
        return experiment::savings_percent(run_iterations, baseline);
      },
      py::arg("run_iterations"), py::arg("baseline"));
}
