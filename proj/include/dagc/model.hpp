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

// Desk-scale classifiers with analytic cross-entropy gradients.

#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "dagc/data.hpp"
#include "dagc/random.hpp"
#include "dagc/vector.hpp"

namespace dagc::model {

enum class Architecture { softmax_regression, mlp1 };

std::string to_string(Architecture arch);
Architecture architecture_from_string(const std::string& name);

struct ModelShape {
  Architecture arch = Architecture::softmax_regression;
  std::size_t features = 0;
  std::size_t hidden = 0;  // mlp1 only
  std::size_t classes = 0;

  /// Flattened parameter count. Softmax: W (classes x features) then bias.
  /// MLP: W1 (hidden x features), b1, W2 (classes x hidden), b2.
  std::size_t dim() const;
};

class Model {
 public:
  /// Softmax regression starts at zero; the MLP draws U(-1/sqrt(fan_in),
  /// 1/sqrt(fan_in)) weights from rng and zero biases.
  Model(ModelShape shape, Rng& rng);
  Model(ModelShape shape, DenseVector parameters);

  const ModelShape& shape() const { return shape_; }
  std::size_t dim() const { return parameters_.size(); }
  const DenseVector& parameters() const { return parameters_; }
  DenseVector& parameters() { return parameters_; }

 private:
  ModelShape shape_;
  DenseVector parameters_;
};

struct LossAndGradient {
  double loss;
  DenseVector gradient;
};

/// Mean cross-entropy and its gradient over the given rows of dataset.
LossAndGradient loss_and_gradient(const Model& model, const data::LabeledDataset& dataset,
                                  std::span<const std::size_t> batch);

/// Gradient part of loss_and_gradient. Throws on an empty batch.
DenseVector local_gradient(const Model& model, const data::LabeledDataset& dataset,
                           std::span<const std::size_t> batch);

/// Mean cross-entropy over rows (all rows when indices is empty).
double mean_loss(const Model& model, const data::LabeledDataset& dataset, std::span<const std::size_t> indices = {});

/// Top-1 accuracy; ties in the logits resolve to the lower class.
double evaluate(const Model& model, const data::LabeledDataset& test);

}  // namespace dagc::model
