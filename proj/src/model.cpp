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

#include "dagc/model.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace dagc::model {
namespace {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<Matrix>;
using ConstMatrixMap = Eigen::Map<const Matrix>;
using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;
using VectorMap = Eigen::Map<Eigen::VectorXd>;

Eigen::Index idx(std::size_t v) { return static_cast<Eigen::Index>(v); }

void check_compatible(const Model& model, const data::LabeledDataset& dataset) {
  const auto& s = model.shape();
  if (dataset.num_features() != s.features) {
    throw std::invalid_argument("model expects " + std::to_string(s.features) + " features, dataset has " +
                                std::to_string(dataset.num_features()));
  }
  if (dataset.num_classes() > s.classes) {
    throw std::invalid_argument("dataset has more classes than the model outputs");
  }
}

Matrix gather_rows(const data::LabeledDataset& dataset, std::span<const std::size_t> rows) {
  Matrix x(idx(rows.size()), idx(dataset.num_features()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= dataset.size()) throw std::out_of_range("batch index outside dataset");
    x.row(idx(r)) = dataset.row(rows[r]);
  }
  return x;
}

// Row-wise softmax in place; returns the summed cross-entropy of labels.
double softmax_rows(Matrix& logits, const data::LabeledDataset& dataset, std::span<const std::size_t> rows) {
  double loss = 0.0;
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double peak = logits.row(r).maxCoeff();
    logits.row(r) = (logits.row(r).array() - peak).exp();
    const double total = logits.row(r).sum();
    const auto y = idx(dataset.label(rows[static_cast<std::size_t>(r)]));
    loss += std::log(total) - std::log(logits(r, y));
    logits.row(r) /= total;
  }
  return loss;
}

struct Layers {
  ConstMatrixMap w1;
  ConstVectorMap b1;
  ConstMatrixMap w2;
  ConstVectorMap b2;
};

// Views the flattened parameters; for softmax regression only w2/b2 are used
// and w1/b1 are empty.
Layers layers(const ModelShape& s, const double* p) {
  if (s.arch == Architecture::softmax_regression) {
    return {ConstMatrixMap(p, 0, idx(s.features)), ConstVectorMap(p, 0),
            ConstMatrixMap(p, idx(s.classes), idx(s.features)),
            ConstVectorMap(p + s.classes * s.features, idx(s.classes))};
  }
  const std::size_t w1 = s.hidden * s.features;
  const std::size_t w2 = s.classes * s.hidden;
  return {ConstMatrixMap(p, idx(s.hidden), idx(s.features)), ConstVectorMap(p + w1, idx(s.hidden)),
          ConstMatrixMap(p + w1 + s.hidden, idx(s.classes), idx(s.hidden)),
          ConstVectorMap(p + w1 + s.hidden + w2, idx(s.classes))};
}

struct Forward {
  Matrix hidden;  // mlp1 activations, empty for softmax regression
  Matrix probs;   // logits before softmax_rows
};

Forward forward(const Model& model, const Matrix& x) {
  const auto& s = model.shape();
  const Layers l = layers(s, model.parameters().view().data());
  Forward f;
  if (s.arch == Architecture::softmax_regression) {
    f.probs = x * l.w2.transpose();
  } else {
    f.hidden = ((x * l.w1.transpose()).rowwise() + l.b1.transpose()).array().tanh();
    f.probs = f.hidden * l.w2.transpose();
  }
  f.probs.rowwise() += l.b2.transpose();
  return f;
}

}  // namespace

std::string to_string(Architecture arch) {
  return arch == Architecture::softmax_regression ? "softmax" : "mlp";
}

Architecture architecture_from_string(const std::string& name) {
  if (name == "softmax" || name == "softmax_regression" || name == "logistic") return Architecture::softmax_regression;
  if (name == "mlp" || name == "mlp1") return Architecture::mlp1;
  throw std::invalid_argument("unknown model architecture '" + name + "'");
}

std::size_t ModelShape::dim() const {
  if (arch == Architecture::softmax_regression) return classes * (features + 1);
  return hidden * (features + 1) + classes * (hidden + 1);
}

Model::Model(ModelShape shape, Rng& rng) : shape_(shape), parameters_(shape.dim()) {
  if (shape_.features == 0 || shape_.classes < 2) throw std::invalid_argument("model: bad shape");
  if (shape_.arch == Architecture::mlp1) {
    if (shape_.hidden == 0) throw std::invalid_argument("model: mlp needs hidden units");
    auto fill = [&](std::size_t offset, std::size_t count, std::size_t fan_in) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
      std::uniform_real_distribution<double> u(-bound, bound);
      for (std::size_t i = 0; i < count; ++i) parameters_[offset + i] = u(rng);
    };
    fill(0, shape_.hidden * shape_.features, shape_.features);
    fill(shape_.hidden * (shape_.features + 1), shape_.classes * shape_.hidden, shape_.hidden);
  }
}

Model::Model(ModelShape shape, DenseVector parameters) : shape_(shape), parameters_(std::move(parameters)) {
  if (parameters_.size() != shape_.dim()) {
    throw std::invalid_argument("model: parameter length " + std::to_string(parameters_.size()) +
                                " does not match architecture dimension " + std::to_string(shape_.dim()));
  }
}

LossAndGradient loss_and_gradient(const Model& model, const data::LabeledDataset& dataset,
                                  std::span<const std::size_t> batch) {
  if (batch.empty()) throw std::invalid_argument("local_gradient: empty batch");
  check_compatible(model, dataset);
  const auto& s = model.shape();
  const Matrix x = gather_rows(dataset, batch);
  Forward f = forward(model, x);
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  const double loss = softmax_rows(f.probs, dataset, batch) * inv_b;

  // dL/dlogits = (softmax - onehot) / B
  Matrix delta = std::move(f.probs);
  for (std::size_t r = 0; r < batch.size(); ++r) delta(idx(r), idx(dataset.label(batch[r]))) -= 1.0;
  delta *= inv_b;

  std::vector<double> grad(s.dim(), 0.0);
  double* g = grad.data();
  if (s.arch == Architecture::softmax_regression) {
    MatrixMap(g, idx(s.classes), idx(s.features)) = delta.transpose() * x;
    VectorMap(g + s.classes * s.features, idx(s.classes)) = delta.colwise().sum().transpose();
  } else {
    const Layers l = layers(s, model.parameters().view().data());
    const std::size_t w1 = s.hidden * s.features;
    const std::size_t w2 = s.classes * s.hidden;
    MatrixMap(g + w1 + s.hidden, idx(s.classes), idx(s.hidden)) = delta.transpose() * f.hidden;
    VectorMap(g + w1 + s.hidden + w2, idx(s.classes)) = delta.colwise().sum().transpose();
    Matrix dpre = (delta * l.w2).array() * (1.0 - f.hidden.array().square());
    MatrixMap(g, idx(s.hidden), idx(s.features)) = dpre.transpose() * x;
    VectorMap(g + w1, idx(s.hidden)) = dpre.colwise().sum().transpose();
  }
  return {loss, DenseVector(std::move(grad))};
}

DenseVector local_gradient(const Model& model, const data::LabeledDataset& dataset,
                           std::span<const std::size_t> batch) {
  return loss_and_gradient(model, dataset, batch).gradient;
}

double mean_loss(const Model& model, const data::LabeledDataset& dataset, std::span<const std::size_t> indices) {
  check_compatible(model, dataset);
  std::vector<std::size_t> all;
  if (indices.empty()) {
    all.resize(dataset.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    indices = all;
  }
  if (indices.empty()) throw std::invalid_argument("mean_loss: empty dataset");
  const Matrix x = gather_rows(dataset, indices);
  Forward f = forward(model, x);
  return softmax_rows(f.probs, dataset, indices) / static_cast<double>(indices.size());
}

double evaluate(const Model& model, const data::LabeledDataset& test) {
  if (test.size() == 0) throw std::invalid_argument("evaluate: empty test set");
  check_compatible(model, test);
  const Forward f = forward(model, test.features());
  std::size_t correct = 0;
  for (Eigen::Index r = 0; r < f.probs.rows(); ++r) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < f.probs.cols(); ++c) {
      if (f.probs(r, c) > f.probs(r, best)) best = c;
    }
    if (static_cast<std::uint32_t>(best) == test.label(static_cast<std::size_t>(r))) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

}  // namespace dagc::model
