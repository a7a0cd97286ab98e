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

#include "dagc/compress.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "dagc/error.hpp"

namespace dagc::compress {
namespace {

void check_ratio(double ratio) {
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw std::invalid_argument("compression ratio must lie in (0, 1], got " + std::to_string(ratio));
  }
}

void check_nonempty(std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("cannot compress an empty vector");
}

SparseUpdate gather(std::span<const double> x, std::vector<std::uint32_t> indices) {
  std::vector<double> values;
  values.reserve(indices.size());
  for (std::uint32_t i : indices) values.push_back(x[i]);
  return SparseUpdate(std::move(indices), std::move(values), x.size());
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  if (offset + 4 > bytes.size()) throw FormatError("sparse update: truncated record", bytes.size());
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(bytes[offset + k]) << (8 * k);
  return v;
}

}  // namespace

SparseUpdate::SparseUpdate(std::vector<std::uint32_t> indices, std::vector<double> values, std::size_t dim)
    : indices_(std::move(indices)), values_(std::move(values)), dim_(dim) {
  if (indices_.size() != values_.size()) {
    throw std::invalid_argument("sparse update: indices and values differ in length");
  }
  if (indices_.size() > dim_) throw std::invalid_argument("sparse update: nnz exceeds dim");
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    if (indices_[k] >= dim_) throw std::invalid_argument("sparse update: index out of range");
    if (k > 0 && indices_[k] <= indices_[k - 1]) {
      throw std::invalid_argument("sparse update: indices not strictly increasing");
    }
  }
}

DenseVector SparseUpdate::densify() const {
  DenseVector out(dim_);
  for (std::size_t k = 0; k < indices_.size(); ++k) out[indices_[k]] = values_[k];
  return out;
}

void SparseUpdate::scatter_add(std::span<double> dst, double scale) const {
  if (dst.size() != dim_) throw std::invalid_argument("scatter_add: dimension mismatch");
  for (std::size_t k = 0; k < indices_.size(); ++k) dst[indices_[k]] += scale * values_[k];
}

std::size_t element_budget(double ratio, std::size_t dim) {
  check_ratio(ratio);
  const double raw = std::ceil(ratio * static_cast<double>(dim) - 1e-9);
  const auto k = static_cast<std::size_t>(std::max(raw, 1.0));
  return std::min(k, dim);
}

SparseUpdate top_k_count(std::span<const double> x, std::size_t k) {
  check_nonempty(x.size());
  if (x.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("top_k: dimension exceeds 32-bit index range");
  }
  k = std::min(k, x.size());
  std::vector<std::uint32_t> order(x.size());
  std::iota(order.begin(), order.end(), 0u);
  if (k < x.size()) {
    auto larger = [&](std::uint32_t a, std::uint32_t b) {
      const double ma = std::abs(x[a]);
      const double mb = std::abs(x[b]);
      return ma > mb || (ma == mb && a < b);
    };
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), larger);
    order.resize(k);
    std::sort(order.begin(), order.end());
  }
  return gather(x, std::move(order));
}

SparseUpdate top_k(const DenseVector& x, double ratio) {
  check_nonempty(x.size());
  return top_k_count(x.view(), element_budget(ratio, x.size()));
}

SparseUpdate random_k_count(std::span<const double> x, std::size_t k, Rng& rng) {
  check_nonempty(x.size());
  k = std::min(k, x.size());
  std::vector<std::uint32_t> all(x.size());
  std::iota(all.begin(), all.end(), 0u);
  std::vector<std::uint32_t> picked;
  picked.reserve(k);
  // selection sampling keeps the input order, so picked is already sorted
  std::sample(all.begin(), all.end(), std::back_inserter(picked), k, rng);
  return gather(x, std::move(picked));
}

SparseUpdate random_k(const DenseVector& x, double ratio, Rng& rng) {
  check_nonempty(x.size());
  return random_k_count(x.view(), element_budget(ratio, x.size()), rng);
}

SparseUpdate hard_threshold(const DenseVector& x, double threshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("hard_threshold: threshold must be positive");
  std::vector<std::uint32_t> kept;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::abs(x[i]) > threshold) kept.push_back(static_cast<std::uint32_t>(i));
  }
  return gather(x.view(), std::move(kept));
}

FeedbackResult compress_with_feedback(const DenseVector& error, const DenseVector& gradient,
                                      const Compressor& compressor) {
  if (error.size() != gradient.size()) {
    throw std::invalid_argument("compress_with_feedback: error has dim " + std::to_string(error.size()) +
                                ", gradient has dim " + std::to_string(gradient.size()));
  }
  std::vector<double> corrected(gradient.size());
  for (std::size_t i = 0; i < corrected.size(); ++i) corrected[i] = error[i] + gradient[i];
  DenseVector corrected_vec(std::move(corrected));
  SparseUpdate update = compressor(corrected_vec);
  if (update.dim() != corrected_vec.size()) {
    throw std::invalid_argument("compress_with_feedback: compressor changed the dimension");
  }
  DenseVector residual = std::move(corrected_vec);
  const auto idx = update.indices();
  const auto val = update.values();
  for (std::size_t k = 0; k < idx.size(); ++k) residual[idx[k]] -= val[k];
  return FeedbackResult{std::move(update), std::move(residual)};
}

AccordionChoice accordion_select(const AccordionState& state, double epoch_grad_norm, double aggressive,
                                 double conservative) {
  if (!(epoch_grad_norm >= 0.0)) throw std::invalid_argument("accordion: gradient norm must be >= 0");
  bool critical = true;
  if (state.previous_epoch_grad_norm) {
    const double prev = *state.previous_epoch_grad_norm;
    if (prev > 0.0) {
      critical = std::abs(prev - epoch_grad_norm) / prev > state.switch_threshold;
    } else {
      critical = epoch_grad_norm > 0.0;
    }
  }
  AccordionState next = state;
  next.previous_epoch_grad_norm = epoch_grad_norm;
  next.current_mode = critical ? AccordionMode::aggressive : AccordionMode::conservative;
  return {critical ? aggressive : conservative, next};
}

AccordionParams accordion_ratio_params(double mean_ratio) {
  check_ratio(mean_ratio);
  return {mean_ratio / 10.0, std::min(1.0, 10.0 * mean_ratio)};
}

AccordionParams accordion_threshold_params(double mean_threshold) {
  if (!(mean_threshold > 0.0)) throw std::invalid_argument("accordion: mean threshold must be positive");
  return {10.0 * mean_threshold, mean_threshold / 10.0};
}

std::vector<std::uint8_t> serialize(const SparseUpdate& update) {
  if (update.dim() > std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("serialize: dimension exceeds u32");
  }
  std::vector<std::uint8_t> out;
  out.reserve(8 + 8 * update.nnz());
  put_u32(out, static_cast<std::uint32_t>(update.nnz()));
  put_u32(out, static_cast<std::uint32_t>(update.dim()));
  const auto idx = update.indices();
  const auto val = update.values();
  for (std::size_t k = 0; k < idx.size(); ++k) {
    put_u32(out, idx[k]);
    put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(val[k])));
  }
  return out;
}

void write_update(std::ostream& out, const SparseUpdate& update) {
  const auto bytes = serialize(update);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

SparseUpdate deserialize(std::span<const std::uint8_t> bytes, std::size_t* consumed) {
  const std::uint32_t nnz = get_u32(bytes, 0);
  const std::uint32_t dim = get_u32(bytes, 4);
  if (nnz > dim) throw FormatError("sparse update: nnz " + std::to_string(nnz) + " exceeds dim", 0);
  const std::size_t length = 8 + 8 * static_cast<std::size_t>(nnz);
  if (bytes.size() < length) throw FormatError("sparse update: truncated record", bytes.size());
  std::vector<std::uint32_t> indices(nnz);
  std::vector<double> values(nnz);
  for (std::size_t k = 0; k < nnz; ++k) {
    const std::size_t at = 8 + 8 * k;
    indices[k] = get_u32(bytes, at);
    values[k] = std::bit_cast<float>(get_u32(bytes, at + 4));
    if (indices[k] >= dim || (k > 0 && indices[k] <= indices[k - 1])) {
      throw FormatError("sparse update: invalid index", at);
    }
  }
  if (consumed) *consumed = length;
  return SparseUpdate(std::move(indices), std::move(values), dim);
}

}  // namespace dagc::compress
