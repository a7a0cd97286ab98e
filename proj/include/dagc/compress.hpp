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

// Gradient sparsifiers, the error-feedback transform and the ACCORDION
// switching rule used as an adaptive baseline.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "dagc/random.hpp"
#include "dagc/vector.hpp"

namespace dagc::compress {

/// Sparse (index, value) pairs over a dense space of size dim. Indices are
/// strictly increasing and below dim.
class SparseUpdate {
 public:
  SparseUpdate() = default;
  SparseUpdate(std::vector<std::uint32_t> indices, std::vector<double> values, std::size_t dim);

  static SparseUpdate empty(std::size_t dim) { return SparseUpdate({}, {}, dim); }

  std::size_t nnz() const { return indices_.size(); }
  std::size_t dim() const { return dim_; }
  std::span<const std::uint32_t> indices() const { return indices_; }
  std::span<const double> values() const { return values_; }

  DenseVector densify() const;
  /// dst += scale * this, in index order.
  void scatter_add(std::span<double> dst, double scale) const;

  friend bool operator==(const SparseUpdate&, const SparseUpdate&) = default;

 private:
  std::vector<std::uint32_t> indices_;
  std::vector<double> values_;
  std::size_t dim_ = 0;
};

/// k = max(1, ceil(ratio * dim)). A 1e-9 slack absorbs representation error
/// so that e.g. 0.001 * 10000 yields 10 rather than 11.
std::size_t element_budget(double ratio, std::size_t dim);

/// Keeps the k largest-magnitude coordinates; equal magnitudes prefer the
/// lower index. k may be zero (empty update).
SparseUpdate top_k_count(std::span<const double> x, std::size_t k);
SparseUpdate top_k(const DenseVector& x, double ratio);

/// Keeps k coordinates sampled uniformly without replacement.
SparseUpdate random_k_count(std::span<const double> x, std::size_t k, Rng& rng);
SparseUpdate random_k(const DenseVector& x, double ratio, Rng& rng);

/// Keeps coordinates with |x_j| strictly greater than the threshold.
SparseUpdate hard_threshold(const DenseVector& x, double threshold);

using Compressor = std::function<SparseUpdate(const DenseVector&)>;

struct FeedbackResult {
  SparseUpdate update;
  DenseVector error;  // residual carried into the next step
};

/// update = c(e + g); error = (e + g) - densify(update).
FeedbackResult compress_with_feedback(const DenseVector& error, const DenseVector& gradient,
                                      const Compressor& compressor);

enum class AccordionMode { aggressive, conservative };

struct AccordionState {
  std::optional<double> previous_epoch_grad_norm;
  AccordionMode current_mode = AccordionMode::aggressive;
  double switch_threshold = 0.5;
};

struct AccordionChoice {
  double param;
  AccordionState state;
};

/// Critical regime: no history yet, or the epoch gradient norm moved by more
/// than switch_threshold relative to the previous epoch. Critical epochs use
/// the aggressive parameter, all others the conservative one.
AccordionChoice accordion_select(const AccordionState& state, double epoch_grad_norm,
                                 double aggressive, double conservative);

struct AccordionParams {
  double aggressive;
  double conservative;
};
/// Ratios: aggressive = mean/10, conservative = min(1, 10*mean).
AccordionParams accordion_ratio_params(double mean_ratio);
/// Thresholds: aggressive = 10*mean, conservative = mean/10.
AccordionParams accordion_threshold_params(double mean_threshold);

/// Wire format: u32 nnz, u32 dim, then nnz (u32 index, f32 value) pairs, all
/// little-endian. Values are narrowed to float.
std::vector<std::uint8_t> serialize(const SparseUpdate& update);
void write_update(std::ostream& out, const SparseUpdate& update);
/// Parses one record from the front of bytes; throws FormatError on
/// truncated or inconsistent input. consumed receives the record length.
SparseUpdate deserialize(std::span<const std::uint8_t> bytes, std::size_t* consumed = nullptr);

}  // namespace dagc::compress
