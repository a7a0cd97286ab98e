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

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dagc {

// Raised when a closed-form allocation asks a worker to send more than its
// full gradient (ratio above 1). The worker index is 1-based.
class BudgetInfeasibleError : public std::runtime_error {
 public:
  BudgetInfeasibleError(std::size_t worker, double ratio)
      : std::runtime_error("budget infeasible: worker " + std::to_string(worker) +
                           " would need compression ratio " + std::to_string(ratio) +
                           " > 1; lower the mean ratio"),
        worker_(worker),
        ratio_(ratio) {}

  std::size_t worker() const { return worker_; }
  double ratio() const { return ratio_; }

 private:
  std::size_t worker_;
  double ratio_;
};

// Malformed binary input (IDX files, sparse traces).
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dagc
