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

#include <cstdint>
#include <random>

namespace dagc {

using Rng = std::mt19937_64;

/// Independent, reproducible stream derived from a master seed. Different
/// (stream, substream) pairs give unrelated sequences.
inline Rng derive_rng(std::uint64_t master_seed, std::uint64_t stream, std::uint64_t substream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(substream), static_cast<std::uint32_t>(substream >> 32)};
  return Rng(seq);
}

}  // namespace dagc
