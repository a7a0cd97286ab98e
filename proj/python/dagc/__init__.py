# Copyright 2026 The DAGC Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# =============================================================================

"""Data-aware gradient compression: allocation rules and a DSGD simulator."""

from ._dagc import (
    BudgetInfeasibleError,
    ConfigError,
    dagc_a,
    dagc_r,
    dagc_r_pivot,
    dichotomous_weights,
    hard_threshold,
    key_factor_absolute,
    normalize_config,
    phi,
    random_k,
    run,
    savings_percent,
    skewed_weights,
    top_k,
)

__all__ = [
    "BudgetInfeasibleError",
    "ConfigError",
    "dagc_a",
    "dagc_r",
    "dagc_r_pivot",
    "dichotomous_weights",
    "hard_threshold",
    "key_factor_absolute",
    "normalize_config",
    "phi",
    "random_k",
    "run",
    "savings_percent",
    "skewed_weights",
    "top_k",
]
