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

import math

import pytest

import dagc

CONFIG = """
[dataset]
samples = 400
test_samples = 100
features = 8
classes = 3

[partition]
workers = 3
skew_ratio = 5.0

[compression]
strategy = "dagc_r"
mean_ratio = 0.1

[train]
iterations = 30
eval_interval = 10
threads = 1
"""


def test_uniform_weights_give_uniform_ratios():
    assert dagc.dagc_r([0.25] * 4, 0.01) == [0.01] * 4
    assert dagc.dagc_a([0.25] * 4, 0.05) == [0.05] * 4


def test_dagc_r_budget_and_phi():
    ratios = dagc.dagc_r([0.5, 0.3, 0.2], 0.001)
    assert math.isclose(sum(ratios), 0.003, rel_tol=1e-12)
    assert dagc.dagc_r_pivot([0.5, 0.3, 0.2], 0.001) == 3
    assert math.isclose(dagc.phi([0.001] * 3, [0.5, 0.3, 0.2]), 1000.0, rel_tol=1e-12)


def test_dagc_a_pairwise_law():
    lam = dagc.dagc_a([0.8, 0.2], 0.05)
    assert math.isclose((lam[0] / lam[1]) ** -1.5, 4.0, rel_tol=1e-9)
    assert math.isclose(dagc.key_factor_absolute([0.8, 0.2], lam), 0.0010902084730746908, rel_tol=1e-12)


def test_infeasible_budget_raises():
    with pytest.raises(dagc.BudgetInfeasibleError, match="worker 1"):
        dagc.dagc_r([0.6, 0.3, 0.1], 0.9)


def test_compressors():
    assert dagc.top_k([3.0, -1.0, 0.5, 2.0], 0.5) == ([0, 3], [3.0, 2.0])
    assert dagc.hard_threshold([3.0, -1.0, 0.5, 2.0], 1.5) == ([0, 3], [3.0, 2.0])
    idx, val = dagc.random_k([1.0] * 10, 0.3, 7)
    assert len(idx) == 3 and val == [1.0] * 3
    assert dagc.random_k([1.0] * 10, 0.3, 7) == (idx, val)


def test_weight_generators():
    w = dagc.skewed_weights(10, 100.0, 42)
    assert math.isclose(sum(w), 1.0, rel_tol=1e-12)
    assert math.isclose(w[0] / w[-1], 100.0, rel_tol=1e-9)
    assert dagc.dichotomous_weights(3, 0.5) == [0.5, 0.25, 0.25]


def test_config_errors():
    with pytest.raises(dagc.ConfigError, match="compression.mean_ratio"):
        dagc.normalize_config('[compression]\nstrategy = "dagc_r"\nmean_ratio = 1.5\n')
    text = dagc.normalize_config(CONFIG)
    assert dagc.normalize_config(text) == text


def test_run_is_deterministic():
    a = dagc.run(CONFIG)
    b = dagc.run(CONFIG)
    assert a == b
    assert [r["iteration"] for r in a["rows"]] == [0, 10, 20, 30]
    assert a["allocation"]["kind"] == "ratio"
    assert len(a["elements_per_iteration"]) == 30


def test_savings():
    assert dagc.savings_percent(400.0, 500.0) == pytest.approx(20.0)
    assert dagc.savings_percent(400.0, None) is None
