# Copyright 2026 The Authors.
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

"""End-to-end smoke tests for the Python bindings."""

import math

import pytest

import fairrec


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    data_dir = tmp_path_factory.mktemp("data")
    fairrec.generate_ml100k_files(fairrec.SyntheticConfig.small(), str(data_dir))

    config = fairrec.IngestConfig()
    config.format = fairrec.DatasetFormat.MOVIELENS_100K
    config.interactions_path = str(data_dir / "u.data")
    config.users_path = str(data_dir / "u.user")
    config.categories_path = str(data_dir / "u.item")
    config.k_core = 3
    return fairrec.ingest(config)


@pytest.fixture(scope="module")
def scores(dataset):
    config = fairrec.TrainConfig()
    config.model = fairrec.ModelKind.WMF
    config.dim = 8
    config.epochs = 5
    result = fairrec.train(dataset, config)
    assert result.objective_per_epoch == sorted(
        result.objective_per_epoch, reverse=True
    )
    return fairrec.score_candidates(result.model, dataset, top_n=50)


def test_ingest_shape(dataset):
    assert dataset.num_users > 0
    assert dataset.num_items > 0
    assert dataset.num_interactions > 0
    assert "gender" in dataset.attribute_names
    assert len(dataset.category_names) > 1


def test_history_distribution_normalized(dataset):
    m = fairrec.history_distribution(dataset, 0)
    assert len(m) == dataset.num_categories
    assert math.isclose(sum(m), 1.0, abs_tol=1e-9)


def test_rerank_pipeline(dataset, scores):
    rerank = fairrec.RerankConfig()
    rerank.beta = 0.5
    rerank.k = 10
    profile = fairrec.build_counterfactual_profile(dataset, "gender", rerank)
    assert set(profile.classes) >= {"M", "F"}

    fair = fairrec.rerank_all(scores, profile, dataset, rerank)
    original = fairrec.baseline_topk(scores, rerank.k)
    assert len(fair) == dataset.num_users
    assert all(len(lst.items) <= rerank.k for lst in fair)

    fair_bias = fairrec.bias_report(fair, dataset, "gender")
    base_bias = fairrec.bias_report(original, dataset, "gender")
    assert fair_bias["attribute"] == "gender"
    assert fair_bias["cc"]["total_bias"] >= 0.0
    assert base_bias["cc"]["total_bias"] >= 0.0

    accuracy = fairrec.accuracy_report(fair, dataset, rerank.k)
    assert accuracy["k"] == rerank.k
    assert 0.0 <= accuracy["ndcg"] <= 1.0
    assert 0.0 <= accuracy["hit_ratio"] <= 1.0


def test_beta_zero_matches_baseline(dataset, scores):
    rerank = fairrec.RerankConfig()
    rerank.beta = 0.0
    rerank.k = 10
    profile = fairrec.build_counterfactual_profile(dataset, "gender", rerank)
    fair = fairrec.rerank_all(scores, profile, dataset, rerank)
    original = fairrec.baseline_topk(scores, rerank.k)
    for a, b in zip(fair, original):
        assert a.user == b.user
        assert list(a.items) == list(b.items)


def test_kl_divergence_properties():
    p = [0.2, 0.3, 0.5]
    q = [0.5, 0.3, 0.2]
    assert fairrec.kl_divergence(p, p, 0.01) == pytest.approx(0.0, abs=1e-12)
    assert fairrec.kl_divergence(p, q, 0.01) > 0.0


def test_run_experiment(dataset, tmp_path):
    config = fairrec.ExperimentConfig()
    config.ingest.format = fairrec.DatasetFormat.MOVIELENS_100K
    config.train.dim = 8
    config.train.epochs = 4
    config.rerank.k = 10
    config.rerank.top_n = 50
    config.attributes = ["gender"]
    config.output_dir = str(tmp_path / "run")

    # run_experiment ingests from the config, so point it at fresh files.
    data_dir = tmp_path / "data"
    fairrec.generate_ml100k_files(fairrec.SyntheticConfig.small(), str(data_dir))
    config.ingest.interactions_path = str(data_dir / "u.data")
    config.ingest.users_path = str(data_dir / "u.user")
    config.ingest.categories_path = str(data_dir / "u.item")
    config.ingest.k_core = 3

    result = fairrec.run_experiment(config)
    assert (tmp_path / "run" / "report.csv").exists()
    assert len(result["results"]) == 1
    row = result["results"][0]
    assert row["attribute"] == "gender"
    assert row["fair_cc_bias"] <= row["original_cc_bias"]
