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

"""Fairness-aware re-ranking for recommender systems."""

from fairrec._core import (  # noqa: F401
    DatasetFormat,
    SplitStrategy,
    ModelKind,
    Normalization,
    TimestampWeighting,
    IngestConfig,
    TrainConfig,
    RerankConfig,
    ExperimentConfig,
    SyntheticConfig,
    Dataset,
    FactorModel,
    TrainResult,
    ScoreSet,
    CounterfactualProfile,
    RankedList,
    ingest,
    write_dataset_bundle,
    read_dataset_bundle,
    train,
    score_candidates,
    export_scores,
    load_external_scores,
    build_counterfactual_profile,
    history_distribution,
    recommended_category_proportion,
    kl_divergence,
    greedy_rerank,
    rerank_all,
    baseline_topk,
    bias_report,
    accuracy_report,
    run_experiment,
    sweep,
    emit_report,
    generate_ml100k_files,
    ensure_ml100k_dir,
)

__version__ = "0.1.0"
