// Copyright 2026 The Authors.
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

#pragma once

#include <string>
#include <vector>

#include "fairrec/fairness.hpp"
#include "fairrec/ingest.hpp"
#include "fairrec/metrics.hpp"
#include "fairrec/recommender.hpp"
#include "fairrec/types.hpp"

namespace fairrec {

struct ExperimentConfig {
  IngestConfig ingest;
  TrainConfig train;
  RerankConfig rerank;
  std::string external_scores;  // empty: train natively
  std::vector<std::string> attributes;  // empty: every attribute in the data
  std::string output_dir = "run";
  bool write_lists = true;  // original.tsv / fair_<attr>.tsv
  int threads = 1;

  void validate() const;
};

struct VariantMetrics {
  AccuracyReport accuracy;
  BiasReport bias;
};

struct AttributeResult {
  std::string attribute;
  VariantMetrics original;
  VariantMetrics fair;
};

struct RunResult {
  std::string run_dir;
  std::vector<AttributeResult> results;
};

// Shared front half of every experiment: ingest, then train or load scores.
struct Pipeline {
  Dataset dataset;
  ScoreSet scores;
};

Pipeline prepare_pipeline(const ExperimentConfig& config);

// Profile -> rerank -> paired metrics for one attribute. The original
// variant is the beta=0 pass-through (baseline top-k).
AttributeResult evaluate_attribute(const Dataset& dataset,
                                   const ScoreSet& scores,
                                   const std::string& attribute,
                                   const RerankConfig& rerank);

// Full run: pipeline, per-attribute evaluation, reports and manifest under
// config.output_dir. Reports contain no wall-clock or thread-count fields,
// so identical config + seed gives byte-identical output.
RunResult run_experiment(const ExperimentConfig& config);

struct SweepPoint {
  std::string parameter;
  double value = 0.0;
  std::string attribute;
  double ndcg = 0.0;
  double hit_ratio = 0.0;
  double cc_bias = 0.0;
  double cdcg_bias = 0.0;
};

// One pipeline, the grid applied to beta or gamma. Profiles are built once
// per attribute and reused across grid points. Writes sweep.csv.
std::vector<SweepPoint> sweep(const ExperimentConfig& config,
                              const std::string& parameter,
                              const std::vector<double>& grid);

std::string sweep_csv(const std::vector<SweepPoint>& points);

// Rebuilds summary.md and report.csv from the JSON reports of a finished
// run directory. Byte-identical on repeated invocation.
void emit_report(const std::string& run_dir);

}  // namespace fairrec
