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

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "fairrec/types.hpp"

namespace fairrec {

struct FactorModel {
  Eigen::MatrixXd user_factors;  // |U| x d
  Eigen::MatrixXd item_factors;  // |V| x d
  Eigen::VectorXd user_bias;
  Eigen::VectorXd item_bias;
  double global_mean = 0.0;

  double predict(UserId u, ItemId v) const {
    return global_mean + user_bias(u) + item_bias(v) +
           user_factors.row(u).dot(item_factors.row(v));
  }
};

enum class ModelKind : std::uint8_t { kBiasedMf = 0, kWmf = 1 };

struct TrainConfig {
  ModelKind model = ModelKind::kWmf;
  int dim = 32;
  int epochs = 50;
  double learning_rate = 0.005;  // biased MF only
  double regularization = 0.05;
  double confidence_weight = 40.0;  // WMF alpha_w
  std::uint64_t seed = 42;
  int threads = 1;

  void validate() const;
};

struct TrainResult {
  FactorModel model;
  std::vector<double> objective_per_epoch;  // MF: mean squared train error; WMF: weighted LS objective
};

// SGD on observed ratings: r_hat = mu + b_u + b_i + p_u . q_i, L2-regularized.
// Deterministic for a fixed seed. Throws on divergence (non-finite loss).
TrainResult train_biased_mf(const Dataset& dataset, const TrainConfig& config);

// Implicit-feedback ALS: preference 1 for observed pairs, confidence
// 1 + confidence_weight * count. Each half-step solves its ridge problem
// exactly, so the objective is non-increasing.
TrainResult train_wmf(const Dataset& dataset, const TrainConfig& config);

TrainResult train(const Dataset& dataset, const TrainConfig& config);

// Scores every item outside the user's training set, truncated to the top_n
// best (score desc, item asc). top_n <= 0 means all unseen items.
ScoreSet score_candidates(const FactorModel& model, const Dataset& dataset,
                          int top_n, int threads = 1);

// scores.tsv rows: user \t item \t score (original ids, score %.17g).
void export_scores(const ScoreSet& scores, const Dataset& dataset,
                   const std::string& path);

// Validates ids against the dataset, drops training items, truncates to
// top_n per user. Throws on unknown ids or non-finite scores.
ScoreSet load_external_scores(const std::string& path, const Dataset& dataset,
                              int top_n);

void save_model(const FactorModel& model, const std::string& path);
FactorModel load_model(const std::string& path);

}  // namespace fairrec
