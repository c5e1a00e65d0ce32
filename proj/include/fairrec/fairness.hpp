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

#include "fairrec/types.hpp"

namespace fairrec {

// Probability vector over categories. Smoothed variants are strictly
// positive and sum to 1 within 1e-9.
using CategoryDistribution = std::vector<double>;

double distribution_sum(const CategoryDistribution& d);
void smooth_and_normalize(CategoryDistribution& d, double epsilon);

enum class TimestampWeighting : std::uint8_t {
  kRaw = 0,            // weights = raw timestamp values
  kMinMaxRecency = 1,  // per-user min-max to [eps, 1]
};

enum class Normalization : std::uint8_t {
  kPerStepMinMax = 0,  // over the remaining candidate pool at each step
  kGlobalMinMax = 1,   // once over the full candidate pool
  kNone = 2,
};

struct RerankConfig {
  double beta = 0.5;
  double gamma = 0.1;
  double alpha = 0.01;
  int k = 20;
  int top_n = 0;  // 0 means use all candidates provided
  Normalization normalization = Normalization::kPerStepMinMax;
  TimestampWeighting timestamp_weighting = TimestampWeighting::kRaw;
  double profile_smoothing = 1e-6;
  int threads = 1;

  void validate() const;
};

// Per attribute class s: the category distribution of the complement users'
// training histories. Built from train interactions only.
struct CounterfactualProfile {
  std::string attribute;
  std::vector<std::string> classes;
  std::vector<CategoryDistribution> o_of_class;  // aligned with classes
  std::vector<std::int32_t> class_of_user;       // dense user -> class index; -1 unknown

  const CategoryDistribution& for_user(UserId u) const;
  void validate() const;
};

// m(c|u): timestamp-weighted mean of category fractions over the user's
// training interactions. Falls back to uniform weights when all weights
// are zero.
CategoryDistribution history_distribution(UserId user, const Dataset& dataset,
                                          TimestampWeighting weighting);

CounterfactualProfile build_counterfactual_profile(const Dataset& dataset,
                                                   const std::string& attribute,
                                                   const RerankConfig& config);

// r(c|u,I): rank-discounted category proportions, weights j^-gamma.
CategoryDistribution recommended_category_proportion(
    const std::vector<ItemId>& items, const CategoryCatalog& catalog,
    double gamma);

// D(o || (1-alpha) r + alpha o), natural log.
double kl_divergence(const CategoryDistribution& o,
                     const CategoryDistribution& r, double alpha);

// Surrogate objective for a fixed ordered list:
//   (1-beta) * sum of scores + beta * sum_c o_c * log sum_j j^-gamma * r~(c|v_j)
// with r~(c|v) = (1-alpha) * frac_v(c) + alpha * o_c. Normalization is not
// applied here; this is the raw objective used by the exhaustive oracle.
double objective_value(const std::vector<ItemId>& items,
                       const std::vector<double>& scores_of_items,
                       const CategoryDistribution& o,
                       const CategoryCatalog& catalog,
                       const RerankConfig& config);

RankedList greedy_rerank(UserId user, const std::vector<ScoredItem>& candidates,
                         const CounterfactualProfile& profile,
                         const CategoryCatalog& catalog,
                         const RerankConfig& config);

// Enumerates every ordered arrangement of k candidates and returns the
// objective maximizer. Test oracle; throws when the number of arrangements
// exceeds budget.
RankedList exhaustive_rerank(UserId user,
                             const std::vector<ScoredItem>& candidates,
                             const CounterfactualProfile& profile,
                             const CategoryCatalog& catalog,
                             const RerankConfig& config,
                             std::uint64_t budget = 2000000);

// Parallel map of greedy_rerank over all users with candidates. Output is
// ordered by user id and independent of thread count.
std::vector<RankedList> rerank_all(const ScoreSet& scores,
                                   const CounterfactualProfile& profile,
                                   const CategoryCatalog& catalog,
                                   const RerankConfig& config);

// Baseline: top-k by (score desc, item asc), no fairness term.
std::vector<RankedList> baseline_topk(const ScoreSet& scores, int k);

void save_profile(const CounterfactualProfile& profile, const std::string& path);
CounterfactualProfile load_profile(const std::string& path);

// reranked.tsv rows: user \t rank \t item \t raw_score (original ids).
void write_reranked(const std::vector<RankedList>& lists,
                    const ScoreSet& scores, const Dataset& dataset,
                    const std::string& path);

}  // namespace fairrec
