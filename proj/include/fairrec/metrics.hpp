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

enum class BiasMetric : std::uint8_t { kCC = 0, kCDCG = 1 };

// Top-k lists indexed by dense user id; empty vector = user not evaluated.
using TopkLists = std::vector<std::vector<ItemId>>;

TopkLists to_topk_lists(const std::vector<RankedList>& lists,
                        std::int32_t num_users);

// CC(c, G) = (1/|G|) sum_u (1/|TopK_u|) sum_{v in TopK_u} C_{v,c}/|C_v|.
double cc(CategoryId category, const std::vector<UserId>& group,
          const TopkLists& lists, const CategoryCatalog& catalog);

// CDCG(c, G): same with per-rank discount 1/log2(j+1).
double cdcg(CategoryId category, const std::vector<UserId>& group,
            const TopkLists& lists, const CategoryCatalog& catalog);

// sum_c sum_{unordered class pairs} |M(c,g1) - M(c,g2)|. Classes with zero
// evaluated users are excluded.
double pairwise_bias(BiasMetric metric, const AttributePartition& partition,
                     const TopkLists& lists, const CategoryCatalog& catalog);

struct BiasReport {
  std::string attribute;
  std::vector<std::string> classes;
  // [category][class] values; classes without evaluated users hold NaN.
  std::vector<std::vector<double>> cc_values;
  std::vector<std::vector<double>> cdcg_values;
  std::vector<double> cc_pairwise_per_category;
  std::vector<double> cdcg_pairwise_per_category;
  double total_cc_bias = 0.0;
  double total_cdcg_bias = 0.0;
};

BiasReport bias_report(const AttributePartition& partition,
                       const TopkLists& lists, const CategoryCatalog& catalog);

struct AccuracyReport {
  int k = 0;
  double ndcg = 0.0;
  double hit_ratio = 0.0;
  std::vector<double> ndcg_per_user;  // NaN for excluded users
  std::vector<std::uint8_t> hit_per_user;
  std::int32_t evaluated_users = 0;
};

// Binary relevance = membership in the user's test item set. Users with an
// empty test set are excluded from both means.
AccuracyReport accuracy_report(const TopkLists& lists, const Dataset& dataset,
                               int k);

double ndcg_at_k(const TopkLists& lists, const Dataset& dataset, int k);
double hit_ratio_at_k(const TopkLists& lists, const Dataset& dataset, int k);

std::string bias_report_json(const BiasReport& report,
                             const std::vector<std::string>& category_names);
std::string accuracy_report_json(const AccuracyReport& report);

}  // namespace fairrec
