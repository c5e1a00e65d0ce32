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

#include "fairrec/metrics.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace fairrec {

using nlohmann::json;

TopkLists to_topk_lists(const std::vector<RankedList>& lists,
                        std::int32_t num_users) {
  TopkLists out(num_users);
  for (const RankedList& list : lists) {
    if (list.user < 0 || list.user >= num_users)
      throw std::out_of_range(fmt::format("user {} out of range", list.user));
    out[list.user] = list.items;
  }
  return out;
}

namespace {

double group_mean(CategoryId category, const std::vector<UserId>& group,
                  const TopkLists& lists, const CategoryCatalog& catalog,
                  bool discounted) {
  if (group.empty()) throw std::invalid_argument("empty user group");
  if (category < 0 ||
      static_cast<std::size_t>(category) >= catalog.num_categories())
    throw std::out_of_range(fmt::format("category {} out of range", category));

  double sum = 0.0;
  std::int64_t evaluated = 0;
  for (UserId u : group) {
    if (u < 0 || static_cast<std::size_t>(u) >= lists.size())
      throw std::out_of_range(fmt::format("user {} out of range", u));
    const std::vector<ItemId>& topk = lists[u];
    if (topk.empty()) continue;
    double user_sum = 0.0;
    for (std::size_t j = 0; j < topk.size(); ++j) {
      double frac = 0.0;
      for (auto [c, f] : item_category_fractions(topk[j], catalog))
        if (c == category) frac = f;
      if (discounted)
        frac /= std::log2(static_cast<double>(j + 2));
      user_sum += frac;
    }
    sum += user_sum / static_cast<double>(topk.size());
    ++evaluated;
  }
  if (evaluated == 0)
    throw std::invalid_argument("no user in the group has a top-k list");
  return sum / static_cast<double>(evaluated);
}

}  // namespace

double cc(CategoryId category, const std::vector<UserId>& group,
          const TopkLists& lists, const CategoryCatalog& catalog) {
  return group_mean(category, group, lists, catalog, false);
}

double cdcg(CategoryId category, const std::vector<UserId>& group,
            const TopkLists& lists, const CategoryCatalog& catalog) {
  return group_mean(category, group, lists, catalog, true);
}

namespace {

// Classes that still have evaluated users, in partition order.
std::vector<std::int32_t> active_classes(const AttributePartition& partition,
                                         const TopkLists& lists) {
  std::vector<std::int32_t> active;
  for (std::size_t g = 0; g < partition.groups.size(); ++g) {
    bool any = false;
    for (UserId u : partition.groups[g])
      if (static_cast<std::size_t>(u) < lists.size() && !lists[u].empty()) {
        any = true;
        break;
      }
    if (any) {
      active.push_back(static_cast<std::int32_t>(g));
    } else {
      fmt::print(stderr,
                 "warning: attribute '{}' class '{}' has no evaluated users; "
                 "excluded from pairwise bias\n",
                 partition.attribute, partition.classes[g]);
    }
  }
  return active;
}

}  // namespace

double pairwise_bias(BiasMetric metric, const AttributePartition& partition,
                     const TopkLists& lists, const CategoryCatalog& catalog) {
  if (partition.groups.size() < 2)
    throw std::invalid_argument("pairwise bias needs >= 2 classes");
  std::vector<std::int32_t> active = active_classes(partition, lists);
  if (active.size() < 2)
    throw std::invalid_argument(
        "pairwise bias needs >= 2 classes with evaluated users");

  bool discounted = metric == BiasMetric::kCDCG;
  double total = 0.0;
  for (std::size_t c = 0; c < catalog.num_categories(); ++c) {
    std::vector<double> values(active.size());
    for (std::size_t g = 0; g < active.size(); ++g)
      values[g] = group_mean(static_cast<CategoryId>(c),
                             partition.groups[active[g]], lists, catalog,
                             discounted);
    for (std::size_t g1 = 0; g1 < values.size(); ++g1)
      for (std::size_t g2 = g1 + 1; g2 < values.size(); ++g2)
        total += std::abs(values[g1] - values[g2]);
  }
  return total;
}

BiasReport bias_report(const AttributePartition& partition,
                       const TopkLists& lists, const CategoryCatalog& catalog) {
  BiasReport report;
  report.attribute = partition.attribute;
  report.classes = partition.classes;

  std::vector<std::int32_t> active = active_classes(partition, lists);
  if (active.size() < 2)
    throw std::invalid_argument(
        "bias report needs >= 2 classes with evaluated users");
  std::vector<char> is_active(partition.groups.size(), 0);
  for (std::int32_t g : active) is_active[g] = 1;

  const std::size_t num_categories = catalog.num_categories();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  report.cc_values.assign(num_categories,
                          std::vector<double>(partition.groups.size(), nan));
  report.cdcg_values.assign(num_categories,
                            std::vector<double>(partition.groups.size(), nan));
  report.cc_pairwise_per_category.assign(num_categories, 0.0);
  report.cdcg_pairwise_per_category.assign(num_categories, 0.0);

  for (std::size_t c = 0; c < num_categories; ++c) {
    for (std::size_t g = 0; g < partition.groups.size(); ++g) {
      if (!is_active[g]) continue;
      report.cc_values[c][g] = group_mean(static_cast<CategoryId>(c),
                                          partition.groups[g], lists, catalog,
                                          false);
      report.cdcg_values[c][g] = group_mean(static_cast<CategoryId>(c),
                                            partition.groups[g], lists,
                                            catalog, true);
    }
    for (std::size_t i = 0; i < active.size(); ++i)
      for (std::size_t j = i + 1; j < active.size(); ++j) {
        report.cc_pairwise_per_category[c] +=
            std::abs(report.cc_values[c][active[i]] -
                     report.cc_values[c][active[j]]);
        report.cdcg_pairwise_per_category[c] +=
            std::abs(report.cdcg_values[c][active[i]] -
                     report.cdcg_values[c][active[j]]);
      }
    report.total_cc_bias += report.cc_pairwise_per_category[c];
    report.total_cdcg_bias += report.cdcg_pairwise_per_category[c];
  }
  return report;
}

AccuracyReport accuracy_report(const TopkLists& lists, const Dataset& dataset,
                               int k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  AccuracyReport report;
  report.k = k;
  report.ndcg_per_user.assign(dataset.num_users(),
                              std::numeric_limits<double>::quiet_NaN());
  report.hit_per_user.assign(dataset.num_users(), 0);

  double ndcg_sum = 0.0;
  std::int64_t hits = 0;
  for (std::int32_t u = 0; u < dataset.num_users(); ++u) {
    const std::vector<ItemId>& test = dataset.test_items_of_user[u];
    if (test.empty()) continue;
    if (static_cast<std::size_t>(u) >= lists.size() || lists[u].empty())
      continue;
    const std::vector<ItemId>& list = lists[u];
    std::size_t depth = std::min<std::size_t>(list.size(),
                                              static_cast<std::size_t>(k));
    double dcg = 0.0;
    bool hit = false;
    for (std::size_t j = 0; j < depth; ++j) {
      if (std::binary_search(test.begin(), test.end(), list[j])) {
        dcg += 1.0 / std::log2(static_cast<double>(j + 2));
        hit = true;
      }
    }
    std::size_t ideal = std::min<std::size_t>(test.size(),
                                              static_cast<std::size_t>(k));
    double idcg = 0.0;
    for (std::size_t j = 0; j < ideal; ++j)
      idcg += 1.0 / std::log2(static_cast<double>(j + 2));
    double ndcg = idcg > 0.0 ? dcg / idcg : 0.0;

    report.ndcg_per_user[u] = ndcg;
    report.hit_per_user[u] = hit ? 1 : 0;
    ndcg_sum += ndcg;
    hits += hit ? 1 : 0;
    ++report.evaluated_users;
  }
  if (report.evaluated_users > 0) {
    report.ndcg = ndcg_sum / static_cast<double>(report.evaluated_users);
    report.hit_ratio =
        static_cast<double>(hits) / static_cast<double>(report.evaluated_users);
  }
  return report;
}

double ndcg_at_k(const TopkLists& lists, const Dataset& dataset, int k) {
  return accuracy_report(lists, dataset, k).ndcg;
}

double hit_ratio_at_k(const TopkLists& lists, const Dataset& dataset, int k) {
  return accuracy_report(lists, dataset, k).hit_ratio;
}

std::string bias_report_json(const BiasReport& report,
                             const std::vector<std::string>& category_names) {
  json j;
  j["attribute"] = report.attribute;
  j["classes"] = report.classes;
  j["categories"] = category_names;
  j["cc"]["values"] = report.cc_values;
  j["cc"]["pairwise_per_category"] = report.cc_pairwise_per_category;
  j["cc"]["total_bias"] = report.total_cc_bias;
  j["cdcg"]["values"] = report.cdcg_values;
  j["cdcg"]["pairwise_per_category"] = report.cdcg_pairwise_per_category;
  j["cdcg"]["total_bias"] = report.total_cdcg_bias;
  return j.dump(2) + "\n";
}

std::string accuracy_report_json(const AccuracyReport& report) {
  json j;
  j["k"] = report.k;
  j["ndcg"] = report.ndcg;
  j["hit_ratio"] = report.hit_ratio;
  j["evaluated_users"] = report.evaluated_users;
  j["ndcg_per_user"] = report.ndcg_per_user;
  j["hit_per_user"] = report.hit_per_user;
  return j.dump(2) + "\n";
}

}  // namespace fairrec
