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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <nlohmann/json.hpp>
#include <set>
#include <string>
#include <vector>

#include "fairrec/metrics.hpp"
#include "fairrec/rng.hpp"
#include "oracles.hpp"

using namespace fairrec;

namespace {

// One category over two items; both list entries hit category 0 fully.
CategoryCatalog mono_catalog() {
  CategoryCatalog catalog;
  catalog.names = {"c"};
  catalog.members = {{0}, {0}};
  return catalog;
}

Dataset accuracy_dataset() {
  // Two users; u0 tests on item 2, u1 has no test rows.
  Dataset d;
  d.users.add("u0");
  d.users.add("u1");
  d.items.add("i0");
  d.items.add("i1");
  d.items.add("i2");
  d.interactions = {{0, 0, 5.0, 1}, {0, 2, 4.0, 2}, {1, 1, 3.0, 3}};
  d.split = {Split::kTrain, Split::kTest, Split::kTrain};
  d.catalog.names = {"c"};
  d.catalog.members = {{0}, {0}, {0}};
  d.finalize();
  d.validate();
  return d;
}

struct RandomMetricInstance {
  CategoryCatalog catalog;
  TopkLists lists;
  std::vector<std::vector<UserId>> groups;
  AttributePartition partition;
};

RandomMetricInstance random_metric_instance(Rng& rng) {
  RandomMetricInstance inst;
  int num_items = 6 + static_cast<int>(rng.uniform_index(10));
  int num_categories = 2 + static_cast<int>(rng.uniform_index(4));
  int num_users = 4 + static_cast<int>(rng.uniform_index(8));
  int num_classes = 2 + static_cast<int>(rng.uniform_index(2));
  inst.catalog = oracles::random_catalog(rng, num_items, num_categories);

  inst.lists.assign(static_cast<std::size_t>(num_users), {});
  for (int u = 0; u < num_users; ++u) {
    if (rng.uniform() < 0.15) continue;  // some users unevaluated
    int len = 1 + static_cast<int>(rng.uniform_index(5));
    std::vector<int> pool(num_items);
    for (int v = 0; v < num_items; ++v) pool[v] = v;
    rng.shuffle(pool);
    for (int j = 0; j < len; ++j)
      inst.lists[static_cast<std::size_t>(u)].push_back(pool[j]);
  }

  inst.groups.assign(static_cast<std::size_t>(num_classes), {});
  for (int u = 0; u < num_users; ++u)
    inst.groups[rng.uniform_index(static_cast<std::uint64_t>(num_classes))]
        .push_back(u);

  inst.partition.attribute = "g";
  for (int s = 0; s < num_classes; ++s)
    inst.partition.classes.push_back("s" + std::to_string(s));
  inst.partition.groups = inst.groups;
  return inst;
}

}  // namespace

TEST_CASE("cc hand value: full hit then half hit averages to three quarters") {
  CategoryCatalog catalog;
  catalog.names = {"c", "d"};
  catalog.members = {{0}, {0, 1}};
  TopkLists lists = {{0, 1}};
  CHECK(cc(0, {0}, lists, catalog) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(cc(1, {0}, lists, catalog) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("cdcg hand value: two full hits with log2 discounts") {
  TopkLists lists = {{0, 1}};
  double want = (1.0 / std::log2(2.0) + 1.0 / std::log2(3.0)) / 2.0;
  CHECK(want == doctest::Approx(0.8154648767857288).epsilon(1e-12));
  CHECK(cdcg(0, {0}, lists, mono_catalog()) ==
        doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("group means skip unevaluated users") {
  CategoryCatalog catalog = mono_catalog();
  TopkLists lists = {{0}, {}};
  CHECK(cc(0, {0, 1}, lists, catalog) == doctest::Approx(1.0));
  CHECK_THROWS(cc(0, {1}, lists, catalog));
  CHECK_THROWS(cc(0, {}, lists, catalog));
}

TEST_CASE("pairwise bias hand value over two classes and two categories") {
  CategoryCatalog catalog;
  catalog.names = {"c", "d"};
  catalog.members = {{0}, {1}};
  // Class 0 user sees only category c, class 1 user only category d.
  TopkLists lists = {{0}, {1}};
  AttributePartition part;
  part.attribute = "g";
  part.classes = {"a", "b"};
  part.groups = {{0}, {1}};
  // CC(c): class a = 1, class b = 0 -> |1-0| = 1. Same for d. Total 2.
  CHECK(pairwise_bias(BiasMetric::kCC, part, lists, catalog) ==
        doctest::Approx(2.0).epsilon(1e-12));
  // CDCG discounts rank 1 by 1/log2(2) = 1, so the same value here.
  CHECK(pairwise_bias(BiasMetric::kCDCG, part, lists, catalog) ==
        doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("pairwise bias excludes classes with no evaluated users") {
  CategoryCatalog catalog = mono_catalog();
  TopkLists lists = {{0}, {}, {1}};
  AttributePartition part;
  part.attribute = "g";
  part.classes = {"a", "b", "c"};
  part.groups = {{0}, {1}, {2}};
  // Class b has no evaluated users; remaining two classes agree -> bias 0.
  CHECK(pairwise_bias(BiasMetric::kCC, part, lists, catalog) ==
        doctest::Approx(0.0));

  TopkLists none = {{}, {}, {}};
  CHECK_THROWS(pairwise_bias(BiasMetric::kCC, part, none, catalog));
}

TEST_CASE("metrics match the naive oracles on random instances") {
  Rng rng(1234);
  for (int trial = 0; trial < 100; ++trial) {
    RandomMetricInstance inst = random_metric_instance(rng);

    bool any_evaluated_group = false;
    for (const auto& g : inst.groups) {
      int evaluated = 0;
      for (UserId u : g)
        if (!inst.lists[static_cast<std::size_t>(u)].empty()) ++evaluated;
      if (evaluated > 0) any_evaluated_group = true;
    }
    if (!any_evaluated_group) continue;

    for (std::size_t c = 0; c < inst.catalog.names.size(); ++c) {
      for (const auto& g : inst.groups) {
        int evaluated = 0;
        for (UserId u : g)
          if (!inst.lists[static_cast<std::size_t>(u)].empty()) ++evaluated;
        if (evaluated == 0) continue;
        CHECK(cc(static_cast<int>(c), g, inst.lists, inst.catalog) ==
              doctest::Approx(oracles::naive_cc(static_cast<int>(c), g,
                                                inst.lists, inst.catalog))
                  .epsilon(1e-9));
        CHECK(cdcg(static_cast<int>(c), g, inst.lists, inst.catalog) ==
              doctest::Approx(oracles::naive_cdcg(static_cast<int>(c), g,
                                                  inst.lists, inst.catalog))
                  .epsilon(1e-9));
      }
    }

    int active = 0;
    for (const auto& g : inst.groups) {
      int evaluated = 0;
      for (UserId u : g)
        if (!inst.lists[static_cast<std::size_t>(u)].empty()) ++evaluated;
      if (evaluated > 0) ++active;
    }
    if (active >= 2) {
      CHECK(pairwise_bias(BiasMetric::kCC, inst.partition, inst.lists,
                          inst.catalog) ==
            doctest::Approx(oracles::naive_pairwise_bias(
                                false, inst.groups, inst.lists, inst.catalog))
                .epsilon(1e-9));
      CHECK(pairwise_bias(BiasMetric::kCDCG, inst.partition, inst.lists,
                          inst.catalog) ==
            doctest::Approx(oracles::naive_pairwise_bias(
                                true, inst.groups, inst.lists, inst.catalog))
                .epsilon(1e-9));
    }
  }
}

TEST_CASE("ndcg hand value: single hit at rank two") {
  Dataset d = accuracy_dataset();
  TopkLists lists = {{1, 2}, {0}};
  AccuracyReport report = accuracy_report(lists, d, 5);
  double want = (1.0 / std::log2(3.0)) / (1.0 / std::log2(2.0));
  CHECK(want == doctest::Approx(0.6309297535714574).epsilon(1e-12));
  CHECK(report.ndcg == doctest::Approx(want).epsilon(1e-12));
  CHECK(report.hit_ratio == doctest::Approx(1.0));
  CHECK(report.evaluated_users == 1);
  CHECK(std::isnan(report.ndcg_per_user[1]));
}

TEST_CASE("ndcg is one for a perfect ranking") {
  Dataset d = accuracy_dataset();
  TopkLists lists = {{2, 1}, {}};
  CHECK(ndcg_at_k(lists, d, 5) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hit_ratio_at_k(lists, d, 5) == doctest::Approx(1.0));
}

TEST_CASE("misses score zero") {
  Dataset d = accuracy_dataset();
  TopkLists lists = {{0, 1}, {}};
  CHECK(ndcg_at_k(lists, d, 5) == doctest::Approx(0.0));
  CHECK(hit_ratio_at_k(lists, d, 5) == doctest::Approx(0.0));
}

TEST_CASE("accuracy metrics truncate at k") {
  Dataset d = accuracy_dataset();
  TopkLists lists = {{1, 2}, {}};
  // k = 1 sees only item 1, a miss.
  CHECK(ndcg_at_k(lists, d, 1) == doctest::Approx(0.0));
  CHECK(hit_ratio_at_k(lists, d, 1) == doctest::Approx(0.0));
}

TEST_CASE("accuracy matches naive oracles on random instances") {
  Rng rng(4321);
  for (int trial = 0; trial < 100; ++trial) {
    int num_users = 3 + static_cast<int>(rng.uniform_index(6));
    int num_items = 8 + static_cast<int>(rng.uniform_index(8));
    Dataset d;
    for (int u = 0; u < num_users; ++u) d.users.add("u" + std::to_string(u));
    for (int v = 0; v < num_items; ++v) d.items.add("i" + std::to_string(v));
    d.catalog.names = {"c"};
    d.catalog.members.assign(static_cast<std::size_t>(num_items), {0});
    for (int u = 0; u < num_users; ++u) {
      std::vector<int> pool(num_items);
      for (int v = 0; v < num_items; ++v) pool[v] = v;
      rng.shuffle(pool);
      int train = 2 + static_cast<int>(rng.uniform_index(3));
      int test = static_cast<int>(rng.uniform_index(3));
      for (int j = 0; j < train + test; ++j) {
        d.interactions.push_back({u, pool[j], 1.0, j});
        d.split.push_back(j < train ? Split::kTrain : Split::kTest);
      }
    }
    d.finalize();
    d.validate();

    TopkLists lists(static_cast<std::size_t>(num_users));
    std::vector<std::set<ItemId>> test_sets(
        static_cast<std::size_t>(num_users));
    bool any = false;
    for (int u = 0; u < num_users; ++u) {
      const auto& tests = d.test_items_of_user[static_cast<std::size_t>(u)];
      test_sets[static_cast<std::size_t>(u)] =
          std::set<ItemId>(tests.begin(), tests.end());
      if (rng.uniform() < 0.2) continue;
      std::vector<int> pool(num_items);
      for (int v = 0; v < num_items; ++v) pool[v] = v;
      rng.shuffle(pool);
      int len = 1 + static_cast<int>(rng.uniform_index(6));
      for (int j = 0; j < len; ++j)
        lists[static_cast<std::size_t>(u)].push_back(pool[j]);
      if (!tests.empty()) any = true;
    }
    if (!any) continue;

    int k = 1 + static_cast<int>(rng.uniform_index(6));
    CHECK(ndcg_at_k(lists, d, k) ==
          doctest::Approx(oracles::naive_ndcg(lists, test_sets, k))
              .epsilon(1e-9));
    CHECK(hit_ratio_at_k(lists, d, k) ==
          doctest::Approx(oracles::naive_hit_ratio(lists, test_sets, k))
              .epsilon(1e-9));
  }
}

TEST_CASE("bias report rolls up values, nan for inactive classes") {
  CategoryCatalog catalog;
  catalog.names = {"c", "d"};
  catalog.members = {{0}, {1}};
  TopkLists lists = {{0}, {1}, {}};
  AttributePartition part;
  part.attribute = "g";
  part.classes = {"a", "b", "empty"};
  part.groups = {{0}, {1}, {2}};

  BiasReport report = bias_report(part, lists, catalog);
  CHECK(report.attribute == "g");
  REQUIRE(report.cc_values.size() == 2);
  CHECK(report.cc_values[0][0] == doctest::Approx(1.0));
  CHECK(report.cc_values[0][1] == doctest::Approx(0.0));
  CHECK(std::isnan(report.cc_values[0][2]));
  CHECK(report.total_cc_bias == doctest::Approx(2.0));
  CHECK(report.total_cdcg_bias == doctest::Approx(2.0));
  CHECK(report.cc_pairwise_per_category[0] == doctest::Approx(1.0));

  std::string json_text = bias_report_json(report, catalog.names);
  auto parsed = nlohmann::json::parse(json_text);
  CHECK(parsed["attribute"] == "g");
  CHECK(parsed["cc"]["total_bias"] == doctest::Approx(2.0));
  CHECK(parsed["cdcg"]["total_bias"] == doctest::Approx(2.0));
  CHECK(parsed["categories"].size() == 2);
  CHECK(parsed["cc"]["values"][0][2].is_null());
}

TEST_CASE("accuracy report serializes to json") {
  Dataset d = accuracy_dataset();
  TopkLists lists = {{2, 1}, {}};
  AccuracyReport report = accuracy_report(lists, d, 5);
  auto parsed = nlohmann::json::parse(accuracy_report_json(report));
  CHECK(parsed["k"] == 5);
  CHECK(parsed["ndcg"] == doctest::Approx(1.0));
  CHECK(parsed["hit_ratio"] == doctest::Approx(1.0));
  CHECK(parsed["evaluated_users"] == 1);
}

TEST_CASE("to_topk_lists validates user range") {
  std::vector<RankedList> lists = {{0, {1}}, {2, {0}}};
  TopkLists topk = to_topk_lists(lists, 3);
  REQUIRE(topk.size() == 3);
  CHECK(topk[0] == std::vector<ItemId>{1});
  CHECK(topk[1].empty());
  CHECK(topk[2] == std::vector<ItemId>{0});
  CHECK_THROWS(to_topk_lists(lists, 2));
}
