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
#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fairrec/ingest.hpp"
#include "fairrec/io.hpp"
#include "fairrec/rng.hpp"
#include "oracles.hpp"

using namespace fairrec;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  auto dir = fs::temp_directory_path() /
             ("fairrec_ingest_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Two users rating the same three items plus one low-degree straggler pair.
// Genre flags: 19 columns, "unknown" first.
void write_ml100k_fixture(const fs::path& dir) {
  write_file((dir / "u.data").string(),
             "1\t10\t5\t100\n"
             "1\t20\t4\t200\n"
             "1\t30\t3\t300\n"
             "2\t10\t2\t150\n"
             "2\t20\t5\t250\n"
             "2\t30\t1\t350\n"
             "3\t40\t4\t400\n");
  write_file((dir / "u.user").string(),
             "1|24|M|technician|85711\n"
             "2|53|F|writer|94043\n"
             "3|33|M|other|00000\n");
  std::string zeros15;
  for (int i = 0; i < 15; ++i) zeros15 += "|0";
  write_file((dir / "u.item").string(),
             "10|Movie A|01-Jan-1995||http://a|0|1|0|0" + zeros15 + "\n" +
                 "20|Movie B|01-Jan-1995||http://b|0|1|1|0" + zeros15 + "\n" +
                 "30|Movie C|01-Jan-1995||http://c|0|0|0|1" + zeros15 + "\n" +
                 "40|Movie D|01-Jan-1995||http://d|1|0|0|0" + zeros15 + "\n");
}

IngestConfig ml100k_config(const fs::path& dir) {
  IngestConfig config;
  config.format = DatasetFormat::kMovieLens100K;
  config.interactions_path = (dir / "u.data").string();
  config.users_path = (dir / "u.user").string();
  config.categories_path = (dir / "u.item").string();
  config.k_core = 0;
  return config;
}

}  // namespace

TEST_CASE("generic tsv parsing honours the header and reports bad lines") {
  auto dir = temp_dir("generic");
  auto path = (dir / "x.tsv").string();

  write_file(path,
             "user\titem\trating\ttimestamp\n"
             "u1\ti1\t4.0\t100\n"
             "u2\ti1\t3.5\t50\n");
  IngestConfig config;
  config.format = DatasetFormat::kGenericTsv;
  config.interactions_path = path;
  auto rows = parse_interactions(config);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].user == "u1");
  CHECK(rows[0].rating == doctest::Approx(4.0));
  CHECK(rows[1].timestamp == 50);

  SUBCASE("rating column optional") {
    write_file(path,
               "user\titem\ttimestamp\n"
               "u1\ti1\t100\n");
    auto r = parse_interactions(config);
    REQUIRE(r.size() == 1);
    CHECK(r[0].rating == doctest::Approx(0.0));
  }
  SUBCASE("bad row carries its line number") {
    write_file(path,
               "user\titem\trating\ttimestamp\n"
               "u1\ti1\tnot_a_number\t100\n");
    CHECK_THROWS_WITH_AS(parse_interactions(config), doctest::Contains("line 2"),
                         std::runtime_error);
  }
  SUBCASE("missing required column") {
    write_file(path, "user\trating\n");
    CHECK_THROWS(parse_interactions(config));
  }
  fs::remove_all(dir);
}

TEST_CASE("ml100k tab format parses ratings and timestamps") {
  auto dir = temp_dir("ml100k_rows");
  write_ml100k_fixture(dir);
  auto rows = parse_interactions(ml100k_config(dir));
  REQUIRE(rows.size() == 7);
  CHECK(rows[0].user == "1");
  CHECK(rows[0].item == "10");
  CHECK(rows[0].rating == doctest::Approx(5.0));
  CHECK(rows[6].timestamp == 400);
  fs::remove_all(dir);
}

TEST_CASE("ml100k age bands follow the seven-band scheme") {
  auto dir = temp_dir("bands");
  write_ml100k_fixture(dir);
  std::string users;
  const std::pair<int, std::string> cases[] = {
      {1, "1"},  {17, "1"},  {18, "18"}, {24, "18"}, {25, "25"},
      {34, "25"}, {35, "35"}, {44, "35"}, {45, "45"}, {49, "45"},
      {50, "50"}, {55, "50"}, {56, "56"}, {73, "56"}};
  int id = 1;
  for (const auto& [age, band] : cases)
    users += std::to_string(id++) + "|" + std::to_string(age) + "|M|other|0\n";
  write_file((dir / "u.user").string(), users);

  IngestConfig config = ml100k_config(dir);
  RawDataset raw;
  load_user_attributes(config, raw);
  REQUIRE(raw.attribute_names ==
          std::vector<std::string>{"gender", "age", "occupation"});
  for (std::size_t i = 0; i < std::size(cases); ++i)
    CHECK(raw.user_values[i][1] == cases[i].second);
  fs::remove_all(dir);
}

TEST_CASE("ml100k genre flags become categories, unknown dropped by default") {
  auto dir = temp_dir("genres");
  write_ml100k_fixture(dir);
  IngestConfig config = ml100k_config(dir);

  RawDataset raw;
  load_item_categories(config, raw);
  // The format carries a fixed 19-genre vocabulary; dropping unknown leaves
  // all 18 declared names even when the fixture uses only three.
  REQUIRE(raw.category_names.size() == 18);
  CHECK(raw.category_names[0] == "Action");
  CHECK(raw.category_names[17] == "Western");
  CHECK(std::find(raw.category_names.begin(), raw.category_names.end(),
                  "unknown") == raw.category_names.end());
  REQUIRE(raw.item_ids.size() == 4);
  CHECK(raw.item_categories[0] == std::vector<std::string>{"Action"});
  CHECK(raw.item_categories[1] ==
        std::vector<std::string>{"Action", "Adventure"});
  CHECK(raw.item_categories[2] == std::vector<std::string>{"Animation"});
  CHECK(raw.item_categories[3].empty());

  SUBCASE("keep_unknown_genre retains the flag") {
    config.keep_unknown_genre = true;
    RawDataset kept;
    load_item_categories(config, kept);
    CHECK(kept.item_categories[3] == std::vector<std::string>{"unknown"});
  }
  fs::remove_all(dir);
}

TEST_CASE("k-core hand example: stragglers removed, square kept") {
  std::vector<RawInteraction> rows = {
      {"a", "x", 1, 1}, {"a", "y", 1, 2}, {"b", "x", 1, 3},
      {"b", "y", 1, 4}, {"c", "z", 1, 5}};
  auto core = k_core_filter(rows, 2);
  REQUIRE(core.size() == 4);
  for (const auto& r : core) {
    CHECK(r.user != "c");
    CHECK(r.item != "z");
  }
  CHECK(core[0].timestamp == 1);
  CHECK(core[3].timestamp == 4);
}

TEST_CASE("k-core cascade: removal can propagate") {
  // b-y survives only through c; dropping c (degree 1) cascades.
  std::vector<RawInteraction> rows = {
      {"a", "x", 1, 1}, {"a", "y", 1, 2}, {"b", "x", 1, 3},
      {"b", "y", 1, 4}, {"c", "x", 1, 5}, {"c", "y", 1, 6},
      {"d", "x", 1, 7}, {"d", "z", 1, 8}};
  auto core = k_core_filter(rows, 2);
  std::set<std::string> users, items;
  for (const auto& r : core) {
    users.insert(r.user);
    items.insert(r.item);
  }
  CHECK(users == std::set<std::string>{"a", "b", "c"});
  CHECK(items == std::set<std::string>{"x", "y"});
}

TEST_CASE("k-core matches the fixed-point oracle on random graphs") {
  Rng rng(314);
  for (int trial = 0; trial < 20; ++trial) {
    std::set<std::pair<std::string, std::string>> edges;
    int n = 8 + static_cast<int>(rng.uniform_index(8));
    int m = 20 + static_cast<int>(rng.uniform_index(40));
    for (int e = 0; e < m; ++e)
      edges.insert({"u" + std::to_string(rng.uniform_index(n)),
                    "i" + std::to_string(rng.uniform_index(n))});
    std::vector<RawInteraction> rows;
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& [u, v] : edges) {
      rows.push_back({u, v, 1.0, static_cast<std::int64_t>(rows.size())});
      pairs.push_back({u, v});
    }
    int k = 2 + static_cast<int>(rng.uniform_index(2));

    auto expected = oracles::naive_k_core(pairs, k);
    std::set<std::pair<std::string, std::string>> expected_set(
        expected.begin(), expected.end());

    if (expected_set.empty()) {
      CHECK_THROWS(k_core_filter(rows, k));
      continue;
    }
    auto core = k_core_filter(rows, k);
    std::set<std::pair<std::string, std::string>> got;
    for (const auto& r : core) got.insert({r.user, r.item});
    CHECK(got == expected_set);
  }
}

TEST_CASE("k-core result ignores input row order") {
  Rng rng(2718);
  std::vector<RawInteraction> rows;
  for (int e = 0; e < 60; ++e)
    rows.push_back({"u" + std::to_string(rng.uniform_index(10)),
                    "i" + std::to_string(rng.uniform_index(10)), 1.0, e});
  auto sort_pairs = [](const std::vector<RawInteraction>& v) {
    std::set<std::pair<std::string, std::string>> s;
    for (const auto& r : v) s.insert({r.user, r.item});
    return s;
  };
  auto base = sort_pairs(k_core_filter(rows, 3));
  auto shuffled = rows;
  rng.shuffle(shuffled);
  CHECK(sort_pairs(k_core_filter(shuffled, 3)) == base);
}

TEST_CASE("temporal per-user split keeps the earliest fraction for training") {
  auto dir = temp_dir("split");
  write_ml100k_fixture(dir);
  IngestConfig config = ml100k_config(dir);
  config.train_fraction = 0.7;
  Dataset d = ingest(config);

  // User "1": timestamps 100,200,300 -> ceil(0.7*3) = 3 train? No: ceil(2.1)=3.
  // All three land in train, none in test.
  UserId u1 = d.users.find("1").value();
  CHECK(d.train_rows_of_user[static_cast<std::size_t>(u1)].size() == 3);
  CHECK(d.test_rows_of_user[static_cast<std::size_t>(u1)].empty());

  config.train_fraction = 0.5;
  Dataset d2 = ingest(config);
  UserId v1 = d2.users.find("1").value();
  auto train_rows = d2.train_rows_of_user[static_cast<std::size_t>(v1)];
  auto test_rows = d2.test_rows_of_user[static_cast<std::size_t>(v1)];
  REQUIRE(train_rows.size() == 2);
  REQUIRE(test_rows.size() == 1);
  std::int64_t max_train = 0, min_test = 0;
  for (auto r : train_rows)
    max_train = std::max(max_train, d2.interactions[r].timestamp);
  min_test = d2.interactions[test_rows[0]].timestamp;
  CHECK(max_train <= min_test);
  fs::remove_all(dir);
}

TEST_CASE("single-interaction users always keep a training row") {
  auto dir = temp_dir("single");
  write_ml100k_fixture(dir);
  std::string zeros15;
  for (int i = 0; i < 15; ++i) zeros15 += "|0";
  write_file((dir / "u.item").string(),
             "10|Movie A|01-Jan-1995||http://a|0|1|0|0" + zeros15 + "\n" +
                 "20|Movie B|01-Jan-1995||http://b|0|1|1|0" + zeros15 + "\n" +
                 "30|Movie C|01-Jan-1995||http://c|0|0|0|1" + zeros15 + "\n" +
                 "40|Movie D|01-Jan-1995||http://d|0|1|0|0" + zeros15 + "\n");
  IngestConfig config = ml100k_config(dir);
  config.train_fraction = 0.5;
  Dataset d = ingest(config);
  UserId u3 = d.users.find("3").value();
  CHECK(d.train_rows_of_user[static_cast<std::size_t>(u3)].size() == 1);
  CHECK(d.test_rows_of_user[static_cast<std::size_t>(u3)].empty());
  fs::remove_all(dir);
}

TEST_CASE("ingest drops zero-category items before filtering") {
  auto dir = temp_dir("zerocat");
  write_ml100k_fixture(dir);
  // Item 40 has only the unknown flag; with the default config it loses all
  // categories and its single interaction with user 3 disappears.
  Dataset d = ingest(ml100k_config(dir));
  CHECK(!d.items.find("40").has_value());
  CHECK(!d.users.find("3").has_value());
  CHECK(d.num_users() == 2);
  CHECK(d.num_items() == 3);
  CHECK(d.interactions.size() == 6);
  CHECK(d.catalog.names.size() == 18);
  for (const auto& members : d.catalog.members)
    for (CategoryId c : members)
      CHECK(c <= 2);  // only Action, Adventure, Animation are populated
  fs::remove_all(dir);
}

TEST_CASE("ingest keeps duplicate user-item pairs as separate rows") {
  auto dir = temp_dir("dups");
  auto path = (dir / "x.tsv").string();
  write_file(path,
             "user\titem\trating\ttimestamp\n"
             "u1\ti1\t4\t100\n"
             "u1\ti1\t2\t900\n");
  auto cats = (dir / "cats.tsv").string();
  write_file(cats, "i1\tAction\n");
  IngestConfig config;
  config.format = DatasetFormat::kGenericTsv;
  config.interactions_path = path;
  config.categories_path = cats;
  config.k_core = 0;
  Dataset d = ingest(config);
  CHECK(d.interactions.size() == 2);
  CHECK(d.train_items_of_user[0] == std::vector<ItemId>{0});
  fs::remove_all(dir);
}

TEST_CASE("missing attribute value raises a named error") {
  auto dir = temp_dir("missingattr");
  write_ml100k_fixture(dir);
  write_file((dir / "u.user").string(),
             "1|24|M|technician|85711\n"
             "2|53||writer|94043\n"
             "3|33|M|other|00000\n");
  CHECK_THROWS_WITH_AS(ingest(ml100k_config(dir)),
                       doctest::Contains("missing attribute"),
                       std::runtime_error);
  fs::remove_all(dir);
}

TEST_CASE("interactions referencing unknown metadata raise errors") {
  auto dir = temp_dir("unknownmeta");
  write_ml100k_fixture(dir);
  write_file((dir / "u.data").string(),
             "1\t10\t5\t100\n"
             "99\t10\t4\t200\n");
  CHECK_THROWS(ingest(ml100k_config(dir)));
  fs::remove_all(dir);
}

TEST_CASE("dataset bundle round-trips exactly") {
  auto dir = temp_dir("bundle");
  write_ml100k_fixture(dir);
  IngestConfig config = ml100k_config(dir);
  config.train_fraction = 0.5;
  Dataset original = ingest(config);

  auto bundle = dir / "bundle";
  write_dataset_bundle(original, config, bundle.string());
  CHECK(fs::exists(bundle / "interactions.tsv"));
  CHECK(fs::exists(bundle / "users.tsv"));
  CHECK(fs::exists(bundle / "item_categories.tsv"));
  CHECK(fs::exists(bundle / "manifest.json"));

  Dataset loaded = read_dataset_bundle(bundle.string());
  REQUIRE(loaded.num_users() == original.num_users());
  REQUIRE(loaded.num_items() == original.num_items());
  REQUIRE(loaded.interactions.size() == original.interactions.size());
  for (std::size_t i = 0; i < original.interactions.size(); ++i) {
    CHECK(loaded.interactions[i].user == original.interactions[i].user);
    CHECK(loaded.interactions[i].item == original.interactions[i].item);
    CHECK(loaded.interactions[i].rating == original.interactions[i].rating);
    CHECK(loaded.interactions[i].timestamp ==
          original.interactions[i].timestamp);
    CHECK(loaded.split[i] == original.split[i]);
  }
  CHECK(loaded.catalog.names == original.catalog.names);
  CHECK(loaded.catalog.members == original.catalog.members);
  REQUIRE(loaded.attributes.attributes.size() ==
          original.attributes.attributes.size());
  for (std::size_t a = 0; a < original.attributes.attributes.size(); ++a) {
    CHECK(loaded.attributes.attributes[a].name ==
          original.attributes.attributes[a].name);
    CHECK(loaded.attributes.attributes[a].classes ==
          original.attributes.attributes[a].classes);
    CHECK(loaded.attributes.attributes[a].value_of_user ==
          original.attributes.attributes[a].value_of_user);
  }
  for (std::int32_t u = 0; u < original.num_users(); ++u)
    CHECK(loaded.users.original(u) == original.users.original(u));
  for (std::int32_t v = 0; v < original.num_items(); ++v)
    CHECK(loaded.items.original(v) == original.items.original(v));
  fs::remove_all(dir);
}

TEST_CASE("ingest config validation") {
  IngestConfig config;
  config.interactions_path = "x";
  CHECK_NOTHROW(config.validate());
  SUBCASE("bad fraction") {
    config.train_fraction = 0.0;
    CHECK_THROWS(config.validate());
    config.train_fraction = 1.5;
    CHECK_THROWS(config.validate());
  }
  SUBCASE("negative k-core") {
    config.k_core = -1;
    CHECK_THROWS(config.validate());
  }
  SUBCASE("missing interactions path") {
    config.interactions_path.clear();
    CHECK_THROWS(config.validate());
  }
}
