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
#include <vector>

#include "fairrec/io.hpp"
#include "fairrec/parallel.hpp"
#include "fairrec/rng.hpp"
#include "fairrec/types.hpp"

using namespace fairrec;

namespace {

std::filesystem::path temp_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() /
             ("fairrec_domain_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("id map assigns dense ids in insertion order") {
  IdMap map;
  CHECK(map.add("42") == 0);
  CHECK(map.add("7") == 1);
  CHECK(map.add("42") == 0);
  CHECK(map.size() == 2);
  CHECK(map.original(0) == "42");
  CHECK(map.original(1) == "7");
  CHECK(map.find("7").value() == 1);
  CHECK(!map.find("missing").has_value());
  CHECK_THROWS(map.original(2));
}

TEST_CASE("category catalog validation") {
  CategoryCatalog catalog;
  catalog.names = {"a", "b"};
  catalog.members = {{0}, {0, 1}};
  CHECK_NOTHROW(catalog.validate());

  SUBCASE("duplicate names") {
    catalog.names = {"a", "a"};
    CHECK_THROWS_WITH_AS(catalog.validate(),
                         doctest::Contains("duplicate category name"),
                         std::runtime_error);
  }
  SUBCASE("empty membership") {
    catalog.members[1].clear();
    CHECK_THROWS_WITH_AS(catalog.validate(),
                         doctest::Contains("zero categories"),
                         std::runtime_error);
  }
  SUBCASE("unsorted membership") {
    catalog.members[1] = {1, 0};
    CHECK_THROWS(catalog.validate());
  }
  SUBCASE("unknown category id") {
    catalog.members[1] = {0, 5};
    CHECK_THROWS(catalog.validate());
  }
}

TEST_CASE("item category fractions split evenly and sum to one") {
  CategoryCatalog catalog;
  catalog.names = {"a", "b", "c"};
  catalog.members = {{0, 2}, {1}};

  auto f0 = item_category_fractions(0, catalog);
  REQUIRE(f0.size() == 2);
  CHECK(f0[0].first == 0);
  CHECK(f0[0].second == doctest::Approx(0.5));
  CHECK(f0[1].first == 2);
  CHECK(f0[1].second == doctest::Approx(0.5));

  auto f1 = item_category_fractions(1, catalog);
  REQUIRE(f1.size() == 1);
  CHECK(f1[0].second == doctest::Approx(1.0));

  CHECK_THROWS(item_category_fractions(9, catalog));
}

TEST_CASE("score set sorting enforces score desc then item asc") {
  ScoreSet scores;
  scores.candidates = {{{3, 1.0}, {1, 2.0}, {2, 2.0}}};
  scores.sort_and_validate();
  CHECK(scores.candidates[0][0].item == 1);
  CHECK(scores.candidates[0][1].item == 2);
  CHECK(scores.candidates[0][2].item == 3);

  ScoreSet dup;
  dup.candidates = {{{1, 0.5}, {1, 0.4}}};
  CHECK_THROWS_WITH_AS(dup.sort_and_validate(),
                       doctest::Contains("duplicate candidate item"),
                       std::runtime_error);
}

TEST_CASE("partition by attribute covers users exactly once") {
  UserAttributes attrs;
  Attribute gender;
  gender.name = "gender";
  gender.classes = {"M", "F"};
  gender.value_of_user = {0, 1, 0, 0, 1};
  attrs.attributes.push_back(gender);

  std::vector<UserId> users = {0, 1, 2, 3, 4};
  AttributePartition part = partition_by_attribute(users, attrs, "gender");
  REQUIRE(part.groups.size() == 2);
  CHECK(part.groups[0] == std::vector<UserId>{0, 2, 3});
  CHECK(part.groups[1] == std::vector<UserId>{1, 4});
  CHECK(part.total_users() == users.size());
  CHECK(!part.degenerate());

  std::set<UserId> seen;
  for (const auto& g : part.groups)
    for (UserId u : g) CHECK(seen.insert(u).second);
  CHECK(seen.size() == users.size());

  CHECK(part.complement(0) == std::vector<UserId>{1, 4});
  CHECK(part.complement(1) == std::vector<UserId>{0, 2, 3});
  CHECK_THROWS(part.complement(5));
  CHECK_THROWS(partition_by_attribute(users, attrs, "zodiac"));
}

TEST_CASE("partition with one observed class is degenerate") {
  UserAttributes attrs;
  Attribute a;
  a.name = "g";
  a.classes = {"x", "y"};
  a.value_of_user = {0, 0, 0};
  attrs.attributes.push_back(a);
  std::vector<UserId> users = {0, 1, 2};
  CHECK(partition_by_attribute(users, attrs, "g").degenerate());
}

TEST_CASE("dataset finalize builds deduplicated sorted lookups") {
  Dataset d;
  d.users.add("u0");
  d.users.add("u1");
  d.items.add("i0");
  d.items.add("i1");
  d.items.add("i2");
  d.interactions = {{0, 2, 5.0, 10}, {0, 0, 3.0, 20}, {0, 2, 4.0, 30},
                    {1, 1, 1.0, 5},  {1, 0, 2.0, 50}};
  d.split = {Split::kTrain, Split::kTrain, Split::kTrain, Split::kTrain,
             Split::kTest};
  d.catalog.names = {"c"};
  d.catalog.members = {{0}, {0}, {0}};
  d.finalize();

  CHECK(d.train_items_of_user[0] == std::vector<ItemId>{0, 2});
  CHECK(d.train_rows_of_user[0] == std::vector<std::int32_t>{0, 1, 2});
  CHECK(d.test_items_of_user[1] == std::vector<ItemId>{0});
  CHECK_NOTHROW(d.validate());

  SUBCASE("test-only user rejected") {
    d.split[3] = Split::kTest;
    d.finalize();
    CHECK_THROWS_WITH_AS(d.validate(),
                         doctest::Contains("test rows but no train rows"),
                         std::runtime_error);
  }
}

TEST_CASE("rng is deterministic and unbiased across ranges") {
  Rng a(123);
  Rng b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng r(7);
  for (int i = 0; i < 1000; ++i) {
    double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r.uniform_index(10) < 10);
  }
}

TEST_CASE("rng shuffle produces a permutation") {
  Rng r(99);
  std::vector<int> v = {1, 2, 3, 4, 5, 6, 7, 8};
  auto sorted = v;
  r.shuffle(v);
  CHECK(std::is_permutation(v.begin(), v.end(), sorted.begin()));
}

TEST_CASE("weighted index respects zero weights") {
  Rng r(5);
  std::vector<double> w = {0.0, 1.0, 0.0};
  for (int i = 0; i < 50; ++i) CHECK(r.weighted_index(w) == 1);
}

TEST_CASE("parallel_for covers every index once for any thread count") {
  const std::size_t n = 1000;
  for (int threads : {1, 2, 3, 8}) {
    std::vector<int> hits(n, 0);
    parallel_for(n, threads, [&](std::size_t i) { hits[i] += 1; });
    for (std::size_t i = 0; i < n; ++i) CHECK(hits[i] == 1);
  }
}

TEST_CASE("parallel_for propagates exceptions") {
  CHECK_THROWS_AS(parallel_for(100, 4,
                               [](std::size_t i) {
                                 if (i == 57) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}

TEST_CASE("split preserves empty fields") {
  CHECK(split("a|b||c", '|') ==
        std::vector<std::string>{"a", "b", "", "c"});
  CHECK(split("|x|", '|') == std::vector<std::string>{"", "x", ""});
  CHECK(split("1::2::3", std::string("::")) ==
        std::vector<std::string>{"1", "2", "3"});
  CHECK(split("a", '|') == std::vector<std::string>{"a"});
}

TEST_CASE("strict numeric parsing rejects partial fields") {
  CHECK(parse_int("42") == 42);
  CHECK(parse_int("-3") == -3);
  CHECK_THROWS_AS(parse_int("42x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_int(""), std::invalid_argument);
  CHECK(parse_double("2.5") == doctest::Approx(2.5));
  CHECK_THROWS_AS(parse_double("2.5turtles"), std::invalid_argument);
  CHECK_THROWS_AS(parse_double(""), std::invalid_argument);
}

TEST_CASE("read_lines strips carriage returns and trailing blank") {
  auto dir = temp_dir("lines");
  auto path = (dir / "f.txt").string();
  write_file(path, "one\r\ntwo\nthree\n");
  auto lines = read_lines(path);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "one");
  CHECK(lines[1] == "two");
  CHECK(lines[2] == "three");
  CHECK_THROWS(read_lines((dir / "missing.txt").string()));
  std::filesystem::remove_all(dir);
}

TEST_CASE("file hash is stable and content sensitive") {
  auto dir = temp_dir("hash");
  auto p1 = (dir / "a").string();
  auto p2 = (dir / "b").string();
  write_file(p1, "content");
  write_file(p2, "content");
  CHECK(file_hash(p1) == file_hash(p2));
  CHECK(file_hash(p1).size() == 16);
  write_file(p2, "different");
  CHECK(file_hash(p1) != file_hash(p2));
  std::filesystem::remove_all(dir);
}
