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

enum class DatasetFormat : std::uint8_t {
  kMovieLens100K = 0,
  kMovieLens1M = 1,
  kGenericTsv = 2,
};

enum class SplitStrategy : std::uint8_t {
  kTemporalPerUser = 0,
  kTemporalGlobal = 1,
};

struct IngestConfig {
  DatasetFormat format = DatasetFormat::kMovieLens100K;
  std::string interactions_path;
  std::string users_path;       // attribute file; empty means no attributes
  std::string categories_path;  // item metadata; empty means no catalog
  int k_core = 5;
  SplitStrategy split = SplitStrategy::kTemporalPerUser;
  double train_fraction = 0.8;
  bool keep_unknown_genre = false;  // ML100K "unknown" flag column

  void validate() const;
};

// Raw rows in file order, ids still original strings.
struct RawInteraction {
  std::string user;
  std::string item;
  double rating = 0.0;
  std::int64_t timestamp = 0;
};

struct RawDataset {
  std::vector<RawInteraction> interactions;
  // Per original item id: category names. Parallel vectors.
  std::vector<std::string> item_ids;
  std::vector<std::vector<std::string>> item_categories;
  std::vector<std::string> category_names;  // declared order
  // Per original user id: attribute values keyed by attribute name order.
  std::vector<std::string> user_ids;
  std::vector<std::string> attribute_names;
  std::vector<std::vector<std::string>> user_values;  // [user][attribute]
};

std::vector<RawInteraction> parse_interactions(const IngestConfig& config);

// Reads the attribute file for the configured format. ML100K/ML1M bucket age
// into the seven standard bands {1,18,25,35,45,50,56}.
void load_user_attributes(const IngestConfig& config, RawDataset& raw);

// Reads item metadata. ML100K genre flag columns become category names;
// generic format expects `item \t cat1|cat2|...`.
void load_item_categories(const IngestConfig& config, RawDataset& raw);

// Iterative removal of users/items with degree < k until fixed point.
// Degree counts distinct (user,item) pairs, not raw rows. Returns surviving
// rows in original order. Throws if the k-core is empty for k > 0.
std::vector<RawInteraction> k_core_filter(std::vector<RawInteraction> rows,
                                          int k);

// Builds the final Dataset: assigns dense ids (first-appearance order over
// the filtered interactions), attaches attributes and categories for the
// surviving users/items, applies the split, finalizes and validates.
Dataset assemble_dataset(const IngestConfig& config, const RawDataset& raw,
                         std::vector<RawInteraction> filtered);

// parse + load + filter + assemble in one call.
Dataset ingest(const IngestConfig& config);

// Canonical bundle: interactions.tsv, users.tsv, item_categories.tsv and a
// manifest.json with counts, category list, attribute schemas, split config.
void write_dataset_bundle(const Dataset& dataset, const IngestConfig& config,
                          const std::string& directory);
Dataset read_dataset_bundle(const std::string& directory);

}  // namespace fairrec
