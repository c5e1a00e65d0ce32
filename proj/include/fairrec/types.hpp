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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace fairrec {

// Dense indices assigned at ingestion; original string ids live in IdMap.
using UserId = std::int32_t;
using ItemId = std::int32_t;
using CategoryId = std::int32_t;

enum class Split : std::uint8_t { kTrain = 0, kTest = 1 };

struct Interaction {
  UserId user = -1;
  ItemId item = -1;
  double rating = 0.0;  // dataset units; 0 when the format carries none
  std::int64_t timestamp = 0;
};

// Bijective original-id <-> dense-index table. Dense ids are assigned in
// insertion order and are contiguous from 0.
class IdMap {
 public:
  std::int32_t add(const std::string& original);
  std::optional<std::int32_t> find(const std::string& original) const;
  const std::string& original(std::int32_t dense) const;
  std::int32_t size() const { return static_cast<std::int32_t>(originals_.size()); }

 private:
  std::vector<std::string> originals_;
  std::unordered_map<std::string, std::int32_t> index_;
};

// Item x category incidence. Every item carries at least one category;
// zero-category items are rejected at ingestion.
struct CategoryCatalog {
  std::vector<std::string> names;                // unique category names
  std::vector<std::vector<CategoryId>> members;  // per item, sorted ascending

  std::size_t num_categories() const { return names.size(); }
  std::size_t num_items() const { return members.size(); }
  void validate() const;  // throws on empty membership or duplicate names
};

// c -> C_{v,c} / |C_v| for the item's categories; omitted entries are zero.
// The returned fractions sum to 1.
std::vector<std::pair<CategoryId, double>> item_category_fractions(
    ItemId item, const CategoryCatalog& catalog);

struct Attribute {
  std::string name;
  std::vector<std::string> classes;          // observed class labels
  std::vector<std::int32_t> value_of_user;   // dense user -> index into classes
  int num_classes() const { return static_cast<int>(classes.size()); }
};

struct UserAttributes {
  std::vector<Attribute> attributes;

  bool has(const std::string& name) const;
  const Attribute& get(const std::string& name) const;  // throws on unknown name
  std::vector<std::string> names() const;
};

struct Dataset {
  IdMap users;
  IdMap items;
  std::vector<Interaction> interactions;  // all rows; (user,item) may repeat with distinct timestamps
  std::vector<Split> split;               // parallel to interactions
  CategoryCatalog catalog;
  UserAttributes attributes;

  // Derived lookups, filled by finalize().
  std::vector<std::vector<std::int32_t>> train_rows_of_user;  // row indices into interactions
  std::vector<std::vector<std::int32_t>> test_rows_of_user;
  std::vector<std::vector<ItemId>> train_items_of_user;  // deduplicated, sorted
  std::vector<std::vector<ItemId>> test_items_of_user;   // deduplicated, sorted

  std::int32_t num_users() const { return users.size(); }
  std::int32_t num_items() const { return items.size(); }

  void finalize();        // builds the derived lookups
  void validate() const;  // cross-checks every stated invariant, throws on violation
};

// Per-user candidate list, strictly ordered by (score desc, item asc);
// candidates never contain the user's training items.
struct ScoredItem {
  ItemId item = -1;
  double score = 0.0;
};

struct ScoreSet {
  std::vector<std::vector<ScoredItem>> candidates;  // indexed by dense user

  void sort_and_validate();  // enforces the candidate ordering invariant
};

struct RankedList {
  UserId user = -1;
  std::vector<ItemId> items;  // length <= k, no duplicates
};

// Disjoint cover of a user set by the values of one attribute.
struct AttributePartition {
  std::string attribute;
  std::vector<std::string> classes;           // class labels, aligned with groups
  std::vector<std::vector<UserId>> groups;    // sorted ascending user id

  // U_{not s}: every input user whose class differs from class_index.
  std::vector<UserId> complement(std::int32_t class_index) const;
  // True when fewer than two classes actually occur in the input users.
  bool degenerate() const;
  std::size_t total_users() const;
};

AttributePartition partition_by_attribute(std::span<const UserId> users,
                                          const UserAttributes& attributes,
                                          const std::string& attribute);

}  // namespace fairrec
