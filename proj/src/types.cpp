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

#include "fairrec/types.hpp"

#include <fmt/core.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <set>
#include <stdexcept>

namespace fairrec {

std::int32_t IdMap::add(const std::string& original) {
  auto it = index_.find(original);
  if (it != index_.end()) return it->second;
  std::int32_t dense = static_cast<std::int32_t>(originals_.size());
  originals_.push_back(original);
  index_.emplace(original, dense);
  return dense;
}

std::optional<std::int32_t> IdMap::find(const std::string& original) const {
  auto it = index_.find(original);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& IdMap::original(std::int32_t dense) const {
  if (dense < 0 || dense >= size())
    throw std::out_of_range(fmt::format("dense id {} out of range [0,{})", dense, size()));
  return originals_[static_cast<std::size_t>(dense)];
}

void CategoryCatalog::validate() const {
  std::set<std::string> seen;
  for (const auto& name : names) {
    if (!seen.insert(name).second)
      throw std::runtime_error(fmt::format("duplicate category name '{}'", name));
  }
  std::vector<std::string> offenders;
  for (std::size_t v = 0; v < members.size(); ++v) {
    if (members[v].empty()) offenders.push_back(std::to_string(v));
    for (CategoryId c : members[v]) {
      if (c < 0 || static_cast<std::size_t>(c) >= names.size())
        throw std::runtime_error(fmt::format("item {} references unknown category {}", v, c));
    }
    if (!std::is_sorted(members[v].begin(), members[v].end()))
      throw std::runtime_error(fmt::format("item {} category list not sorted", v));
    if (std::adjacent_find(members[v].begin(), members[v].end()) != members[v].end())
      throw std::runtime_error(fmt::format("item {} has duplicate categories", v));
  }
  if (!offenders.empty())
    throw std::runtime_error(
        fmt::format("items with zero categories: [{}]", fmt::join(offenders, ", ")));
}

std::vector<std::pair<CategoryId, double>> item_category_fractions(
    ItemId item, const CategoryCatalog& catalog) {
  if (item < 0 || static_cast<std::size_t>(item) >= catalog.members.size())
    throw std::out_of_range(fmt::format("unknown item {}", item));
  const auto& cats = catalog.members[static_cast<std::size_t>(item)];
  if (cats.empty())
    throw std::runtime_error(fmt::format("item {} has zero categories", item));
  const double frac = 1.0 / static_cast<double>(cats.size());
  std::vector<std::pair<CategoryId, double>> out;
  out.reserve(cats.size());
  for (CategoryId c : cats) out.emplace_back(c, frac);
  return out;
}

bool UserAttributes::has(const std::string& name) const {
  for (const auto& a : attributes)
    if (a.name == name) return true;
  return false;
}

const Attribute& UserAttributes::get(const std::string& name) const {
  for (const auto& a : attributes)
    if (a.name == name) return a;
  throw std::invalid_argument(fmt::format("unknown attribute '{}'", name));
}

std::vector<std::string> UserAttributes::names() const {
  std::vector<std::string> out;
  out.reserve(attributes.size());
  for (const auto& a : attributes) out.push_back(a.name);
  return out;
}

void Dataset::finalize() {
  train_rows_of_user.assign(static_cast<std::size_t>(num_users()), {});
  test_rows_of_user.assign(static_cast<std::size_t>(num_users()), {});
  train_items_of_user.assign(static_cast<std::size_t>(num_users()), {});
  test_items_of_user.assign(static_cast<std::size_t>(num_users()), {});
  for (std::size_t row = 0; row < interactions.size(); ++row) {
    const auto& x = interactions[row];
    auto& rows = (split[row] == Split::kTrain) ? train_rows_of_user : test_rows_of_user;
    rows[static_cast<std::size_t>(x.user)].push_back(static_cast<std::int32_t>(row));
  }
  auto dedupe = [&](const std::vector<std::int32_t>& rows) {
    std::vector<ItemId> items;
    items.reserve(rows.size());
    for (std::int32_t r : rows) items.push_back(interactions[static_cast<std::size_t>(r)].item);
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    return items;
  };
  for (std::int32_t u = 0; u < num_users(); ++u) {
    train_items_of_user[static_cast<std::size_t>(u)] = dedupe(train_rows_of_user[static_cast<std::size_t>(u)]);
    test_items_of_user[static_cast<std::size_t>(u)] = dedupe(test_rows_of_user[static_cast<std::size_t>(u)]);
  }
}

void Dataset::validate() const {
  if (split.size() != interactions.size())
    throw std::runtime_error("split tags do not match interaction count");
  if (catalog.num_items() != static_cast<std::size_t>(num_items()))
    throw std::runtime_error("catalog item count does not match item table");
  catalog.validate();
  for (std::size_t row = 0; row < interactions.size(); ++row) {
    const auto& x = interactions[row];
    if (x.user < 0 || x.user >= num_users())
      throw std::runtime_error(fmt::format("row {}: user {} out of range", row, x.user));
    if (x.item < 0 || x.item >= num_items())
      throw std::runtime_error(fmt::format("row {}: item {} out of range", row, x.item));
    if (x.timestamp < 0)
      throw std::runtime_error(fmt::format("row {}: negative timestamp", row));
  }
  for (const auto& a : attributes.attributes) {
    if (a.value_of_user.size() != static_cast<std::size_t>(num_users()))
      throw std::runtime_error(fmt::format("attribute '{}' does not cover every user", a.name));
    for (std::int32_t v : a.value_of_user)
      if (v < 0 || v >= a.num_classes())
        throw std::runtime_error(fmt::format("attribute '{}' has out-of-range class index", a.name));
  }
  // Every test user also appears in train.
  if (!train_items_of_user.empty()) {
    for (std::int32_t u = 0; u < num_users(); ++u) {
      const auto su = static_cast<std::size_t>(u);
      if (!test_rows_of_user[su].empty() && train_rows_of_user[su].empty())
        throw std::runtime_error(fmt::format("user {} has test rows but no train rows", u));
    }
  }
}

void ScoreSet::sort_and_validate() {
  for (auto& list : candidates) {
    std::sort(list.begin(), list.end(), [](const ScoredItem& a, const ScoredItem& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.item < b.item;
    });
    for (std::size_t i = 1; i < list.size(); ++i)
      if (list[i - 1].item == list[i].item)
        throw std::runtime_error(fmt::format("duplicate candidate item {}", list[i].item));
  }
}

std::vector<UserId> AttributePartition::complement(std::int32_t class_index) const {
  if (class_index < 0 || static_cast<std::size_t>(class_index) >= groups.size())
    throw std::out_of_range("class index out of range");
  std::vector<UserId> out;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (static_cast<std::int32_t>(g) == class_index) continue;
    out.insert(out.end(), groups[g].begin(), groups[g].end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool AttributePartition::degenerate() const {
  int nonempty = 0;
  for (const auto& g : groups)
    if (!g.empty()) ++nonempty;
  return nonempty < 2;
}

std::size_t AttributePartition::total_users() const {
  std::size_t n = 0;
  for (const auto& g : groups) n += g.size();
  return n;
}

AttributePartition partition_by_attribute(std::span<const UserId> users,
                                          const UserAttributes& attributes,
                                          const std::string& attribute) {
  const Attribute& attr = attributes.get(attribute);
  AttributePartition part;
  part.attribute = attribute;
  part.classes = attr.classes;
  part.groups.assign(attr.classes.size(), {});
  for (UserId u : users) {
    if (u < 0 || static_cast<std::size_t>(u) >= attr.value_of_user.size())
      throw std::out_of_range(fmt::format("user {} not covered by attribute '{}'", u, attribute));
    part.groups[static_cast<std::size_t>(attr.value_of_user[static_cast<std::size_t>(u)])].push_back(u);
  }
  for (auto& g : part.groups) std::sort(g.begin(), g.end());
  return part;
}

}  // namespace fairrec
