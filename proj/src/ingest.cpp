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

#include "fairrec/ingest.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "fairrec/io.hpp"

namespace fairrec {
namespace {

using nlohmann::json;

constexpr const char* kMl100kGenres[] = {
    "unknown",  "Action",    "Adventure", "Animation", "Children's",
    "Comedy",   "Crime",     "Documentary", "Drama",   "Fantasy",
    "Film-Noir", "Horror",   "Musical",   "Mystery",   "Romance",
    "Sci-Fi",   "Thriller",  "War",       "Western"};
constexpr int kMl100kGenreCount = 19;

constexpr const char* kMl1mGenres[] = {
    "Action",    "Adventure", "Animation", "Children's", "Comedy",
    "Crime",     "Documentary", "Drama",   "Fantasy",    "Film-Noir",
    "Horror",    "Musical",   "Mystery",   "Romance",    "Sci-Fi",
    "Thriller",  "War",       "Western"};

// MovieLens-1M age bands applied to ML100K raw integer ages.
std::string age_band(int age) {
  if (age < 18) return "1";
  if (age < 25) return "18";
  if (age < 35) return "25";
  if (age < 45) return "35";
  if (age < 50) return "45";
  if (age < 56) return "50";
  return "56";
}

std::vector<std::string> split_row(const std::string& line,
                                   DatasetFormat format) {
  if (format == DatasetFormat::kMovieLens1M) return split(line, std::string("::"));
  return split(line, '\t');
}

}  // namespace

void IngestConfig::validate() const {
  if (k_core < 0) throw std::invalid_argument("k_core must be >= 0");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument(
        fmt::format("train_fraction must lie in (0,1), got {}", train_fraction));
  if (interactions_path.empty())
    throw std::invalid_argument("interactions_path is required");
}

std::vector<RawInteraction> parse_interactions(const IngestConfig& config) {
  config.validate();
  std::vector<std::string> lines = read_lines(config.interactions_path);
  std::vector<RawInteraction> rows;
  rows.reserve(lines.size());

  std::size_t first_line = 0;
  int user_col = 0, item_col = 1, rating_col = 2, timestamp_col = 3;
  bool has_rating = true;
  if (config.format == DatasetFormat::kGenericTsv) {
    if (lines.empty()) {
      fmt::print(stderr, "warning: '{}' is empty\n", config.interactions_path);
      return rows;
    }
    std::vector<std::string> header = split(lines[0], '\t');
    user_col = item_col = rating_col = timestamp_col = -1;
    for (int i = 0; i < static_cast<int>(header.size()); ++i) {
      if (header[i] == "user") user_col = i;
      else if (header[i] == "item") item_col = i;
      else if (header[i] == "rating") rating_col = i;
      else if (header[i] == "timestamp") timestamp_col = i;
    }
    if (user_col < 0 || item_col < 0 || timestamp_col < 0)
      throw std::runtime_error(fmt::format(
          "'{}': header must name user, item and timestamp columns",
          config.interactions_path));
    has_rating = rating_col >= 0;
    first_line = 1;
  }

  for (std::size_t i = first_line; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty()) continue;
    std::vector<std::string> f = split_row(line, config.format);
    int needed = std::max({user_col, item_col, timestamp_col,
                           has_rating ? rating_col : 0}) + 1;
    if (static_cast<int>(f.size()) < needed)
      throw std::runtime_error(
          fmt::format("'{}' line {}: expected {} fields, got {}",
                      config.interactions_path, i + 1, needed, f.size()));
    RawInteraction row;
    row.user = f[user_col];
    row.item = f[item_col];
    try {
      row.rating = has_rating ? parse_double(f[rating_col]) : 0.0;
      row.timestamp = parse_int(f[timestamp_col]);
    } catch (const std::exception& e) {
      throw std::runtime_error(fmt::format("'{}' line {}: {}",
                                           config.interactions_path, i + 1,
                                           e.what()));
    }
    if (row.user.empty() || row.item.empty())
      throw std::runtime_error(fmt::format("'{}' line {}: empty id field",
                                           config.interactions_path, i + 1));
    rows.push_back(std::move(row));
  }
  if (rows.empty())
    fmt::print(stderr, "warning: '{}' contains no interactions\n",
               config.interactions_path);
  return rows;
}

void load_user_attributes(const IngestConfig& config, RawDataset& raw) {
  if (config.users_path.empty()) return;
  std::vector<std::string> lines = read_lines(config.users_path);

  raw.user_ids.clear();
  raw.user_values.clear();
  std::size_t first_line = 0;
  if (config.format == DatasetFormat::kGenericTsv) {
    if (lines.empty())
      throw std::runtime_error(
          fmt::format("'{}' is empty", config.users_path));
    std::vector<std::string> header = split(lines[0], '\t');
    if (header.size() < 2 || header[0] != "user")
      throw std::runtime_error(fmt::format(
          "'{}': header must start with 'user' and name >= 1 attribute",
          config.users_path));
    raw.attribute_names.assign(header.begin() + 1, header.end());
    first_line = 1;
  } else {
    raw.attribute_names = {"gender", "age", "occupation"};
  }

  std::unordered_set<std::string> seen;
  for (std::size_t i = first_line; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string id;
    std::vector<std::string> values;
    switch (config.format) {
      case DatasetFormat::kMovieLens100K: {
        f = split(line, '|');
        if (f.size() < 4)
          throw std::runtime_error(fmt::format("'{}' line {}: expected id|age|gender|occupation",
                                               config.users_path, i + 1));
        id = f[0];
        int age = 0;
        try {
          age = static_cast<int>(parse_int(f[1]));
        } catch (const std::exception&) {
          throw std::runtime_error(fmt::format("'{}' line {}: bad age '{}'",
                                               config.users_path, i + 1, f[1]));
        }
        values = {f[2], age_band(age), f[3]};
        break;
      }
      case DatasetFormat::kMovieLens1M: {
        f = split(line, std::string("::"));
        if (f.size() < 4)
          throw std::runtime_error(fmt::format("'{}' line {}: expected id::gender::age::occupation",
                                               config.users_path, i + 1));
        id = f[0];
        values = {f[1], f[2], f[3]};
        break;
      }
      case DatasetFormat::kGenericTsv: {
        f = split(line, '\t');
        if (f.size() != raw.attribute_names.size() + 1)
          throw std::runtime_error(fmt::format("'{}' line {}: expected {} fields, got {}",
                                               config.users_path, i + 1,
                                               raw.attribute_names.size() + 1,
                                               f.size()));
        id = f[0];
        values.assign(f.begin() + 1, f.end());
        break;
      }
    }
    for (std::size_t a = 0; a < values.size(); ++a)
      if (values[a].empty())
        throw std::runtime_error(fmt::format(
            "'{}' line {}: user '{}' is missing attribute '{}'",
            config.users_path, i + 1, id, raw.attribute_names[a]));
    if (!seen.insert(id).second)
      throw std::runtime_error(fmt::format("'{}' line {}: duplicate user '{}'",
                                           config.users_path, i + 1, id));
    raw.user_ids.push_back(id);
    raw.user_values.push_back(std::move(values));
  }
}

void load_item_categories(const IngestConfig& config, RawDataset& raw) {
  if (config.categories_path.empty()) return;
  std::vector<std::string> lines = read_lines(config.categories_path);

  raw.item_ids.clear();
  raw.item_categories.clear();
  raw.category_names.clear();

  std::vector<std::string> genre_names;
  if (config.format == DatasetFormat::kMovieLens100K) {
    namespace fs = std::filesystem;
    fs::path genre_file =
        fs::path(config.categories_path).parent_path() / "u.genre";
    if (fs::exists(genre_file)) {
      for (const std::string& line : read_lines(genre_file.string())) {
        if (line.empty()) continue;
        genre_names.push_back(split(line, '|')[0]);
      }
      if (static_cast<int>(genre_names.size()) != kMl100kGenreCount)
        throw std::runtime_error(
            fmt::format("'{}': expected {} genres, got {}",
                        genre_file.string(), kMl100kGenreCount,
                        genre_names.size()));
    } else {
      genre_names.assign(kMl100kGenres, kMl100kGenres + kMl100kGenreCount);
    }
  }

  std::unordered_set<std::string> seen;
  std::unordered_set<std::string> name_pool;
  auto declare = [&](const std::string& name) {
    if (name_pool.insert(name).second) raw.category_names.push_back(name);
  };
  if (config.format == DatasetFormat::kMovieLens100K) {
    for (int g = 0; g < kMl100kGenreCount; ++g) {
      if (!config.keep_unknown_genre && genre_names[g] == "unknown") continue;
      declare(genre_names[g]);
    }
  } else if (config.format == DatasetFormat::kMovieLens1M) {
    for (const char* g : kMl1mGenres) declare(g);
  }

  std::size_t first_line = 0;
  if (config.format == DatasetFormat::kGenericTsv) {
    if (!lines.empty() && lines[0] == "item\tcategories") first_line = 1;
  }

  for (std::size_t i = first_line; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty()) continue;
    std::string id;
    std::vector<std::string> cats;
    switch (config.format) {
      case DatasetFormat::kMovieLens100K: {
        std::vector<std::string> f = split(line, '|');
        if (static_cast<int>(f.size()) < kMl100kGenreCount + 1)
          throw std::runtime_error(fmt::format(
              "'{}' line {}: expected >= {} fields, got {}",
              config.categories_path, i + 1, kMl100kGenreCount + 1, f.size()));
        id = f[0];
        std::size_t base = f.size() - kMl100kGenreCount;
        for (int g = 0; g < kMl100kGenreCount; ++g) {
          const std::string& flag = f[base + g];
          if (flag == "0") continue;
          if (flag != "1")
            throw std::runtime_error(fmt::format("'{}' line {}: bad genre flag '{}'",
                                                 config.categories_path, i + 1,
                                                 flag));
          if (!config.keep_unknown_genre && genre_names[g] == "unknown")
            continue;
          cats.push_back(genre_names[g]);
        }
        break;
      }
      case DatasetFormat::kMovieLens1M: {
        std::vector<std::string> f = split(line, std::string("::"));
        if (f.size() < 3)
          throw std::runtime_error(fmt::format("'{}' line {}: expected id::title::genres",
                                               config.categories_path, i + 1));
        id = f[0];
        for (const std::string& c : split(f[2], '|'))
          if (!c.empty()) cats.push_back(c);
        break;
      }
      case DatasetFormat::kGenericTsv: {
        std::vector<std::string> f = split(line, '\t');
        if (f.size() < 2)
          throw std::runtime_error(fmt::format("'{}' line {}: expected item\\tcategories",
                                               config.categories_path, i + 1));
        id = f[0];
        for (const std::string& c : split(f[1], '|'))
          if (!c.empty()) cats.push_back(c);
        break;
      }
    }
    if (!seen.insert(id).second)
      throw std::runtime_error(fmt::format("'{}' line {}: duplicate item '{}'",
                                           config.categories_path, i + 1, id));
    std::sort(cats.begin(), cats.end());
    cats.erase(std::unique(cats.begin(), cats.end()), cats.end());
    for (const std::string& c : cats) declare(c);
    raw.item_ids.push_back(id);
    raw.item_categories.push_back(std::move(cats));
  }
}

std::vector<RawInteraction> k_core_filter(std::vector<RawInteraction> rows,
                                          int k) {
  if (k <= 1 || rows.empty()) return rows;

  std::unordered_map<std::string, std::int32_t> user_ix, item_ix;
  std::vector<std::int32_t> row_user(rows.size()), row_item(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto [uit, unew] = user_ix.try_emplace(
        rows[r].user, static_cast<std::int32_t>(user_ix.size()));
    auto [iit, inew] = item_ix.try_emplace(
        rows[r].item, static_cast<std::int32_t>(item_ix.size()));
    row_user[r] = uit->second;
    row_item[r] = iit->second;
  }
  std::int32_t nu = static_cast<std::int32_t>(user_ix.size());
  std::int32_t ni = static_cast<std::int32_t>(item_ix.size());

  // Degree over distinct (user, item) pairs; duplicate rows follow the pair.
  std::vector<std::pair<std::int32_t, std::int32_t>> edges;
  edges.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    edges.emplace_back(row_user[r], row_item[r]);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::vector<std::vector<std::int32_t>> items_of_user(nu), users_of_item(ni);
  for (auto [u, v] : edges) {
    items_of_user[u].push_back(v);
    users_of_item[v].push_back(u);
  }
  std::vector<std::int32_t> udeg(nu), ideg(ni);
  for (std::int32_t u = 0; u < nu; ++u)
    udeg[u] = static_cast<std::int32_t>(items_of_user[u].size());
  for (std::int32_t v = 0; v < ni; ++v)
    ideg[v] = static_cast<std::int32_t>(users_of_item[v].size());

  std::vector<char> user_dead(nu, 0), item_dead(ni, 0);
  std::vector<std::int32_t> queue_users, queue_items;
  for (std::int32_t u = 0; u < nu; ++u)
    if (udeg[u] < k) { user_dead[u] = 1; queue_users.push_back(u); }
  for (std::int32_t v = 0; v < ni; ++v)
    if (ideg[v] < k) { item_dead[v] = 1; queue_items.push_back(v); }

  while (!queue_users.empty() || !queue_items.empty()) {
    if (!queue_users.empty()) {
      std::int32_t u = queue_users.back();
      queue_users.pop_back();
      for (std::int32_t v : items_of_user[u]) {
        if (item_dead[v]) continue;
        if (--ideg[v] < k) { item_dead[v] = 1; queue_items.push_back(v); }
      }
    } else {
      std::int32_t v = queue_items.back();
      queue_items.pop_back();
      for (std::int32_t u : users_of_item[v]) {
        if (user_dead[u]) continue;
        if (--udeg[u] < k) { user_dead[u] = 1; queue_users.push_back(u); }
      }
    }
  }

  std::vector<RawInteraction> kept;
  kept.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    if (!user_dead[row_user[r]] && !item_dead[row_item[r]])
      kept.push_back(std::move(rows[r]));
  if (kept.empty())
    throw std::runtime_error(
        fmt::format("k-core with k={} is empty", k));
  return kept;
}

namespace {

void apply_split(Dataset& dataset, const IngestConfig& config) {
  const auto& rows = dataset.interactions;
  dataset.split.assign(rows.size(), Split::kTrain);

  if (config.split == SplitStrategy::kTemporalPerUser) {
    std::vector<std::vector<std::int32_t>> rows_of_user(dataset.num_users());
    for (std::int32_t r = 0; r < static_cast<std::int32_t>(rows.size()); ++r)
      rows_of_user[rows[r].user].push_back(r);
    for (auto& user_rows : rows_of_user) {
      std::sort(user_rows.begin(), user_rows.end(),
                [&](std::int32_t a, std::int32_t b) {
                  if (rows[a].timestamp != rows[b].timestamp)
                    return rows[a].timestamp < rows[b].timestamp;
                  if (rows[a].item != rows[b].item)
                    return rows[a].item < rows[b].item;
                  return a < b;
                });
      std::size_t n = user_rows.size();
      std::size_t n_train = static_cast<std::size_t>(
          std::ceil(config.train_fraction * static_cast<double>(n)));
      n_train = std::min(std::max<std::size_t>(n_train, 1), n);
      for (std::size_t j = n_train; j < n; ++j)
        dataset.split[user_rows[j]] = Split::kTest;
    }
  } else {
    std::vector<std::int32_t> order(rows.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
      if (rows[a].timestamp != rows[b].timestamp)
        return rows[a].timestamp < rows[b].timestamp;
      if (rows[a].item != rows[b].item) return rows[a].item < rows[b].item;
      return a < b;
    });
    std::size_t n_train = static_cast<std::size_t>(std::ceil(
        config.train_fraction * static_cast<double>(order.size())));
    for (std::size_t j = n_train; j < order.size(); ++j)
      dataset.split[order[j]] = Split::kTest;
    // Guarantee one train row per user.
    std::vector<std::int32_t> earliest(dataset.num_users(), -1);
    std::vector<char> has_train(dataset.num_users(), 0);
    for (std::int32_t r : order) {
      UserId u = rows[r].user;
      if (earliest[u] < 0) earliest[u] = r;
      if (dataset.split[r] == Split::kTrain) has_train[u] = 1;
    }
    for (std::int32_t u = 0; u < dataset.num_users(); ++u)
      if (!has_train[u] && earliest[u] >= 0) {
        dataset.split[earliest[u]] = Split::kTrain;
        fmt::print(stderr,
                   "warning: moved earliest interaction of user {} to train\n",
                   dataset.users.original(u));
      }
  }

  int no_test = 0;
  std::vector<char> has_test(dataset.num_users(), 0);
  for (std::size_t r = 0; r < rows.size(); ++r)
    if (dataset.split[r] == Split::kTest) has_test[rows[r].user] = 1;
  for (std::int32_t u = 0; u < dataset.num_users(); ++u)
    if (!has_test[u]) ++no_test;
  if (no_test > 0)
    fmt::print(stderr,
               "warning: {} users have no test interactions and are excluded "
               "from accuracy metrics\n",
               no_test);
}

}  // namespace

Dataset assemble_dataset(const IngestConfig& config, const RawDataset& raw,
                         std::vector<RawInteraction> filtered) {
  Dataset dataset;

  for (const RawInteraction& row : filtered) {
    UserId u = dataset.users.find(row.user)
                   ? *dataset.users.find(row.user)
                   : dataset.users.add(row.user);
    ItemId v = dataset.items.find(row.item)
                   ? *dataset.items.find(row.item)
                   : dataset.items.add(row.item);
    dataset.interactions.push_back(
        Interaction{u, v, row.rating, row.timestamp});
  }

  if (!raw.category_names.empty() || !raw.item_ids.empty()) {
    std::unordered_map<std::string, std::int32_t> raw_item_ix;
    for (std::size_t i = 0; i < raw.item_ids.size(); ++i)
      raw_item_ix.emplace(raw.item_ids[i], static_cast<std::int32_t>(i));
    std::unordered_map<std::string, CategoryId> cat_ix;
    dataset.catalog.names = raw.category_names;
    for (std::size_t c = 0; c < raw.category_names.size(); ++c)
      cat_ix.emplace(raw.category_names[c], static_cast<CategoryId>(c));

    dataset.catalog.members.resize(dataset.num_items());
    for (std::int32_t v = 0; v < dataset.num_items(); ++v) {
      const std::string& original = dataset.items.original(v);
      auto it = raw_item_ix.find(original);
      if (it == raw_item_ix.end())
        throw std::runtime_error(
            fmt::format("item '{}' has no category metadata", original));
      std::vector<CategoryId>& members = dataset.catalog.members[v];
      for (const std::string& name : raw.item_categories[it->second])
        members.push_back(cat_ix.at(name));
      std::sort(members.begin(), members.end());
    }
    dataset.catalog.validate();
  }

  if (!raw.attribute_names.empty()) {
    std::unordered_map<std::string, std::int32_t> raw_user_ix;
    for (std::size_t i = 0; i < raw.user_ids.size(); ++i)
      raw_user_ix.emplace(raw.user_ids[i], static_cast<std::int32_t>(i));
    for (std::size_t a = 0; a < raw.attribute_names.size(); ++a) {
      Attribute attr;
      attr.name = raw.attribute_names[a];
      attr.value_of_user.resize(dataset.num_users());
      std::unordered_map<std::string, std::int32_t> class_ix;
      for (std::int32_t u = 0; u < dataset.num_users(); ++u) {
        const std::string& original = dataset.users.original(u);
        auto it = raw_user_ix.find(original);
        if (it == raw_user_ix.end())
          throw std::runtime_error(fmt::format(
              "user '{}' is missing from the attribute file", original));
        const std::string& value = raw.user_values[it->second][a];
        auto [cit, inserted] = class_ix.try_emplace(
            value, static_cast<std::int32_t>(attr.classes.size()));
        if (inserted) attr.classes.push_back(value);
        attr.value_of_user[u] = cit->second;
      }
      dataset.attributes.attributes.push_back(std::move(attr));
    }
  }

  apply_split(dataset, config);
  dataset.finalize();
  dataset.validate();
  return dataset;
}

Dataset ingest(const IngestConfig& config) {
  config.validate();
  std::vector<RawInteraction> rows = parse_interactions(config);
  RawDataset raw;
  load_user_attributes(config, raw);
  load_item_categories(config, raw);

  if (!raw.item_ids.empty()) {
    std::unordered_set<std::string> empty_items;
    for (std::size_t i = 0; i < raw.item_ids.size(); ++i)
      if (raw.item_categories[i].empty()) empty_items.insert(raw.item_ids[i]);
    if (!empty_items.empty()) {
      std::size_t before = rows.size();
      std::erase_if(rows, [&](const RawInteraction& r) {
        return empty_items.count(r.item) > 0;
      });
      fmt::print(stderr,
                 "warning: dropped {} items with no categories ({} "
                 "interactions)\n",
                 empty_items.size(), before - rows.size());
    }
  }

  std::vector<RawInteraction> filtered = k_core_filter(std::move(rows),
                                                       config.k_core);
  return assemble_dataset(config, raw, std::move(filtered));
}

void write_dataset_bundle(const Dataset& dataset, const IngestConfig& config,
                          const std::string& directory) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);

  std::string interactions;
  interactions += "user\titem\trating\ttimestamp\tsplit\n";
  for (std::size_t r = 0; r < dataset.interactions.size(); ++r) {
    const Interaction& row = dataset.interactions[r];
    interactions += fmt::format(
        "{}\t{}\t{}\t{}\t{}\n", dataset.users.original(row.user),
        dataset.items.original(row.item), row.rating, row.timestamp,
        dataset.split[r] == Split::kTrain ? "train" : "test");
  }
  write_file((fs::path(directory) / "interactions.tsv").string(), interactions);

  std::string users = "user";
  for (const Attribute& attr : dataset.attributes.attributes)
    users += "\t" + attr.name;
  users += "\n";
  for (std::int32_t u = 0; u < dataset.num_users(); ++u) {
    users += dataset.users.original(u);
    for (const Attribute& attr : dataset.attributes.attributes)
      users += "\t" + attr.classes[attr.value_of_user[u]];
    users += "\n";
  }
  write_file((fs::path(directory) / "users.tsv").string(), users);

  std::string items = "item\tcategories\n";
  for (std::int32_t v = 0; v < dataset.num_items(); ++v) {
    items += dataset.items.original(v);
    items += "\t";
    const auto& members = dataset.catalog.members[v];
    for (std::size_t c = 0; c < members.size(); ++c) {
      if (c > 0) items += "|";
      items += dataset.catalog.names[members[c]];
    }
    items += "\n";
  }
  write_file((fs::path(directory) / "item_categories.tsv").string(), items);

  json manifest;
  manifest["format"] = "dataset-bundle-v1";
  manifest["counts"]["users"] = dataset.num_users();
  manifest["counts"]["items"] = dataset.num_items();
  manifest["counts"]["interactions"] = dataset.interactions.size();
  manifest["counts"]["categories"] = dataset.catalog.num_categories();
  manifest["categories"] = dataset.catalog.names;
  json attrs = json::array();
  for (const Attribute& attr : dataset.attributes.attributes) {
    json a;
    a["name"] = attr.name;
    a["classes"] = attr.classes;
    attrs.push_back(a);
  }
  manifest["attributes"] = attrs;
  manifest["split"]["strategy"] = config.split == SplitStrategy::kTemporalPerUser
                                      ? "temporal-per-user"
                                      : "temporal-global";
  manifest["split"]["train_fraction"] = config.train_fraction;
  manifest["k_core"] = config.k_core;
  manifest["hashes"]["interactions.tsv"] =
      file_hash((fs::path(directory) / "interactions.tsv").string());
  manifest["hashes"]["users.tsv"] =
      file_hash((fs::path(directory) / "users.tsv").string());
  manifest["hashes"]["item_categories.tsv"] =
      file_hash((fs::path(directory) / "item_categories.tsv").string());
  write_file((fs::path(directory) / "manifest.json").string(),
             manifest.dump(2) + "\n");
}

Dataset read_dataset_bundle(const std::string& directory) {
  namespace fs = std::filesystem;
  Dataset dataset;

  json manifest =
      json::parse(read_file((fs::path(directory) / "manifest.json").string()));
  dataset.catalog.names =
      manifest.at("categories").get<std::vector<std::string>>();
  std::unordered_map<std::string, CategoryId> cat_ix;
  for (std::size_t c = 0; c < dataset.catalog.names.size(); ++c)
    cat_ix.emplace(dataset.catalog.names[c], static_cast<CategoryId>(c));

  std::vector<std::string> lines =
      read_lines((fs::path(directory) / "interactions.tsv").string());
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    std::vector<std::string> f = split(lines[i], '\t');
    if (f.size() != 5)
      throw std::runtime_error(
          fmt::format("interactions.tsv line {}: expected 5 fields", i + 1));
    UserId u = dataset.users.find(f[0]) ? *dataset.users.find(f[0])
                                        : dataset.users.add(f[0]);
    ItemId v = dataset.items.find(f[1]) ? *dataset.items.find(f[1])
                                        : dataset.items.add(f[1]);
    dataset.interactions.push_back(
        Interaction{u, v, parse_double(f[2]), parse_int(f[3])});
    dataset.split.push_back(f[4] == "train" ? Split::kTrain : Split::kTest);
  }

  lines = read_lines((fs::path(directory) / "item_categories.tsv").string());
  dataset.catalog.members.resize(dataset.num_items());
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    std::vector<std::string> f = split(lines[i], '\t');
    if (f.size() != 2)
      throw std::runtime_error(fmt::format(
          "item_categories.tsv line {}: expected 2 fields", i + 1));
    auto dense = dataset.items.find(f[0]);
    if (!dense) continue;  // item fell outside the interaction set
    std::vector<CategoryId>& members = dataset.catalog.members[*dense];
    for (const std::string& name : split(f[1], '|'))
      members.push_back(cat_ix.at(name));
    std::sort(members.begin(), members.end());
  }
  dataset.catalog.validate();

  lines = read_lines((fs::path(directory) / "users.tsv").string());
  if (!lines.empty()) {
    std::vector<std::string> header = split(lines[0], '\t');
    std::vector<json> schema =
        manifest.at("attributes").get<std::vector<json>>();
    for (std::size_t a = 1; a < header.size(); ++a) {
      Attribute attr;
      attr.name = header[a];
      for (const json& s : schema)
        if (s.at("name") == attr.name)
          attr.classes = s.at("classes").get<std::vector<std::string>>();
      std::unordered_map<std::string, std::int32_t> class_ix;
      for (std::size_t c = 0; c < attr.classes.size(); ++c)
        class_ix.emplace(attr.classes[c], static_cast<std::int32_t>(c));
      attr.value_of_user.assign(dataset.num_users(), -1);
      for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        std::vector<std::string> f = split(lines[i], '\t');
        auto dense = dataset.users.find(f[0]);
        if (!dense) continue;
        attr.value_of_user[*dense] = class_ix.at(f.at(a));
      }
      dataset.attributes.attributes.push_back(std::move(attr));
    }
  }

  dataset.finalize();
  dataset.validate();
  return dataset;
}

}  // namespace fairrec
