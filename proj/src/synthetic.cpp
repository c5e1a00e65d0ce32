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

#include "fairrec/synthetic.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "fairrec/io.hpp"
#include "fairrec/rng.hpp"

namespace fairrec {
namespace {

constexpr int kNumGenres = 18;
constexpr const char* kGenres[kNumGenres] = {
    "Action",    "Adventure", "Animation", "Children's", "Comedy",
    "Crime",     "Documentary", "Drama",   "Fantasy",    "Film-Noir",
    "Horror",    "Musical",   "Mystery",   "Romance",    "Sci-Fi",
    "Thriller",  "War",       "Western"};

// Baseline catalog frequency of each genre.
constexpr double kGenreWeight[kNumGenres] = {
    2.0, 1.3, 0.6, 0.8, 2.5, 1.1, 0.5, 3.0, 0.7,
    0.4, 1.0, 0.5, 0.9, 1.6, 1.0, 1.8, 0.7, 0.5};

// 1 = leans to the first gender class, -1 to the second.
constexpr int kGenreGenderLean[kNumGenres] = {
    1, 1, -1, -1, -1, 1, -1, -1, -1, 1, 1, -1, -1, -1, 1, 1, 1, 1};

constexpr int kNumOccupations = 21;
constexpr const char* kOccupations[kNumOccupations] = {
    "administrator", "artist",     "doctor",    "educator",   "engineer",
    "entertainment", "executive",  "healthcare", "homemaker", "lawyer",
    "librarian",     "marketing",  "none",      "other",      "programmer",
    "retired",       "salesman",   "scientist", "student",    "technician",
    "writer"};
constexpr double kOccupationWeight[kNumOccupations] = {
    1.2, 0.6, 0.3, 1.5, 1.2, 0.4, 0.5, 0.3, 0.2, 0.3, 0.8,
    0.5, 0.2, 1.6, 1.0, 0.3, 0.3, 0.5, 3.0, 0.5, 0.7};

constexpr int kNumAgeBands = 7;
constexpr int kAgeBandLow[kNumAgeBands] = {7, 18, 25, 35, 45, 50, 56};
constexpr int kAgeBandHigh[kNumAgeBands] = {17, 24, 34, 44, 49, 55, 73};
constexpr double kAgeBandWeight[kNumAgeBands] = {0.04, 0.16, 0.34, 0.2,
                                                 0.09, 0.07, 0.1};

constexpr std::int64_t kTimestampLow = 874000000;
constexpr std::int64_t kTimestampHigh = 893000000;

struct SyntheticUser {
  std::string gender;  // "M" or "F"
  int age = 0;
  int age_band = 0;
  int occupation = 0;
  std::string zip;
};

struct SyntheticItem {
  std::vector<int> genres;  // sorted genre indices
  double popularity = 1.0;
};

struct Edge {
  std::int32_t user;
  std::int32_t item;  // index into the combined core+periphery item table
  int rating;
  std::int64_t timestamp;
};

double genre_multiplier(const SyntheticConfig& config, const SyntheticUser& u,
                        int genre) {
  double m = 1.0;
  bool male_lean = kGenreGenderLean[genre] > 0;
  bool is_first_class = u.gender == "M";
  m *= (male_lean == is_first_class) ? config.gender_strength
                                     : 1.0 / config.gender_strength;
  int b = u.age_band;
  if (genre == (3 * b) % kNumGenres || genre == (3 * b + 1) % kNumGenres ||
      genre == (3 * b + 5) % kNumGenres)
    m *= config.age_strength;
  if (genre == u.occupation % kNumGenres ||
      genre == (u.occupation + 7) % kNumGenres)
    m *= config.occupation_strength;
  return m;
}

double item_affinity(const SyntheticConfig& config, const SyntheticUser& u,
                     const SyntheticItem& item) {
  double m = 0.0;
  for (int g : item.genres) m += genre_multiplier(config, u, g);
  return m / static_cast<double>(item.genres.size());
}

int affinity_rating(double multiplier, Rng& rng) {
  double r = 3.4 + 0.8 * std::tanh(std::log(multiplier)) + rng.normal(0.0, 0.7);
  return std::clamp(static_cast<int>(std::lround(r)), 1, 5);
}

std::vector<int> sample_genres(Rng& rng) {
  std::vector<double> weights(kGenreWeight, kGenreWeight + kNumGenres);
  std::vector<int> genres;
  genres.push_back(static_cast<int>(rng.weighted_index(weights)));
  if (rng.uniform() < 0.45) {
    int g;
    do {
      g = static_cast<int>(rng.weighted_index(weights));
    } while (g == genres[0]);
    genres.push_back(g);
  }
  if (genres.size() == 2 && rng.uniform() < 0.3) {
    int g;
    do {
      g = static_cast<int>(rng.weighted_index(weights));
    } while (g == genres[0] || g == genres[1]);
    genres.push_back(g);
  }
  std::sort(genres.begin(), genres.end());
  return genres;
}

std::vector<std::int64_t> user_degree_targets(const SyntheticConfig& config,
                                              Rng& rng) {
  const std::int64_t n = config.num_users;
  const std::int64_t floor_deg = config.min_user_degree;
  const std::int64_t cap = config.num_core_items;
  const std::int64_t extra_total = config.num_core_interactions - n * floor_deg;

  std::vector<double> raw(n);
  double raw_sum = 0.0;
  for (std::int64_t u = 0; u < n; ++u) {
    raw[u] = std::exp(rng.normal(0.0, 1.0));
    raw_sum += raw[u];
  }
  std::vector<std::int64_t> deg(n);
  std::int64_t assigned = 0;
  for (std::int64_t u = 0; u < n; ++u) {
    std::int64_t extra = static_cast<std::int64_t>(
        std::floor(raw[u] / raw_sum * static_cast<double>(extra_total)));
    deg[u] = std::min(floor_deg + extra, cap);
    assigned += deg[u];
  }
  std::int64_t diff = config.num_core_interactions - assigned;
  std::int64_t u = 0;
  while (diff != 0) {
    if (diff > 0 && deg[u] < cap) {
      ++deg[u];
      --diff;
    } else if (diff < 0 && deg[u] > floor_deg) {
      --deg[u];
      ++diff;
    }
    u = (u + 1) % n;
  }
  return deg;
}

}  // namespace

void SyntheticConfig::validate() const {
  if (num_users < 2 || num_core_items < 1)
    throw std::invalid_argument("need >= 2 users and >= 1 core item");
  if (min_user_degree < min_item_degree)
    throw std::invalid_argument(
        "min_user_degree must be >= min_item_degree for a stable core");
  if (num_core_interactions <
      static_cast<std::int64_t>(num_users) * min_user_degree)
    throw std::invalid_argument("core interactions below the user-degree floor");
  if (num_core_interactions <
      static_cast<std::int64_t>(num_core_items) * min_item_degree)
    throw std::invalid_argument("core interactions below the item-degree floor");
  if (num_core_interactions >
      static_cast<std::int64_t>(num_users) * num_core_items)
    throw std::invalid_argument("more core interactions than distinct pairs");
  if (num_periphery_items > 0) {
    if (num_periphery_interactions < num_periphery_items)
      throw std::invalid_argument("each periphery item needs >= 1 interaction");
    if (num_periphery_interactions >
        static_cast<std::int64_t>(num_periphery_items) * (min_item_degree - 1))
      throw std::invalid_argument(
          "periphery items would reach the core degree threshold");
  } else if (num_periphery_interactions != 0) {
    throw std::invalid_argument("periphery interactions without periphery items");
  }
}

SyntheticConfig SyntheticConfig::small() {
  SyntheticConfig config;
  config.num_users = 120;
  config.num_core_items = 160;
  config.num_periphery_items = 30;
  config.num_core_interactions = 4800;
  config.num_periphery_interactions = 60;
  config.seed = 11;
  return config;
}

void generate_ml100k_files(const SyntheticConfig& config,
                           const std::string& directory) {
  config.validate();
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  Rng rng(config.seed);

  const std::int32_t nu = config.num_users;
  const std::int32_t n_core = config.num_core_items;
  const std::int32_t n_total = n_core + config.num_periphery_items;

  std::vector<SyntheticUser> users(nu);
  for (std::int32_t u = 0; u < nu; ++u) {
    SyntheticUser& su = users[u];
    su.gender = rng.uniform() < 0.7 ? "M" : "F";
    if (u == 0) su.gender = "M";
    if (u == 1) su.gender = "F";
    std::vector<double> age_w(kAgeBandWeight, kAgeBandWeight + kNumAgeBands);
    su.age_band = static_cast<int>(rng.weighted_index(age_w));
    su.age = kAgeBandLow[su.age_band] +
             static_cast<int>(rng.uniform_index(
                 kAgeBandHigh[su.age_band] - kAgeBandLow[su.age_band] + 1));
    std::vector<double> occ_w(kOccupationWeight,
                              kOccupationWeight + kNumOccupations);
    su.occupation = static_cast<int>(rng.weighted_index(occ_w));
    su.zip = fmt::format("{:05}", rng.uniform_index(100000));
  }

  std::vector<SyntheticItem> items(n_total);
  for (std::int32_t v = 0; v < n_total; ++v) {
    if (v < kNumGenres && v < n_core)
      items[v].genres = {static_cast<int>(v)};  // every genre occurs in the core
    else
      items[v].genres = sample_genres(rng);
  }
  std::vector<std::int32_t> pop_rank(n_total);
  for (std::int32_t v = 0; v < n_total; ++v) pop_rank[v] = v;
  rng.shuffle(pop_rank);
  for (std::int32_t v = 0; v < n_total; ++v)
    items[v].popularity = std::pow(static_cast<double>(pop_rank[v] + 1),
                                   -config.popularity_exponent);

  // Core edges: weighted sampling without replacement per user.
  std::vector<std::int64_t> degree = user_degree_targets(config, rng);
  std::vector<std::vector<char>> has_edge(nu, std::vector<char>(n_core, 0));
  std::vector<std::int32_t> item_degree(n_core, 0);
  std::vector<Edge> edges;
  edges.reserve(config.num_core_interactions +
                config.num_periphery_interactions);

  std::vector<std::pair<double, std::int32_t>> keys(n_core);
  for (std::int32_t u = 0; u < nu; ++u) {
    for (std::int32_t v = 0; v < n_core; ++v) {
      double weight = items[v].popularity * item_affinity(config, users[u],
                                                          items[v]);
      double draw = 1.0 - rng.uniform();  // (0, 1]
      keys[v] = {std::log(draw) / weight, v};
    }
    std::int64_t d = degree[u];
    std::partial_sort(keys.begin(), keys.begin() + d, keys.end(),
                      [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::int64_t i = 0; i < d; ++i) {
      std::int32_t v = keys[i].second;
      has_edge[u][v] = 1;
      ++item_degree[v];
      Edge e;
      e.user = u;
      e.item = v;
      e.rating = affinity_rating(item_affinity(config, users[u], items[v]), rng);
      e.timestamp = kTimestampLow + static_cast<std::int64_t>(rng.uniform_index(
                                        kTimestampHigh - kTimestampLow));
      edges.push_back(e);
    }
  }

  // Repair pass: lift deficient core items to the degree floor by swapping
  // one edge of an over-provisioned item, keeping user degrees intact.
  std::vector<std::vector<std::int32_t>> edge_ix_of_user(nu);
  for (std::size_t e = 0; e < edges.size(); ++e)
    edge_ix_of_user[edges[e].user].push_back(static_cast<std::int32_t>(e));
  for (std::int32_t v = 0; v < n_core; ++v) {
    while (item_degree[v] < config.min_item_degree) {
      std::int32_t best_user = -1, best_edge = -1;
      double best_aff = -1.0;
      for (std::int32_t u = 0; u < nu; ++u) {
        if (has_edge[u][v]) continue;
        std::int32_t donor = -1;
        std::int32_t donor_deg = config.min_item_degree;
        for (std::int32_t e : edge_ix_of_user[u]) {
          std::int32_t w = edges[e].item;
          if (item_degree[w] > donor_deg) {
            donor = e;
            donor_deg = item_degree[w];
          }
        }
        if (donor < 0) continue;
        double aff = item_affinity(config, users[u], items[v]);
        if (aff > best_aff) {
          best_aff = aff;
          best_user = u;
          best_edge = donor;
        }
      }
      if (best_user < 0)
        throw std::runtime_error("cannot satisfy the core item degree floor");
      Edge& e = edges[best_edge];
      --item_degree[e.item];
      has_edge[best_user][e.item] = 0;
      e.item = v;
      e.rating = affinity_rating(item_affinity(config, users[best_user], items[v]),
                                 rng);
      has_edge[best_user][v] = 1;
      ++item_degree[v];
    }
  }

  // Periphery edges: degree 1 plus round-robin increments, always below the
  // core threshold, so the 5-core filter removes every periphery item.
  if (config.num_periphery_items > 0) {
    std::vector<std::int32_t> pdeg(config.num_periphery_items, 1);
    std::int64_t used = config.num_periphery_items;
    std::int32_t p = 0;
    while (used < config.num_periphery_interactions) {
      if (pdeg[p] < config.min_item_degree - 1) {
        ++pdeg[p];
        ++used;
      }
      p = (p + 1) % config.num_periphery_items;
    }
    for (std::int32_t i = 0; i < config.num_periphery_items; ++i) {
      std::int32_t v = n_core + i;
      std::vector<char> taken(nu, 0);
      for (std::int32_t j = 0; j < pdeg[i]; ++j) {
        std::int32_t u;
        do {
          u = static_cast<std::int32_t>(rng.uniform_index(nu));
        } while (taken[u]);
        taken[u] = 1;
        Edge e;
        e.user = u;
        e.item = v;
        e.rating = affinity_rating(item_affinity(config, users[u], items[v]), rng);
        e.timestamp = kTimestampLow + static_cast<std::int64_t>(rng.uniform_index(
                                          kTimestampHigh - kTimestampLow));
        edges.push_back(e);
      }
    }
  }

  // Original ids: users 1..nu in order; item ids are a seeded permutation so
  // id order carries no popularity signal.
  std::vector<std::int32_t> item_id(n_total);
  for (std::int32_t v = 0; v < n_total; ++v) item_id[v] = v;
  rng.shuffle(item_id);
  for (std::int32_t v = 0; v < n_total; ++v) ++item_id[v];  // 1-based

  std::vector<std::int32_t> row_order(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e)
    row_order[e] = static_cast<std::int32_t>(e);
  rng.shuffle(row_order);

  std::string u_data;
  u_data.reserve(edges.size() * 24);
  for (std::int32_t e : row_order) {
    const Edge& edge = edges[e];
    u_data += fmt::format("{}\t{}\t{}\t{}\n", edge.user + 1,
                          item_id[edge.item], edge.rating, edge.timestamp);
  }
  write_file((std::filesystem::path(directory) / "u.data").string(), u_data);

  std::vector<std::int32_t> by_id(n_total);
  for (std::int32_t v = 0; v < n_total; ++v) by_id[item_id[v] - 1] = v;
  std::string u_item;
  for (std::int32_t id = 1; id <= n_total; ++id) {
    std::int32_t v = by_id[id - 1];
    u_item += fmt::format("{}|Item {} ({})|01-Jan-1996||http://example.org/item/{}",
                          id, id, 1996, id);
    u_item += "|0";  // the historical "unknown" flag column
    for (int g = 0; g < kNumGenres; ++g) {
      bool has = std::binary_search(items[v].genres.begin(),
                                    items[v].genres.end(), g);
      u_item += has ? "|1" : "|0";
    }
    u_item += "\n";
  }
  write_file((std::filesystem::path(directory) / "u.item").string(), u_item);

  std::string u_user;
  for (std::int32_t u = 0; u < nu; ++u)
    u_user += fmt::format("{}|{}|{}|{}|{}\n", u + 1, users[u].age,
                          users[u].gender, kOccupations[users[u].occupation],
                          users[u].zip);
  write_file((std::filesystem::path(directory) / "u.user").string(), u_user);

  std::string u_genre = "unknown|0\n";
  for (int g = 0; g < kNumGenres; ++g)
    u_genre += fmt::format("{}|{}\n", kGenres[g], g + 1);
  write_file((std::filesystem::path(directory) / "u.genre").string(), u_genre);
}

std::string ensure_ml100k_dir(const std::string& cache_dir,
                              const SyntheticConfig& config) {
  const char* override_dir = std::getenv("FAIRREC_ML100K_DIR");
  if (override_dir != nullptr && override_dir[0] != '\0')
    return std::string(override_dir);

  namespace fs = std::filesystem;
  std::string tag = fmt::format(
      "{}-{}-{}-{}-{}-{}-{}-{}-{}-{}-{}", config.num_users,
      config.num_core_items, config.num_periphery_items,
      config.num_core_interactions, config.num_periphery_interactions,
      config.min_user_degree, config.min_item_degree, config.seed,
      config.gender_strength, config.age_strength, config.occupation_strength);
  fs::path marker = fs::path(cache_dir) / fmt::format(".synthetic-{}", tag);
  if (!fs::exists(marker)) {
    generate_ml100k_files(config, cache_dir);
    write_file(marker.string(), tag + "\n");
  }
  return cache_dir;
}

}  // namespace fairrec
