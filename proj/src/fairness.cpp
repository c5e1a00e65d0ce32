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

#include "fairrec/fairness.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <unordered_map>

#include "fairrec/io.hpp"
#include "fairrec/parallel.hpp"

namespace fairrec {

using nlohmann::json;

double distribution_sum(const CategoryDistribution& d) {
  double s = 0.0;
  for (double x : d) s += x;
  return s;
}

void smooth_and_normalize(CategoryDistribution& d, double epsilon) {
  if (epsilon <= 0.0) throw std::invalid_argument("epsilon must be positive");
  double total = 0.0;
  for (double& x : d) {
    x += epsilon;
    total += x;
  }
  for (double& x : d) x /= total;
}

void RerankConfig::validate() const {
  if (beta < 0.0 || beta > 1.0)
    throw std::invalid_argument(fmt::format("beta must lie in [0,1], got {}", beta));
  if (gamma < 0.0 || gamma > 1.0)
    throw std::invalid_argument(fmt::format("gamma must lie in [0,1], got {}", gamma));
  if (alpha <= 0.0 || alpha >= 1.0)
    throw std::invalid_argument(fmt::format("alpha must lie in (0,1), got {}", alpha));
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (top_n != 0 && top_n < k)
    throw std::invalid_argument(
        fmt::format("top_n ({}) must be >= k ({})", top_n, k));
  if (profile_smoothing <= 0.0)
    throw std::invalid_argument("profile_smoothing must be positive");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

const CategoryDistribution& CounterfactualProfile::for_user(UserId u) const {
  if (u < 0 || static_cast<std::size_t>(u) >= class_of_user.size() ||
      class_of_user[u] < 0)
    throw std::out_of_range(
        fmt::format("user {} is not covered by the '{}' profile", u, attribute));
  return o_of_class[class_of_user[u]];
}

void CounterfactualProfile::validate() const {
  if (classes.empty() || classes.size() != o_of_class.size())
    throw std::runtime_error("profile classes and distributions disagree");
  std::size_t dim = o_of_class.front().size();
  for (const CategoryDistribution& o : o_of_class) {
    if (o.size() != dim)
      throw std::runtime_error("profile distributions have mixed dimensions");
    double sum = distribution_sum(o);
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::runtime_error(
          fmt::format("profile distribution sums to {}", sum));
    for (double x : o)
      if (x <= 0.0)
        throw std::runtime_error("profile distribution is not strictly positive");
  }
  for (std::int32_t c : class_of_user)
    if (c < -1 || c >= static_cast<std::int32_t>(classes.size()))
      throw std::runtime_error("profile class index out of range");
}

CategoryDistribution history_distribution(UserId user, const Dataset& dataset,
                                          TimestampWeighting weighting) {
  if (user < 0 || user >= dataset.num_users())
    throw std::out_of_range(fmt::format("user {} out of range", user));
  const std::vector<std::int32_t>& rows = dataset.train_rows_of_user[user];
  if (rows.empty())
    throw std::runtime_error(fmt::format(
        "user {} has no train interactions", dataset.users.original(user)));

  std::vector<double> weights(rows.size(), 1.0);
  if (weighting == TimestampWeighting::kRaw) {
    for (std::size_t i = 0; i < rows.size(); ++i)
      weights[i] =
          static_cast<double>(dataset.interactions[rows[i]].timestamp);
  } else {
    std::int64_t lo = dataset.interactions[rows[0]].timestamp;
    std::int64_t hi = lo;
    for (std::int32_t r : rows) {
      lo = std::min(lo, dataset.interactions[r].timestamp);
      hi = std::max(hi, dataset.interactions[r].timestamp);
    }
    constexpr double kFloor = 0.01;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::int64_t t = dataset.interactions[rows[i]].timestamp;
      weights[i] = hi == lo ? 1.0
                            : kFloor + (1.0 - kFloor) *
                                           static_cast<double>(t - lo) /
                                           static_cast<double>(hi - lo);
    }
  }

  double total = 0.0;
  for (double w : weights) total += w;
  if (total <= 0.0) {
    fmt::print(stderr,
               "warning: user {} has all-zero timestamp weights; using "
               "uniform weights\n",
               dataset.users.original(user));
    std::fill(weights.begin(), weights.end(), 1.0);
    total = static_cast<double>(weights.size());
  }

  CategoryDistribution m(dataset.catalog.num_categories(), 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ItemId v = dataset.interactions[rows[i]].item;
    for (auto [c, frac] : item_category_fractions(v, dataset.catalog))
      m[c] += frac * weights[i];
  }
  for (double& x : m) x /= total;
  return m;
}

CounterfactualProfile build_counterfactual_profile(const Dataset& dataset,
                                                   const std::string& attribute,
                                                   const RerankConfig& config) {
  config.validate();
  const Attribute& attr = dataset.attributes.get(attribute);
  if (attr.num_classes() < 2)
    throw std::runtime_error(fmt::format(
        "attribute '{}' has fewer than two classes", attribute));

  const std::size_t num_categories = dataset.catalog.num_categories();
  const std::int32_t nu = dataset.num_users();

  std::vector<CategoryDistribution> m_of_user(nu);
  parallel_for(static_cast<std::size_t>(nu), config.threads, [&](std::size_t u) {
    m_of_user[u] = history_distribution(static_cast<UserId>(u), dataset,
                                        config.timestamp_weighting);
  });

  CategoryDistribution total_sum(num_categories, 0.0);
  std::vector<CategoryDistribution> class_sum(
      attr.num_classes(), CategoryDistribution(num_categories, 0.0));
  std::vector<std::int64_t> class_count(attr.num_classes(), 0);
  for (std::int32_t u = 0; u < nu; ++u) {
    std::int32_t s = attr.value_of_user[u];
    ++class_count[s];
    for (std::size_t c = 0; c < num_categories; ++c) {
      total_sum[c] += m_of_user[u][c];
      class_sum[s][c] += m_of_user[u][c];
    }
  }

  CounterfactualProfile profile;
  profile.attribute = attribute;
  profile.classes = attr.classes;
  profile.class_of_user = attr.value_of_user;
  profile.o_of_class.resize(attr.num_classes());
  for (std::int32_t s = 0; s < attr.num_classes(); ++s) {
    std::int64_t complement = nu - class_count[s];
    if (complement == 0)
      throw std::runtime_error(fmt::format(
          "attribute '{}' class '{}' covers every user; no complement",
          attribute, attr.classes[s]));
    CategoryDistribution o(num_categories, 0.0);
    for (std::size_t c = 0; c < num_categories; ++c)
      o[c] = (total_sum[c] - class_sum[s][c]) / static_cast<double>(complement);
    smooth_and_normalize(o, config.profile_smoothing);
    profile.o_of_class[s] = std::move(o);
  }
  profile.validate();
  return profile;
}

CategoryDistribution recommended_category_proportion(
    const std::vector<ItemId>& items, const CategoryCatalog& catalog,
    double gamma) {
  if (items.empty())
    throw std::invalid_argument("cannot take proportions of an empty list");
  CategoryDistribution r(catalog.num_categories(), 0.0);
  double total = 0.0;
  for (std::size_t j = 0; j < items.size(); ++j) {
    double w = std::pow(static_cast<double>(j + 1), -gamma);
    for (auto [c, frac] : item_category_fractions(items[j], catalog))
      r[c] += frac * w;
    total += w;
  }
  for (double& x : r) x /= total;
  return r;
}

double kl_divergence(const CategoryDistribution& o,
                     const CategoryDistribution& r, double alpha) {
  if (o.size() != r.size())
    throw std::invalid_argument(fmt::format(
        "distribution dimensions differ: {} vs {}", o.size(), r.size()));
  if (alpha <= 0.0 || alpha >= 1.0)
    throw std::invalid_argument("alpha must lie in (0,1)");
  double d = 0.0;
  for (std::size_t c = 0; c < o.size(); ++c) {
    if (o[c] <= 0.0) continue;
    double mixed = (1.0 - alpha) * r[c] + alpha * o[c];
    d += o[c] * std::log(o[c] / mixed);
  }
  return d;
}

double objective_value(const std::vector<ItemId>& items,
                       const std::vector<double>& scores_of_items,
                       const CategoryDistribution& o,
                       const CategoryCatalog& catalog,
                       const RerankConfig& config) {
  if (items.size() != scores_of_items.size())
    throw std::invalid_argument("items and scores differ in length");
  if (o.size() != catalog.num_categories())
    throw std::invalid_argument("profile does not match catalog");

  double rel = 0.0;
  for (double s : scores_of_items) rel += s;

  CategoryDistribution weighted(o.size(), 0.0);
  double total_weight = 0.0;
  for (std::size_t j = 0; j < items.size(); ++j) {
    double w = std::pow(static_cast<double>(j + 1), -config.gamma);
    for (auto [c, frac] : item_category_fractions(items[j], catalog))
      weighted[c] += w * frac;
    total_weight += w;
  }

  double fair = 0.0;
  for (std::size_t c = 0; c < o.size(); ++c) {
    if (o[c] <= 0.0) continue;
    double inner = (1.0 - config.alpha) * weighted[c] +
                   config.alpha * o[c] * total_weight;
    fair += o[c] * std::log(inner);
  }
  return (1.0 - config.beta) * rel + config.beta * fair;
}

namespace {

struct CandidateState {
  ItemId item;
  double score;
  std::vector<std::pair<CategoryId, double>> fracs;
};

// Maps raw values to [0,1] over the pool; a constant pool maps to 0.5.
double minmax(double x, double lo, double hi) {
  if (hi <= lo) return 0.5;
  return (x - lo) / (hi - lo);
}

}  // namespace

RankedList greedy_rerank(UserId user, const std::vector<ScoredItem>& candidates,
                         const CounterfactualProfile& profile,
                         const CategoryCatalog& catalog,
                         const RerankConfig& config) {
  config.validate();
  const CategoryDistribution& o = profile.for_user(user);
  if (o.size() != catalog.num_categories())
    throw std::invalid_argument("profile does not match catalog");

  std::vector<CandidateState> pool;
  pool.reserve(candidates.size());
  std::size_t limit = config.top_n > 0
                          ? std::min<std::size_t>(candidates.size(),
                                                  static_cast<std::size_t>(config.top_n))
                          : candidates.size();
  for (std::size_t i = 0; i < limit; ++i)
    pool.push_back(CandidateState{candidates[i].item, candidates[i].score,
                                  item_category_fractions(candidates[i].item,
                                                          catalog)});

  RankedList out;
  out.user = user;
  if (pool.empty()) return out;
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(config.k),
                                              pool.size());
  out.items.reserve(k);

  double global_lo = pool[0].score, global_hi = pool[0].score;
  for (const CandidateState& cand : pool) {
    global_lo = std::min(global_lo, cand.score);
    global_hi = std::max(global_hi, cand.score);
  }

  const double alpha = config.alpha;
  const double beta = config.beta;
  std::vector<char> used(pool.size(), 0);
  CategoryDistribution acc(o.size(), 0.0);  // sum_j w_j * r~(c|v_j), chosen so far
  std::vector<double> a(o.size(), 0.0);     // acc + w * alpha * o
  std::vector<double> fair(pool.size(), 0.0);

  for (std::size_t t = 0; t < k; ++t) {
    const double w = std::pow(static_cast<double>(t + 1), -config.gamma);

    double fair_lo = 0.0, fair_hi = 0.0;
    bool fair_seen = false;
    if (beta > 0.0) {
      double base = 0.0;
      for (std::size_t c = 0; c < o.size(); ++c) {
        a[c] = acc[c] + w * alpha * o[c];
        base += o[c] * std::log(a[c]);
      }
      for (std::size_t i = 0; i < pool.size(); ++i) {
        if (used[i]) continue;
        double f = base;
        const double share = w * (1.0 - alpha);
        for (auto [c, frac] : pool[i].fracs)
          f += o[c] * (std::log(a[c] + share * frac) - std::log(a[c]));
        fair[i] = f;
        if (!fair_seen) {
          fair_lo = fair_hi = f;
          fair_seen = true;
        } else {
          fair_lo = std::min(fair_lo, f);
          fair_hi = std::max(fair_hi, f);
        }
      }
    }

    double score_lo = 0.0, score_hi = 0.0;
    if (config.normalization == Normalization::kPerStepMinMax) {
      bool seen = false;
      for (std::size_t i = 0; i < pool.size(); ++i) {
        if (used[i]) continue;
        if (!seen) {
          score_lo = score_hi = pool[i].score;
          seen = true;
        } else {
          score_lo = std::min(score_lo, pool[i].score);
          score_hi = std::max(score_hi, pool[i].score);
        }
      }
    } else {
      score_lo = global_lo;
      score_hi = global_hi;
    }

    std::size_t best = pool.size();
    double best_total = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (used[i]) continue;
      double total;
      if (beta <= 0.0) {
        total = pool[i].score;
      } else if (config.normalization == Normalization::kNone) {
        total = (1.0 - beta) * pool[i].score + beta * fair[i];
      } else {
        total = (1.0 - beta) * minmax(pool[i].score, score_lo, score_hi) +
                beta * minmax(fair[i], fair_lo, fair_hi);
      }
      if (best == pool.size() || total > best_total ||
          (total == best_total &&
           (pool[i].score > pool[best].score ||
            (pool[i].score == pool[best].score &&
             pool[i].item < pool[best].item)))) {
        best = i;
        best_total = total;
      }
    }

    used[best] = 1;
    out.items.push_back(pool[best].item);
    for (std::size_t c = 0; c < o.size(); ++c) acc[c] += w * alpha * o[c];
    for (auto [c, frac] : pool[best].fracs) acc[c] += w * (1.0 - alpha) * frac;
  }
  return out;
}

RankedList exhaustive_rerank(UserId user,
                             const std::vector<ScoredItem>& candidates,
                             const CounterfactualProfile& profile,
                             const CategoryCatalog& catalog,
                             const RerankConfig& config,
                             std::uint64_t budget) {
  config.validate();
  const CategoryDistribution& o = profile.for_user(user);

  std::vector<ScoredItem> pool(candidates);
  std::sort(pool.begin(), pool.end(), [](const ScoredItem& x, const ScoredItem& y) {
    if (x.score != y.score) return x.score > y.score;
    return x.item < y.item;
  });
  if (config.top_n > 0 && static_cast<std::size_t>(config.top_n) < pool.size())
    pool.resize(config.top_n);

  const std::size_t n = pool.size();
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(config.k), n);
  RankedList out;
  out.user = user;
  if (n == 0) return out;

  // The fairness term weights positions by j^-gamma, so the optimum is over
  // ordered arrangements: every k-combination in every order.
  double arrangements = 1.0;
  for (std::size_t i = 0; i < k; ++i)
    arrangements *= static_cast<double>(n - i);
  if (arrangements > static_cast<double>(budget))
    throw std::runtime_error(fmt::format(
        "exhaustive re-ranking needs {:.0f} evaluations, budget is {}",
        arrangements, budget));

  std::vector<std::size_t> ix(k);
  for (std::size_t i = 0; i < k; ++i) ix[i] = i;

  std::vector<std::size_t> perm(k);
  std::vector<ItemId> items(k);
  std::vector<double> scores(k);
  double best_value = 0.0;
  bool has_best = false;

  while (true) {
    perm = ix;
    do {
      for (std::size_t i = 0; i < k; ++i) {
        items[i] = pool[perm[i]].item;
        scores[i] = pool[perm[i]].score;
      }
      double value = objective_value(items, scores, o, catalog, config);
      if (!has_best || value > best_value) {
        best_value = value;
        out.items = items;
        has_best = true;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));

    std::size_t pos = k;
    while (pos > 0 && ix[pos - 1] == n - k + pos - 1) --pos;
    if (pos == 0) break;
    ++ix[pos - 1];
    for (std::size_t i = pos; i < k; ++i) ix[i] = ix[i - 1] + 1;
  }
  return out;
}

std::vector<RankedList> rerank_all(const ScoreSet& scores,
                                   const CounterfactualProfile& profile,
                                   const CategoryCatalog& catalog,
                                   const RerankConfig& config) {
  config.validate();
  std::vector<RankedList> slots(scores.candidates.size());
  parallel_for(scores.candidates.size(), config.threads, [&](std::size_t u) {
    if (scores.candidates[u].empty()) return;
    slots[u] = greedy_rerank(static_cast<UserId>(u), scores.candidates[u],
                             profile, catalog, config);
  });
  std::vector<RankedList> out;
  out.reserve(slots.size());
  for (RankedList& list : slots)
    if (!list.items.empty()) out.push_back(std::move(list));
  return out;
}

std::vector<RankedList> baseline_topk(const ScoreSet& scores, int k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  std::vector<RankedList> out;
  for (std::size_t u = 0; u < scores.candidates.size(); ++u) {
    const std::vector<ScoredItem>& list = scores.candidates[u];
    if (list.empty()) continue;
    RankedList ranked;
    ranked.user = static_cast<UserId>(u);
    std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k),
                                             list.size());
    ranked.items.reserve(take);
    for (std::size_t i = 0; i < take; ++i) ranked.items.push_back(list[i].item);
    out.push_back(std::move(ranked));
  }
  return out;
}

void save_profile(const CounterfactualProfile& profile,
                  const std::string& path) {
  json j;
  j["attribute"] = profile.attribute;
  j["classes"] = profile.classes;
  json dists = json::array();
  for (const CategoryDistribution& o : profile.o_of_class) dists.push_back(o);
  j["distributions"] = dists;
  j["class_of_user"] = profile.class_of_user;
  write_file(path, j.dump(2) + "\n");
}

CounterfactualProfile load_profile(const std::string& path) {
  json j = json::parse(read_file(path));
  CounterfactualProfile profile;
  profile.attribute = j.at("attribute").get<std::string>();
  profile.classes = j.at("classes").get<std::vector<std::string>>();
  for (const json& d : j.at("distributions"))
    profile.o_of_class.push_back(d.get<CategoryDistribution>());
  profile.class_of_user = j.at("class_of_user").get<std::vector<std::int32_t>>();
  profile.validate();
  return profile;
}

void write_reranked(const std::vector<RankedList>& lists,
                    const ScoreSet& scores, const Dataset& dataset,
                    const std::string& path) {
  std::string out = "user\trank\titem\traw_score\n";
  for (const RankedList& list : lists) {
    std::unordered_map<ItemId, double> score_of;
    score_of.reserve(scores.candidates[list.user].size());
    for (const ScoredItem& cand : scores.candidates[list.user])
      score_of.emplace(cand.item, cand.score);
    for (std::size_t rank = 0; rank < list.items.size(); ++rank) {
      auto it = score_of.find(list.items[rank]);
      if (it == score_of.end())
        throw std::runtime_error(
            fmt::format("item {} missing from the score set of user {}",
                        list.items[rank], list.user));
      out += fmt::format("{}\t{}\t{}\t{:.17g}\n",
                         dataset.users.original(list.user), rank + 1,
                         dataset.items.original(list.items[rank]), it->second);
    }
  }
  write_file(path, out);
}

}  // namespace fairrec
