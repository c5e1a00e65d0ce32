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

#include "fairrec/recommender.hpp"

#include <fmt/core.h>

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <unordered_map>

#include "fairrec/io.hpp"
#include "fairrec/parallel.hpp"
#include "fairrec/rng.hpp"

namespace fairrec {
namespace {

struct Cell {
  UserId user;
  ItemId item;
  double rating;
  double count;  // multiplicity of the (user, item) pair
};

// One cell per (user, item): latest-timestamp rating, pair multiplicity.
std::vector<Cell> train_cells(const Dataset& dataset) {
  struct Acc {
    double rating = 0.0;
    std::int64_t timestamp = std::numeric_limits<std::int64_t>::min();
    double count = 0.0;
  };
  std::unordered_map<std::int64_t, Acc> by_pair;
  by_pair.reserve(dataset.interactions.size());
  for (std::size_t r = 0; r < dataset.interactions.size(); ++r) {
    if (dataset.split[r] != Split::kTrain) continue;
    const Interaction& row = dataset.interactions[r];
    std::int64_t key = static_cast<std::int64_t>(row.user) *
                           static_cast<std::int64_t>(dataset.num_items()) +
                       row.item;
    Acc& acc = by_pair[key];
    acc.count += 1.0;
    if (row.timestamp >= acc.timestamp) {
      acc.timestamp = row.timestamp;
      acc.rating = row.rating;
    }
  }
  std::vector<Cell> cells;
  cells.reserve(by_pair.size());
  for (const auto& [key, acc] : by_pair) {
    UserId u = static_cast<UserId>(key / dataset.num_items());
    ItemId v = static_cast<ItemId>(key % dataset.num_items());
    cells.push_back(Cell{u, v, acc.rating, acc.count});
  }
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    if (a.user != b.user) return a.user < b.user;
    return a.item < b.item;
  });
  return cells;
}

void init_factors(Eigen::MatrixXd& m, Rng& rng, double scale) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.normal(0.0, scale);
}

}  // namespace

void TrainConfig::validate() const {
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (learning_rate <= 0.0)
    throw std::invalid_argument("learning_rate must be positive");
  if (regularization < 0.0)
    throw std::invalid_argument("regularization must be >= 0");
  if (confidence_weight <= 0.0)
    throw std::invalid_argument("confidence_weight must be positive");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

TrainResult train_biased_mf(const Dataset& dataset, const TrainConfig& config) {
  config.validate();
  std::vector<Cell> cells = train_cells(dataset);
  if (cells.empty()) throw std::runtime_error("no training interactions");

  const int d = config.dim;
  const double lr = config.learning_rate;
  const double lambda = config.regularization;

  TrainResult result;
  FactorModel& model = result.model;
  Rng rng(config.seed);
  model.user_factors.resize(dataset.num_users(), d);
  model.item_factors.resize(dataset.num_items(), d);
  init_factors(model.user_factors, rng, 0.01);
  init_factors(model.item_factors, rng, 0.01);
  model.user_bias = Eigen::VectorXd::Zero(dataset.num_users());
  model.item_bias = Eigen::VectorXd::Zero(dataset.num_items());
  double mean = 0.0;
  for (const Cell& c : cells) mean += c.rating;
  model.global_mean = mean / static_cast<double>(cells.size());

  std::vector<std::int32_t> order(cells.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    order[i] = static_cast<std::int32_t>(i);

  Eigen::VectorXd p(d), q(d);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::int32_t ix : order) {
      const Cell& c = cells[ix];
      double pred = model.predict(c.user, c.item);
      double err = c.rating - pred;
      double& bu = model.user_bias(c.user);
      double& bi = model.item_bias(c.item);
      bu += lr * (err - lambda * bu);
      bi += lr * (err - lambda * bi);
      p = model.user_factors.row(c.user);
      q = model.item_factors.row(c.item);
      model.user_factors.row(c.user) += lr * (err * q - lambda * p).transpose();
      model.item_factors.row(c.item) += lr * (err * p - lambda * q).transpose();
    }
    double sse = 0.0;
    for (const Cell& c : cells) {
      double err = c.rating - model.predict(c.user, c.item);
      sse += err * err;
    }
    double mse = sse / static_cast<double>(cells.size());
    if (!std::isfinite(mse))
      throw std::runtime_error(
          "biased MF diverged (non-finite loss); lower the learning rate");
    result.objective_per_epoch.push_back(mse);
  }
  return result;
}

TrainResult train_wmf(const Dataset& dataset, const TrainConfig& config) {
  config.validate();
  std::vector<Cell> cells = train_cells(dataset);
  if (cells.empty()) throw std::runtime_error("no training interactions");

  const int d = config.dim;
  const double lambda = config.regularization;
  const std::int32_t nu = dataset.num_users();
  const std::int32_t ni = dataset.num_items();

  std::vector<std::vector<std::pair<std::int32_t, double>>> of_user(nu),
      of_item(ni);
  for (const Cell& c : cells) {
    double confidence = 1.0 + config.confidence_weight * c.count;
    of_user[c.user].emplace_back(c.item, confidence);
    of_item[c.item].emplace_back(c.user, confidence);
  }

  TrainResult result;
  FactorModel& model = result.model;
  Rng rng(config.seed);
  model.user_factors = Eigen::MatrixXd::Zero(nu, d);
  model.item_factors.resize(ni, d);
  init_factors(model.item_factors, rng, 0.1);
  model.user_bias = Eigen::VectorXd::Zero(nu);
  model.item_bias = Eigen::VectorXd::Zero(ni);
  model.global_mean = 0.0;

  Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(d, d);

  auto solve_side = [&](Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                        const std::vector<std::vector<std::pair<std::int32_t, double>>>&
                            observed) {
    Eigen::MatrixXd gram = Y.transpose() * Y + lambda * identity;
    parallel_for(observed.size(), config.threads, [&](std::size_t row) {
      Eigen::MatrixXd a = gram;
      Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
      for (const auto& [other, confidence] : observed[row]) {
        const auto y = Y.row(other);
        a.noalias() += (confidence - 1.0) * y.transpose() * y;
        b.noalias() += confidence * y.transpose();
      }
      X.row(row) = a.ldlt().solve(b).transpose();
    });
  };

  auto objective = [&]() {
    const Eigen::MatrixXd gram = model.item_factors.transpose() * model.item_factors;
    double j = 0.0;
    for (std::int32_t u = 0; u < nu; ++u) {
      const auto x = model.user_factors.row(u);
      j += x * gram * x.transpose();
      for (const auto& [item, confidence] : of_user[u]) {
        double s = x.dot(model.item_factors.row(item));
        j += confidence * (1.0 - s) * (1.0 - s) - s * s;
      }
    }
    j += lambda * (model.user_factors.squaredNorm() +
                   model.item_factors.squaredNorm());
    return j;
  };

  for (int sweep = 0; sweep < config.epochs; ++sweep) {
    solve_side(model.user_factors, model.item_factors, of_user);
    solve_side(model.item_factors, model.user_factors, of_item);
    double j = objective();
    if (!std::isfinite(j))
      throw std::runtime_error("WMF objective is non-finite");
    result.objective_per_epoch.push_back(j);
  }
  return result;
}

TrainResult train(const Dataset& dataset, const TrainConfig& config) {
  return config.model == ModelKind::kBiasedMf ? train_biased_mf(dataset, config)
                                              : train_wmf(dataset, config);
}

ScoreSet score_candidates(const FactorModel& model, const Dataset& dataset,
                          int top_n, int threads) {
  const std::int32_t nu = dataset.num_users();
  const std::int32_t ni = dataset.num_items();
  if (model.user_factors.rows() != nu || model.item_factors.rows() != ni)
    throw std::invalid_argument("model shape does not match dataset");

  ScoreSet scores;
  scores.candidates.resize(nu);
  parallel_for(static_cast<std::size_t>(nu), threads, [&](std::size_t ux) {
    UserId u = static_cast<UserId>(ux);
    Eigen::VectorXd all =
        (model.item_factors * model.user_factors.row(u).transpose() +
         model.item_bias)
            .array() +
        (model.global_mean + model.user_bias(u));
    const std::vector<ItemId>& seen = dataset.train_items_of_user[u];
    std::vector<ScoredItem> list;
    list.reserve(ni - seen.size());
    std::size_t s = 0;
    for (ItemId v = 0; v < ni; ++v) {
      while (s < seen.size() && seen[s] < v) ++s;
      if (s < seen.size() && seen[s] == v) continue;
      list.push_back(ScoredItem{v, all(v)});
    }
    auto better = [](const ScoredItem& a, const ScoredItem& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.item < b.item;
    };
    if (top_n > 0 && static_cast<std::size_t>(top_n) < list.size()) {
      std::partial_sort(list.begin(), list.begin() + top_n, list.end(), better);
      list.resize(top_n);
    } else {
      std::sort(list.begin(), list.end(), better);
    }
    if (list.empty())
      fmt::print(stderr,
                 "warning: user {} has no unseen items; excluded from "
                 "re-ranking\n",
                 dataset.users.original(u));
    scores.candidates[ux] = std::move(list);
  });
  return scores;
}

void export_scores(const ScoreSet& scores, const Dataset& dataset,
                   const std::string& path) {
  std::string out;
  for (std::size_t u = 0; u < scores.candidates.size(); ++u)
    for (const ScoredItem& cand : scores.candidates[u])
      out += fmt::format("{}\t{}\t{:.17g}\n",
                         dataset.users.original(static_cast<UserId>(u)),
                         dataset.items.original(cand.item), cand.score);
  write_file(path, out);
}

namespace {

ScoreSet load_dense_scores(const std::string& path, const Dataset& dataset) {
  namespace fs = std::filesystem;
  nlohmann::json header = nlohmann::json::parse(read_file(path));
  std::vector<std::string> users =
      header.at("users").get<std::vector<std::string>>();
  std::vector<std::string> items =
      header.at("items").get<std::vector<std::string>>();
  std::string data_path = header.at("data").get<std::string>();
  fs::path resolved = fs::path(path).parent_path() / data_path;

  std::ifstream in(resolved, std::ios::binary);
  if (!in)
    throw std::runtime_error(fmt::format("cannot open '{}'", resolved.string()));
  std::vector<double> data(users.size() * items.size());
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (in.gcount() !=
      static_cast<std::streamsize>(data.size() * sizeof(double)))
    throw std::runtime_error(fmt::format(
        "'{}': expected {} float64 values", resolved.string(), data.size()));

  ScoreSet scores;
  scores.candidates.resize(dataset.num_users());
  for (std::size_t r = 0; r < users.size(); ++r) {
    auto u = dataset.users.find(users[r]);
    if (!u)
      throw std::runtime_error(
          fmt::format("'{}': unknown user '{}'", path, users[r]));
    for (std::size_t c = 0; c < items.size(); ++c) {
      auto v = dataset.items.find(items[c]);
      if (!v)
        throw std::runtime_error(
            fmt::format("'{}': unknown item '{}'", path, items[c]));
      double s = data[r * items.size() + c];
      if (!std::isfinite(s))
        throw std::runtime_error(fmt::format(
            "'{}': non-finite score for user '{}' item '{}'", path, users[r],
            items[c]));
      scores.candidates[*u].push_back(ScoredItem{*v, s});
    }
  }
  return scores;
}

}  // namespace

ScoreSet load_external_scores(const std::string& path, const Dataset& dataset,
                              int top_n) {
  ScoreSet scores;
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
    scores = load_dense_scores(path, dataset);
  } else {
    scores.candidates.resize(dataset.num_users());
    std::vector<std::string> lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      if (i == 0 && lines[i] == "user\titem\tscore") continue;
      std::vector<std::string> f = split(lines[i], '\t');
      if (f.size() != 3)
        throw std::runtime_error(
            fmt::format("'{}' line {}: expected user\\titem\\tscore", path, i + 1));
      auto u = dataset.users.find(f[0]);
      if (!u)
        throw std::runtime_error(
            fmt::format("'{}' line {}: unknown user '{}'", path, i + 1, f[0]));
      auto v = dataset.items.find(f[1]);
      if (!v)
        throw std::runtime_error(
            fmt::format("'{}' line {}: unknown item '{}'", path, i + 1, f[1]));
      double s = parse_double(f[2]);
      if (!std::isfinite(s))
        throw std::runtime_error(
            fmt::format("'{}' line {}: non-finite score", path, i + 1));
      scores.candidates[*u].push_back(ScoredItem{*v, s});
    }
  }

  for (std::int32_t u = 0; u < dataset.num_users(); ++u) {
    std::vector<ScoredItem>& list = scores.candidates[u];
    const std::vector<ItemId>& seen = dataset.train_items_of_user[u];
    std::erase_if(list, [&](const ScoredItem& cand) {
      return std::binary_search(seen.begin(), seen.end(), cand.item);
    });
    std::sort(list.begin(), list.end(), [](const ScoredItem& a, const ScoredItem& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.item < b.item;
    });
    if (top_n > 0 && static_cast<std::size_t>(top_n) < list.size())
      list.resize(top_n);
  }
  scores.sort_and_validate();
  return scores;
}

void save_model(const FactorModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path));
  const char magic[4] = {'F', 'R', 'M', 'F'};
  out.write(magic, 4);
  std::int64_t nu = model.user_factors.rows();
  std::int64_t ni = model.item_factors.rows();
  std::int64_t d = model.user_factors.cols();
  out.write(reinterpret_cast<const char*>(&nu), 8);
  out.write(reinterpret_cast<const char*>(&ni), 8);
  out.write(reinterpret_cast<const char*>(&d), 8);
  out.write(reinterpret_cast<const char*>(&model.global_mean), 8);
  auto write_mat = [&](const Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        double v = m(i, j);
        out.write(reinterpret_cast<const char*>(&v), 8);
      }
  };
  write_mat(model.user_factors);
  write_mat(model.item_factors);
  out.write(reinterpret_cast<const char*>(model.user_bias.data()),
            static_cast<std::streamsize>(nu * 8));
  out.write(reinterpret_cast<const char*>(model.item_bias.data()),
            static_cast<std::streamsize>(ni * 8));
  if (!out) throw std::runtime_error(fmt::format("short write to '{}'", path));
}

FactorModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path));
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "FRMF", 4) != 0)
    throw std::runtime_error(fmt::format("'{}' is not a model file", path));
  std::int64_t nu = 0, ni = 0, d = 0;
  in.read(reinterpret_cast<char*>(&nu), 8);
  in.read(reinterpret_cast<char*>(&ni), 8);
  in.read(reinterpret_cast<char*>(&d), 8);
  FactorModel model;
  in.read(reinterpret_cast<char*>(&model.global_mean), 8);
  if (!in || nu <= 0 || ni <= 0 || d <= 0)
    throw std::runtime_error(fmt::format("'{}' has a corrupt header", path));
  model.user_factors.resize(nu, d);
  model.item_factors.resize(ni, d);
  auto read_mat = [&](Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        double v = 0.0;
        in.read(reinterpret_cast<char*>(&v), 8);
        m(i, j) = v;
      }
  };
  read_mat(model.user_factors);
  read_mat(model.item_factors);
  model.user_bias.resize(nu);
  model.item_bias.resize(ni);
  in.read(reinterpret_cast<char*>(model.user_bias.data()),
          static_cast<std::streamsize>(nu * 8));
  in.read(reinterpret_cast<char*>(model.item_bias.data()),
          static_cast<std::streamsize>(ni * 8));
  if (!in) throw std::runtime_error(fmt::format("'{}' is truncated", path));
  return model;
}

}  // namespace fairrec
