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

#include <fmt/core.h>

#include <CLI11.hpp>
#include <cctype>
#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "fairrec/experiment.hpp"
#include "fairrec/io.hpp"
#include "fairrec/synthetic.hpp"

namespace {

namespace fs = std::filesystem;
using fairrec::ExperimentConfig;

// Accepts TOML (CLI11 native) and JSON config files through one entry point.
class HybridConfig : public CLI::ConfigTOML {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::streampos start = input.tellg();
    char first = 0;
    while (input.get(first) && std::isspace(static_cast<unsigned char>(first))) {
    }
    input.clear();
    input.seekg(start);
    if (first != '{') return CLI::ConfigTOML::from_config(input);

    nlohmann::json j = nlohmann::json::parse(input);
    std::vector<CLI::ConfigItem> items;
    flatten(j, {}, items);
    return items;
  }

 private:
  static void flatten(const nlohmann::json& j, std::vector<std::string> parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const nlohmann::json& value = it.value();
      if (value.is_object()) {
        std::vector<std::string> nested = parents;
        nested.push_back(it.key());
        flatten(value, std::move(nested), items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = it.key();
      if (value.is_array()) {
        for (const nlohmann::json& entry : value)
          item.inputs.push_back(scalar(entry));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }

  static std::string scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }
};

struct CliState {
  ExperimentConfig cfg;
  std::string data_dir;
  std::string out;
  std::string model_in;
  std::string model_out;
  std::string scores_in;
  std::string parameter = "beta";
  std::vector<double> grid;
  std::string run_dir;
  std::string preset = "ml100k";
  std::uint64_t synth_seed = 0;
};

void add_ingest_options(CLI::App* cmd, CliState& state) {
  std::map<std::string, fairrec::DatasetFormat> formats{
      {"movielens-100k", fairrec::DatasetFormat::kMovieLens100K},
      {"movielens-1m", fairrec::DatasetFormat::kMovieLens1M},
      {"generic-tsv", fairrec::DatasetFormat::kGenericTsv}};
  std::map<std::string, fairrec::SplitStrategy> splits{
      {"temporal-per-user", fairrec::SplitStrategy::kTemporalPerUser},
      {"temporal-global", fairrec::SplitStrategy::kTemporalGlobal}};
  cmd->add_option("--format", state.cfg.ingest.format, "input dataset format")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  cmd->add_option("--data-dir", state.data_dir,
                  "directory holding the dataset files; fills the per-file "
                  "paths for the chosen format");
  cmd->add_option("--interactions", state.cfg.ingest.interactions_path,
                  "interaction file");
  cmd->add_option("--users", state.cfg.ingest.users_path,
                  "user attribute file");
  cmd->add_option("--items", state.cfg.ingest.categories_path,
                  "item category file");
  cmd->add_option("--k-core", state.cfg.ingest.k_core,
                  "iterative degree floor (0 disables)");
  cmd->add_option("--split", state.cfg.ingest.split, "train/test split strategy")
      ->transform(CLI::CheckedTransformer(splits, CLI::ignore_case));
  cmd->add_option("--train-fraction", state.cfg.ingest.train_fraction,
                  "fraction of each user's interactions kept for training");
  cmd->add_flag("--keep-unknown-genre", state.cfg.ingest.keep_unknown_genre,
                "keep the historical 'unknown' genre flag as a category");
}

void add_train_options(CLI::App* cmd, CliState& state) {
  std::map<std::string, fairrec::ModelKind> models{
      {"biased-mf", fairrec::ModelKind::kBiasedMf},
      {"wmf", fairrec::ModelKind::kWmf}};
  cmd->add_option("--model", state.cfg.train.model, "recommender to train")
      ->transform(CLI::CheckedTransformer(models, CLI::ignore_case));
  cmd->add_option("--dim", state.cfg.train.dim, "latent dimension");
  cmd->add_option("--epochs", state.cfg.train.epochs,
                  "SGD epochs / ALS sweeps");
  cmd->add_option("--learning-rate", state.cfg.train.learning_rate,
                  "SGD learning rate");
  cmd->add_option("--regularization", state.cfg.train.regularization,
                  "L2 regularization");
  cmd->add_option("--confidence-weight", state.cfg.train.confidence_weight,
                  "implicit-feedback confidence weight");
  cmd->add_option("--seed", state.cfg.train.seed, "training RNG seed");
}

void add_rerank_options(CLI::App* cmd, CliState& state) {
  std::map<std::string, fairrec::Normalization> norms{
      {"per-step-min-max", fairrec::Normalization::kPerStepMinMax},
      {"global-min-max", fairrec::Normalization::kGlobalMinMax},
      {"none", fairrec::Normalization::kNone}};
  std::map<std::string, fairrec::TimestampWeighting> weightings{
      {"raw", fairrec::TimestampWeighting::kRaw},
      {"minmax-recency", fairrec::TimestampWeighting::kMinMaxRecency}};
  cmd->add_option("--beta", state.cfg.rerank.beta,
                  "relevance/fairness trade-off in [0,1]");
  cmd->add_option("--gamma", state.cfg.rerank.gamma,
                  "rank discount exponent in [0,1]");
  cmd->add_option("--alpha", state.cfg.rerank.alpha,
                  "target-mixing constant in (0,1)");
  cmd->add_option("--k", state.cfg.rerank.k, "output list length");
  cmd->add_option("--top-n", state.cfg.rerank.top_n,
                  "candidate pool size per user (0 = every unseen item)");
  cmd->add_option("--normalization", state.cfg.rerank.normalization,
                  "term normalization inside the greedy step")
      ->transform(CLI::CheckedTransformer(norms, CLI::ignore_case));
  cmd->add_option("--timestamp-weighting", state.cfg.rerank.timestamp_weighting,
                  "interaction weight mode for history distributions")
      ->transform(CLI::CheckedTransformer(weightings, CLI::ignore_case));
  cmd->add_option("--profile-smoothing", state.cfg.rerank.profile_smoothing,
                  "constant added to profile distributions");
}

void add_common_options(CLI::App* cmd, CliState& state) {
  cmd->add_option("--threads", state.cfg.threads, "worker thread count");
  cmd->add_option("--attribute", state.cfg.attributes,
                  "sensitive attribute(s) to evaluate (repeatable)");
}

void resolve_data_dir(CliState& state) {
  if (state.data_dir.empty()) return;
  fs::path dir(state.data_dir);
  const char* files[3][3] = {
      {"u.data", "u.user", "u.item"},
      {"ratings.dat", "users.dat", "movies.dat"},
      {"interactions.tsv", "users.tsv", "item_categories.tsv"}};
  int row = state.cfg.ingest.format == fairrec::DatasetFormat::kMovieLens100K ? 0
            : state.cfg.ingest.format == fairrec::DatasetFormat::kMovieLens1M ? 1
                                                                              : 2;
  if (state.cfg.ingest.interactions_path.empty())
    state.cfg.ingest.interactions_path = (dir / files[row][0]).string();
  if (state.cfg.ingest.users_path.empty())
    state.cfg.ingest.users_path = (dir / files[row][1]).string();
  if (state.cfg.ingest.categories_path.empty())
    state.cfg.ingest.categories_path = (dir / files[row][2]).string();
}

fairrec::ScoreSet resolve_scores(CliState& state, const fairrec::Dataset& dataset) {
  if (!state.scores_in.empty())
    return fairrec::load_external_scores(state.scores_in, dataset,
                                         state.cfg.rerank.top_n);
  if (!state.model_in.empty()) {
    fairrec::FactorModel model = fairrec::load_model(state.model_in);
    return fairrec::score_candidates(model, dataset, state.cfg.rerank.top_n,
                                     state.cfg.threads);
  }
  fairrec::TrainConfig train_config = state.cfg.train;
  train_config.threads = state.cfg.threads;
  fairrec::FactorModel model = fairrec::train(dataset, train_config).model;
  return fairrec::score_candidates(model, dataset, state.cfg.rerank.top_n,
                                   state.cfg.threads);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fairrec: counterfactually fair re-ranking for recommenders"};
  app.require_subcommand(1);
  // The config option lives on the root app (subcommand config options are
  // not processed); fallthrough lets it be written after the subcommand.
  // Files scope values in a section named after the subcommand.
  app.fallthrough();
  app.set_config("--config", "", "JSON or TOML configuration file");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.config_formatter(std::make_shared<HybridConfig>());

  CliState state;

  CLI::App* cmd_ingest =
      app.add_subcommand("ingest", "parse, filter and split a dataset");
  add_ingest_options(cmd_ingest, state);
  cmd_ingest->add_option("--out", state.out, "bundle output directory")
      ->required();

  CLI::App* cmd_train =
      app.add_subcommand("train", "train a recommender on the train split");
  add_ingest_options(cmd_train, state);
  add_train_options(cmd_train, state);
  add_common_options(cmd_train, state);
  cmd_train->add_option("--model-out", state.model_out, "model file to write")
      ->required();

  CLI::App* cmd_score = app.add_subcommand(
      "score", "score unseen items per user and export scores.tsv");
  CLI::App* cmd_export = app.add_subcommand(
      "export-scores", "alias of score; always writes scores.tsv");
  for (CLI::App* cmd : {cmd_score, cmd_export}) {
    add_ingest_options(cmd, state);
    add_train_options(cmd, state);
    add_common_options(cmd, state);
    cmd->add_option("--model-in", state.model_in, "trained model file");
    cmd->add_option("--top-n", state.cfg.rerank.top_n,
                    "candidates per user (0 = every unseen item)");
    cmd->add_option("--out", state.out, "scores.tsv path")->required();
  }

  CLI::App* cmd_rerank = app.add_subcommand(
      "rerank", "fairness-aware greedy re-ranking for one attribute");
  add_ingest_options(cmd_rerank, state);
  add_train_options(cmd_rerank, state);
  add_rerank_options(cmd_rerank, state);
  add_common_options(cmd_rerank, state);
  cmd_rerank->add_option("--model-in", state.model_in, "trained model file");
  cmd_rerank->add_option("--scores", state.scores_in,
                         "external scores (TSV or JSON-headed dense matrix)");
  cmd_rerank->add_option("--out", state.out, "output directory")->required();

  CLI::App* cmd_evaluate = app.add_subcommand(
      "evaluate", "end-to-end run: metrics for original and fair lists");
  add_ingest_options(cmd_evaluate, state);
  add_train_options(cmd_evaluate, state);
  add_rerank_options(cmd_evaluate, state);
  add_common_options(cmd_evaluate, state);
  cmd_evaluate->add_option("--scores", state.scores_in,
                           "external scores instead of native training");
  cmd_evaluate->add_option("--out", state.cfg.output_dir, "run directory");
  cmd_evaluate->add_flag("--lists,!--no-lists", state.cfg.write_lists,
                         "write ranked list TSVs (on by default)");

  CLI::App* cmd_sweep =
      app.add_subcommand("sweep", "grid sweep over beta or gamma");
  add_ingest_options(cmd_sweep, state);
  add_train_options(cmd_sweep, state);
  add_rerank_options(cmd_sweep, state);
  add_common_options(cmd_sweep, state);
  cmd_sweep->add_option("--scores", state.scores_in,
                        "external scores instead of native training");
  cmd_sweep->add_option("--parameter", state.parameter, "beta or gamma")
      ->check(CLI::IsMember({"beta", "gamma"}));
  cmd_sweep->add_option("--grid", state.grid, "grid values (repeatable)");
  cmd_sweep->add_option("--out", state.cfg.output_dir, "run directory");

  CLI::App* cmd_report = app.add_subcommand(
      "report", "rebuild summary.md and report.csv from a run directory");
  cmd_report->add_option("--run", state.run_dir, "run directory")->required();

  CLI::App* cmd_synth = app.add_subcommand(
      "synth", "generate a synthetic MovieLens-100K-layout dataset");
  cmd_synth->add_option("--out", state.out, "output directory")->required();
  cmd_synth->add_option("--preset", state.preset, "ml100k or small")
      ->check(CLI::IsMember({"ml100k", "small"}));
  cmd_synth->add_option("--seed", state.synth_seed, "generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    resolve_data_dir(state);

    if (cmd_ingest->parsed()) {
      fairrec::Dataset dataset = fairrec::ingest(state.cfg.ingest);
      fairrec::write_dataset_bundle(dataset, state.cfg.ingest, state.out);
      fmt::print("users={} items={} interactions={} categories={}\n",
                 dataset.num_users(), dataset.num_items(),
                 dataset.interactions.size(),
                 dataset.catalog.num_categories());
      fmt::print("bundle written to {}\n", state.out);
    } else if (cmd_train->parsed()) {
      fairrec::Dataset dataset = fairrec::ingest(state.cfg.ingest);
      fairrec::TrainConfig train_config = state.cfg.train;
      train_config.threads = state.cfg.threads;
      fairrec::TrainResult trained = fairrec::train(dataset, train_config);
      fairrec::save_model(trained.model, state.model_out);
      fmt::print("model written to {} (final objective {})\n", state.model_out,
                 trained.objective_per_epoch.back());
    } else if (cmd_score->parsed() || cmd_export->parsed()) {
      fairrec::Dataset dataset = fairrec::ingest(state.cfg.ingest);
      fairrec::ScoreSet scores = resolve_scores(state, dataset);
      fairrec::export_scores(scores, dataset, state.out);
      std::size_t total = 0;
      for (const auto& list : scores.candidates) total += list.size();
      fmt::print("{} candidate scores for {} users written to {}\n", total,
                 dataset.num_users(), state.out);
    } else if (cmd_rerank->parsed()) {
      if (state.cfg.attributes.size() != 1)
        throw std::runtime_error("rerank needs exactly one --attribute");
      fairrec::Dataset dataset = fairrec::ingest(state.cfg.ingest);
      fairrec::ScoreSet scores = resolve_scores(state, dataset);
      fairrec::RerankConfig rerank = state.cfg.rerank;
      rerank.threads = state.cfg.threads;
      fairrec::CounterfactualProfile profile =
          fairrec::build_counterfactual_profile(dataset,
                                                state.cfg.attributes[0], rerank);
      std::vector<fairrec::RankedList> lists =
          fairrec::rerank_all(scores, profile, dataset.catalog, rerank);
      fs::create_directories(state.out);
      fairrec::save_profile(profile,
                            (fs::path(state.out) / "profile.json").string());
      fairrec::write_reranked(lists, scores, dataset,
                              (fs::path(state.out) / "reranked.tsv").string());
      fmt::print("re-ranked lists for {} users written to {}\n", lists.size(),
                 state.out);
    } else if (cmd_evaluate->parsed()) {
      state.cfg.external_scores = state.scores_in;
      fairrec::RunResult result = fairrec::run_experiment(state.cfg);
      for (const fairrec::AttributeResult& r : result.results)
        fmt::print(
            "{}: ndcg {:.4f} -> {:.4f}, hit {:.4f} -> {:.4f}, cc-bias {:.4f} "
            "-> {:.4f}, cdcg-bias {:.4f} -> {:.4f}\n",
            r.attribute, r.original.accuracy.ndcg, r.fair.accuracy.ndcg,
            r.original.accuracy.hit_ratio, r.fair.accuracy.hit_ratio,
            r.original.bias.total_cc_bias, r.fair.bias.total_cc_bias,
            r.original.bias.total_cdcg_bias, r.fair.bias.total_cdcg_bias);
      fmt::print("run directory: {}\n", result.run_dir);
    } else if (cmd_sweep->parsed()) {
      state.cfg.external_scores = state.scores_in;
      std::vector<double> grid = state.grid;
      if (grid.empty()) {
        if (state.parameter == "beta")
          for (int i = 0; i <= 8; ++i) grid.push_back(0.1 * i);
        else
          grid = {0.0, 0.1, 0.2, 0.3, 0.5, 0.8, 1.0};
      }
      std::vector<fairrec::SweepPoint> points =
          fairrec::sweep(state.cfg, state.parameter, grid);
      fmt::print("{} sweep rows written to {}/sweep.csv\n", points.size(),
                 state.cfg.output_dir);
    } else if (cmd_report->parsed()) {
      fairrec::emit_report(state.run_dir);
      fmt::print("report.csv and summary.md written to {}\n", state.run_dir);
    } else if (cmd_synth->parsed()) {
      fairrec::SyntheticConfig synth = state.preset == "small"
                                           ? fairrec::SyntheticConfig::small()
                                           : fairrec::SyntheticConfig::ml100k();
      if (cmd_synth->count("--seed") > 0) synth.seed = state.synth_seed;
      fairrec::generate_ml100k_files(synth, state.out);
      fmt::print("synthetic dataset written to {}\n", state.out);
    }
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
