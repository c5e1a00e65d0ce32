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

#include "fairrec/experiment.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "fairrec/io.hpp"

namespace fairrec {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename Fn>
auto run_stage(const char* stage, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw std::runtime_error(fmt::format("[{}] {}", stage, e.what()));
  }
}

std::vector<std::string> resolve_attributes(const ExperimentConfig& config,
                                            const Dataset& dataset) {
  std::vector<std::string> names =
      config.attributes.empty() ? dataset.attributes.names()
                                : config.attributes;
  if (names.empty())
    throw std::runtime_error("the dataset carries no user attributes");
  for (const std::string& name : names)
    dataset.attributes.get(name);  // throws on unknown attribute
  return names;
}

// Per-class average history distribution; the "training" column of the
// proportion tables.
std::vector<CategoryDistribution> train_proportions(
    const Dataset& dataset, const std::string& attribute,
    const RerankConfig& rerank) {
  const Attribute& attr = dataset.attributes.get(attribute);
  std::vector<CategoryDistribution> sums(
      attr.num_classes(),
      CategoryDistribution(dataset.catalog.num_categories(), 0.0));
  std::vector<std::int64_t> counts(attr.num_classes(), 0);
  for (std::int32_t u = 0; u < dataset.num_users(); ++u) {
    CategoryDistribution m =
        history_distribution(u, dataset, rerank.timestamp_weighting);
    std::int32_t s = attr.value_of_user[u];
    ++counts[s];
    for (std::size_t c = 0; c < m.size(); ++c) sums[s][c] += m[c];
  }
  for (std::int32_t s = 0; s < attr.num_classes(); ++s)
    if (counts[s] > 0)
      for (double& x : sums[s]) x /= static_cast<double>(counts[s]);
  return sums;
}

json bias_json(const BiasReport& report,
               const std::vector<std::string>& categories) {
  return json::parse(bias_report_json(report, categories));
}

json accuracy_json(const AccuracyReport& report) {
  return json::parse(accuracy_report_json(report));
}

std::string format_double(double v) { return fmt::format("{}", v); }

}  // namespace

void ExperimentConfig::validate() const {
  ingest.validate();
  train.validate();
  rerank.validate();
  if (output_dir.empty())
    throw std::invalid_argument("output_dir is required");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

Pipeline prepare_pipeline(const ExperimentConfig& config) {
  config.validate();
  Pipeline pipeline;
  pipeline.dataset = run_stage("ingest", [&] { return ingest(config.ingest); });
  if (config.external_scores.empty()) {
    TrainConfig train_config = config.train;
    train_config.threads = config.threads;
    FactorModel model = run_stage("train", [&] {
      return train(pipeline.dataset, train_config).model;
    });
    pipeline.scores = run_stage("score", [&] {
      return score_candidates(model, pipeline.dataset, config.rerank.top_n,
                              config.threads);
    });
  } else {
    pipeline.scores = run_stage("score", [&] {
      return load_external_scores(config.external_scores, pipeline.dataset,
                                  config.rerank.top_n);
    });
  }
  return pipeline;
}

AttributeResult evaluate_attribute(const Dataset& dataset,
                                   const ScoreSet& scores,
                                   const std::string& attribute,
                                   const RerankConfig& rerank) {
  AttributeResult result;
  result.attribute = attribute;

  CounterfactualProfile profile = run_stage("profile", [&] {
    return build_counterfactual_profile(dataset, attribute, rerank);
  });
  std::vector<RankedList> fair_lists = run_stage("rerank", [&] {
    return rerank_all(scores, profile, dataset.catalog, rerank);
  });
  std::vector<RankedList> original_lists = baseline_topk(scores, rerank.k);

  run_stage("evaluate", [&] {
    TopkLists fair = to_topk_lists(fair_lists, dataset.num_users());
    TopkLists original = to_topk_lists(original_lists, dataset.num_users());
    std::vector<UserId> all_users(dataset.num_users());
    for (std::int32_t u = 0; u < dataset.num_users(); ++u) all_users[u] = u;
    AttributePartition partition =
        partition_by_attribute(all_users, dataset.attributes, attribute);

    result.original.accuracy = accuracy_report(original, dataset, rerank.k);
    result.original.bias = bias_report(partition, original, dataset.catalog);
    result.fair.accuracy = accuracy_report(fair, dataset, rerank.k);
    result.fair.bias = bias_report(partition, fair, dataset.catalog);
    return 0;
  });
  return result;
}

RunResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  fs::path run_dir(config.output_dir);
  if (fs::exists(run_dir) && !fs::is_empty(run_dir))
    throw std::runtime_error(fmt::format(
        "output directory '{}' already exists and is not empty",
        config.output_dir));
  fs::create_directories(run_dir);

  try {
    Pipeline pipeline = prepare_pipeline(config);
    const Dataset& dataset = pipeline.dataset;
    std::vector<std::string> attributes = resolve_attributes(config, dataset);

    RunResult result;
    result.run_dir = config.output_dir;

    std::vector<RankedList> original_lists =
        baseline_topk(pipeline.scores, config.rerank.k);
    if (config.write_lists)
      write_reranked(original_lists, pipeline.scores, dataset,
                     (run_dir / "original.tsv").string());

    json bias_out;
    json accuracy_out;
    accuracy_out["k"] = config.rerank.k;

    std::vector<UserId> all_users(dataset.num_users());
    for (std::int32_t u = 0; u < dataset.num_users(); ++u) all_users[u] = u;

    for (const std::string& attribute : attributes) {
      RerankConfig rerank = config.rerank;
      rerank.threads = config.threads;

      CounterfactualProfile profile = run_stage("profile", [&] {
        return build_counterfactual_profile(dataset, attribute, rerank);
      });
      save_profile(profile,
                   (run_dir / fmt::format("profile_{}.json", attribute)).string());
      std::vector<RankedList> fair_lists = run_stage("rerank", [&] {
        return rerank_all(pipeline.scores, profile, dataset.catalog, rerank);
      });
      if (config.write_lists)
        write_reranked(fair_lists, pipeline.scores, dataset,
                       (run_dir / fmt::format("fair_{}.tsv", attribute)).string());

      AttributeResult attr_result;
      attr_result.attribute = attribute;
      run_stage("evaluate", [&] {
        TopkLists fair = to_topk_lists(fair_lists, dataset.num_users());
        TopkLists original = to_topk_lists(original_lists, dataset.num_users());
        AttributePartition partition =
            partition_by_attribute(all_users, dataset.attributes, attribute);
        attr_result.original.accuracy = accuracy_report(original, dataset, rerank.k);
        attr_result.original.bias = bias_report(partition, original, dataset.catalog);
        attr_result.fair.accuracy = accuracy_report(fair, dataset, rerank.k);
        attr_result.fair.bias = bias_report(partition, fair, dataset.catalog);
        return 0;
      });

      json attr_json;
      attr_json["classes"] = attr_result.original.bias.classes;
      attr_json["categories"] = dataset.catalog.names;
      attr_json["train_proportions"] =
          train_proportions(dataset, attribute, rerank);
      attr_json["original"] = bias_json(attr_result.original.bias,
                                        dataset.catalog.names);
      attr_json["fair"] = bias_json(attr_result.fair.bias,
                                    dataset.catalog.names);
      bias_out["attributes"][attribute] = attr_json;

      accuracy_out["original"] = accuracy_json(attr_result.original.accuracy);
      accuracy_out["fair"][attribute] = accuracy_json(attr_result.fair.accuracy);

      result.results.push_back(std::move(attr_result));
    }

    run_stage("report", [&] {
      write_file((run_dir / "bias_report.json").string(),
                 bias_out.dump(2) + "\n");
      write_file((run_dir / "accuracy_report.json").string(),
                 accuracy_out.dump(2) + "\n");

      json manifest;
      manifest["dataset"]["interactions_path"] = config.ingest.interactions_path;
      manifest["dataset"]["interactions_hash"] =
          file_hash(config.ingest.interactions_path);
      manifest["dataset"]["users"] = dataset.num_users();
      manifest["dataset"]["items"] = dataset.num_items();
      manifest["dataset"]["interactions"] = dataset.interactions.size();
      manifest["dataset"]["categories"] = dataset.catalog.num_categories();
      manifest["ingest"]["format"] =
          config.ingest.format == DatasetFormat::kMovieLens100K ? "movielens-100k"
          : config.ingest.format == DatasetFormat::kMovieLens1M ? "movielens-1m"
                                                                : "generic-tsv";
      manifest["ingest"]["k_core"] = config.ingest.k_core;
      manifest["ingest"]["split"] =
          config.ingest.split == SplitStrategy::kTemporalPerUser
              ? "temporal-per-user"
              : "temporal-global";
      manifest["ingest"]["train_fraction"] = config.ingest.train_fraction;
      manifest["ingest"]["keep_unknown_genre"] = config.ingest.keep_unknown_genre;
      if (config.external_scores.empty()) {
        manifest["model"]["kind"] =
            config.train.model == ModelKind::kBiasedMf ? "biased-mf" : "wmf";
        manifest["model"]["dim"] = config.train.dim;
        manifest["model"]["epochs"] = config.train.epochs;
        manifest["model"]["learning_rate"] = config.train.learning_rate;
        manifest["model"]["regularization"] = config.train.regularization;
        manifest["model"]["confidence_weight"] = config.train.confidence_weight;
        manifest["model"]["seed"] = config.train.seed;
      } else {
        manifest["model"]["external_scores"] = config.external_scores;
        manifest["model"]["external_scores_hash"] =
            file_hash(config.external_scores);
      }
      manifest["rerank"]["beta"] = config.rerank.beta;
      manifest["rerank"]["gamma"] = config.rerank.gamma;
      manifest["rerank"]["alpha"] = config.rerank.alpha;
      manifest["rerank"]["k"] = config.rerank.k;
      manifest["rerank"]["top_n"] = config.rerank.top_n;
      manifest["rerank"]["normalization"] =
          config.rerank.normalization == Normalization::kPerStepMinMax
              ? "per-step-min-max"
          : config.rerank.normalization == Normalization::kGlobalMinMax
              ? "global-min-max"
              : "none";
      manifest["rerank"]["timestamp_weighting"] =
          config.rerank.timestamp_weighting == TimestampWeighting::kRaw
              ? "raw"
              : "minmax-recency";
      manifest["rerank"]["profile_smoothing"] = config.rerank.profile_smoothing;
      manifest["attributes"] = attributes;
      write_file((run_dir / "manifest.json").string(), manifest.dump(2) + "\n");
      emit_report(config.output_dir);
      return 0;
    });
    return result;
  } catch (...) {
    fs::remove_all(run_dir);
    throw;
  }
}

std::vector<SweepPoint> sweep(const ExperimentConfig& config,
                              const std::string& parameter,
                              const std::vector<double>& grid) {
  config.validate();
  if (parameter != "beta" && parameter != "gamma")
    throw std::invalid_argument(
        fmt::format("unknown sweep parameter '{}'", parameter));
  if (grid.empty()) throw std::invalid_argument("sweep grid is empty");

  fs::path run_dir(config.output_dir);
  if (fs::exists(run_dir) && !fs::is_empty(run_dir))
    throw std::runtime_error(fmt::format(
        "output directory '{}' already exists and is not empty",
        config.output_dir));
  fs::create_directories(run_dir);

  try {
    Pipeline pipeline = prepare_pipeline(config);
    const Dataset& dataset = pipeline.dataset;
    std::vector<std::string> attributes = resolve_attributes(config, dataset);

    std::vector<UserId> all_users(dataset.num_users());
    for (std::int32_t u = 0; u < dataset.num_users(); ++u) all_users[u] = u;

    std::vector<SweepPoint> points;
    for (const std::string& attribute : attributes) {
      RerankConfig rerank = config.rerank;
      rerank.threads = config.threads;
      CounterfactualProfile profile = run_stage("profile", [&] {
        return build_counterfactual_profile(dataset, attribute, rerank);
      });
      AttributePartition partition =
          partition_by_attribute(all_users, dataset.attributes, attribute);

      for (double value : grid) {
        if (parameter == "beta")
          rerank.beta = value;
        else
          rerank.gamma = value;
        rerank.validate();
        std::vector<RankedList> lists = run_stage("rerank", [&] {
          return rerank_all(pipeline.scores, profile, dataset.catalog, rerank);
        });
        TopkLists topk = to_topk_lists(lists, dataset.num_users());
        AccuracyReport accuracy = accuracy_report(topk, dataset, rerank.k);
        SweepPoint point;
        point.parameter = parameter;
        point.value = value;
        point.attribute = attribute;
        point.ndcg = accuracy.ndcg;
        point.hit_ratio = accuracy.hit_ratio;
        point.cc_bias =
            pairwise_bias(BiasMetric::kCC, partition, topk, dataset.catalog);
        point.cdcg_bias =
            pairwise_bias(BiasMetric::kCDCG, partition, topk, dataset.catalog);
        points.push_back(std::move(point));
      }
    }

    write_file((run_dir / "sweep.csv").string(), sweep_csv(points));
    return points;
  } catch (...) {
    fs::remove_all(run_dir);
    throw;
  }
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
  std::string out = "parameter,value,attribute,ndcg,hit_ratio,cc_bias,cdcg_bias\n";
  for (const SweepPoint& p : points)
    out += fmt::format("{},{},{},{},{},{},{}\n", p.parameter,
                       format_double(p.value), p.attribute,
                       format_double(p.ndcg), format_double(p.hit_ratio),
                       format_double(p.cc_bias), format_double(p.cdcg_bias));
  return out;
}

void emit_report(const std::string& run_dir) {
  fs::path dir(run_dir);
  json bias = json::parse(read_file((dir / "bias_report.json").string()));
  json accuracy = json::parse(read_file((dir / "accuracy_report.json").string()));

  std::string csv = "attribute,variant,ndcg,hit_ratio,cc_bias,cdcg_bias\n";
  std::string md = "# Run summary\n\n## Accuracy and bias\n\n";
  md += "| attribute | variant | NDCG@k | HitRatio@k | CC bias | CDCG bias |\n";
  md += "|---|---|---|---|---|---|\n";

  const json& attrs = bias.at("attributes");
  // Attribute order follows the manifest (the configured order); the JSON
  // object itself iterates alphabetically.
  std::vector<std::string> order;
  fs::path manifest_path = dir / "manifest.json";
  if (fs::exists(manifest_path)) {
    json manifest = json::parse(read_file(manifest_path.string()));
    if (manifest.contains("attributes"))
      order = manifest.at("attributes").get<std::vector<std::string>>();
  }
  if (order.empty())
    for (auto it = attrs.begin(); it != attrs.end(); ++it)
      order.push_back(it.key());

  for (const std::string& attribute : order) {
    const json& block = attrs.at(attribute);
    double orig_cc = block.at("original").at("cc").at("total_bias");
    double orig_cdcg = block.at("original").at("cdcg").at("total_bias");
    double fair_cc = block.at("fair").at("cc").at("total_bias");
    double fair_cdcg = block.at("fair").at("cdcg").at("total_bias");
    double orig_ndcg = accuracy.at("original").at("ndcg");
    double orig_hr = accuracy.at("original").at("hit_ratio");
    double fair_ndcg = accuracy.at("fair").at(attribute).at("ndcg");
    double fair_hr = accuracy.at("fair").at(attribute).at("hit_ratio");

    csv += fmt::format("{},original,{},{},{},{}\n", attribute,
                       format_double(orig_ndcg), format_double(orig_hr),
                       format_double(orig_cc), format_double(orig_cdcg));
    csv += fmt::format("{},fair,{},{},{},{}\n", attribute,
                       format_double(fair_ndcg), format_double(fair_hr),
                       format_double(fair_cc), format_double(fair_cdcg));
    md += fmt::format("| {} | original | {:.4f} | {:.4f} | {:.4f} | {:.4f} |\n",
                      attribute, orig_ndcg, orig_hr, orig_cc, orig_cdcg);
    md += fmt::format("| {} | fair | {:.4f} | {:.4f} | {:.4f} | {:.4f} |\n",
                      attribute, fair_ndcg, fair_hr, fair_cc, fair_cdcg);
  }

  md += "\n## Category proportions by group\n";
  for (const std::string& attribute : order) {
    const json& block = attrs.at(attribute);
    std::vector<std::string> classes =
        block.at("classes").get<std::vector<std::string>>();
    std::vector<std::string> categories =
        block.at("categories").get<std::vector<std::string>>();
    for (std::size_t g = 0; g < classes.size(); ++g) {
      md += fmt::format("\n### {} = {}\n\n", attribute, classes[g]);
      md += "| category | training | original | fair |\n|---|---|---|---|\n";
      for (std::size_t c = 0; c < categories.size(); ++c) {
        double train_p = block.at("train_proportions")[g][c];
        double orig_p = block.at("original").at("cc").at("values")[c][g];
        double fair_p = block.at("fair").at("cc").at("values")[c][g];
        md += fmt::format("| {} | {:.4f} | {:.4f} | {:.4f} |\n", categories[c],
                          train_p, orig_p, fair_p);
      }
    }
  }

  write_file((dir / "report.csv").string(), csv);
  write_file((dir / "summary.md").string(), md);
}

}  // namespace fairrec
