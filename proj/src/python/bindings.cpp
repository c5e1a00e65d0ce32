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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "fairrec/experiment.hpp"
#include "fairrec/fairness.hpp"
#include "fairrec/ingest.hpp"
#include "fairrec/metrics.hpp"
#include "fairrec/recommender.hpp"
#include "fairrec/synthetic.hpp"

namespace py = pybind11;

namespace {

py::object json_to_py(const nlohmann::json& j) {
  switch (j.type()) {
    case nlohmann::json::value_t::null:
      return py::none();
    case nlohmann::json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case nlohmann::json::value_t::number_integer:
      return py::int_(j.get<std::int64_t>());
    case nlohmann::json::value_t::number_unsigned:
      return py::int_(j.get<std::uint64_t>());
    case nlohmann::json::value_t::number_float:
      return py::float_(j.get<double>());
    case nlohmann::json::value_t::string:
      return py::str(j.get<std::string>());
    case nlohmann::json::value_t::array: {
      py::list out;
      for (const nlohmann::json& entry : j) out.append(json_to_py(entry));
      return out;
    }
    case nlohmann::json::value_t::object: {
      py::dict out;
      for (auto it = j.begin(); it != j.end(); ++it)
        out[py::str(it.key())] = json_to_py(it.value());
      return out;
    }
    default:
      return py::none();
  }
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "fairness-aware re-ranking core";

  py::enum_<fairrec::DatasetFormat>(m, "DatasetFormat")
      .value("MOVIELENS_100K", fairrec::DatasetFormat::kMovieLens100K)
      .value("MOVIELENS_1M", fairrec::DatasetFormat::kMovieLens1M)
      .value("GENERIC_TSV", fairrec::DatasetFormat::kGenericTsv);

  py::enum_<fairrec::SplitStrategy>(m, "SplitStrategy")
      .value("TEMPORAL_PER_USER", fairrec::SplitStrategy::kTemporalPerUser)
      .value("TEMPORAL_GLOBAL", fairrec::SplitStrategy::kTemporalGlobal);

  py::enum_<fairrec::ModelKind>(m, "ModelKind")
      .value("BIASED_MF", fairrec::ModelKind::kBiasedMf)
      .value("WMF", fairrec::ModelKind::kWmf);

  py::enum_<fairrec::Normalization>(m, "Normalization")
      .value("PER_STEP_MIN_MAX", fairrec::Normalization::kPerStepMinMax)
      .value("GLOBAL_MIN_MAX", fairrec::Normalization::kGlobalMinMax)
      .value("NONE", fairrec::Normalization::kNone);

  py::enum_<fairrec::TimestampWeighting>(m, "TimestampWeighting")
      .value("RAW", fairrec::TimestampWeighting::kRaw)
      .value("MINMAX_RECENCY", fairrec::TimestampWeighting::kMinMaxRecency);

  py::class_<fairrec::IngestConfig>(m, "IngestConfig")
      .def(py::init<>())
      .def_readwrite("format", &fairrec::IngestConfig::format)
      .def_readwrite("interactions_path",
                     &fairrec::IngestConfig::interactions_path)
      .def_readwrite("users_path", &fairrec::IngestConfig::users_path)
      .def_readwrite("categories_path", &fairrec::IngestConfig::categories_path)
      .def_readwrite("k_core", &fairrec::IngestConfig::k_core)
      .def_readwrite("split", &fairrec::IngestConfig::split)
      .def_readwrite("train_fraction", &fairrec::IngestConfig::train_fraction)
      .def_readwrite("keep_unknown_genre",
                     &fairrec::IngestConfig::keep_unknown_genre);

  py::class_<fairrec::TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("model", &fairrec::TrainConfig::model)
      .def_readwrite("dim", &fairrec::TrainConfig::dim)
      .def_readwrite("epochs", &fairrec::TrainConfig::epochs)
      .def_readwrite("learning_rate", &fairrec::TrainConfig::learning_rate)
      .def_readwrite("regularization", &fairrec::TrainConfig::regularization)
      .def_readwrite("confidence_weight",
                     &fairrec::TrainConfig::confidence_weight)
      .def_readwrite("seed", &fairrec::TrainConfig::seed)
      .def_readwrite("threads", &fairrec::TrainConfig::threads);

  py::class_<fairrec::RerankConfig>(m, "RerankConfig")
      .def(py::init<>())
      .def_readwrite("beta", &fairrec::RerankConfig::beta)
      .def_readwrite("gamma", &fairrec::RerankConfig::gamma)
      .def_readwrite("alpha", &fairrec::RerankConfig::alpha)
      .def_readwrite("k", &fairrec::RerankConfig::k)
      .def_readwrite("top_n", &fairrec::RerankConfig::top_n)
      .def_readwrite("normalization", &fairrec::RerankConfig::normalization)
      .def_readwrite("timestamp_weighting",
                     &fairrec::RerankConfig::timestamp_weighting)
      .def_readwrite("profile_smoothing",
                     &fairrec::RerankConfig::profile_smoothing)
      .def_readwrite("threads", &fairrec::RerankConfig::threads);

  py::class_<fairrec::Dataset>(m, "Dataset")
      .def_property_readonly("num_users", &fairrec::Dataset::num_users)
      .def_property_readonly("num_items", &fairrec::Dataset::num_items)
      .def_property_readonly("num_interactions",
                             [](const fairrec::Dataset& d) {
                               return d.interactions.size();
                             })
      .def_property_readonly("num_categories",
                             [](const fairrec::Dataset& d) {
                               return d.catalog.num_categories();
                             })
      .def_property_readonly("category_names",
                             [](const fairrec::Dataset& d) {
                               return d.catalog.names;
                             })
      .def_property_readonly("attribute_names",
                             [](const fairrec::Dataset& d) {
                               std::vector<std::string> names;
                               for (const auto& a : d.attributes.attributes)
                                 names.push_back(a.name);
                               return names;
                             })
      .def("train_items_of_user",
           [](const fairrec::Dataset& d, int user) {
             return d.train_items_of_user.at(static_cast<std::size_t>(user));
           })
      .def("test_items_of_user", [](const fairrec::Dataset& d, int user) {
        return d.test_items_of_user.at(static_cast<std::size_t>(user));
      });

  py::class_<fairrec::FactorModel>(m, "FactorModel")
      .def("predict", &fairrec::FactorModel::predict)
      .def_property_readonly("dim", [](const fairrec::FactorModel& f) {
        return f.user_factors.cols();
      });

  py::class_<fairrec::TrainResult>(m, "TrainResult")
      .def_readonly("model", &fairrec::TrainResult::model)
      .def_readonly("objective_per_epoch",
                    &fairrec::TrainResult::objective_per_epoch);

  py::class_<fairrec::ScoreSet>(m, "ScoreSet")
      .def("items_of_user",
           [](const fairrec::ScoreSet& s, int user) {
             std::vector<std::pair<int, double>> out;
             for (const fairrec::ScoredItem& it :
                  s.candidates.at(static_cast<std::size_t>(user)))
               out.emplace_back(it.item, it.score);
             return out;
           })
      .def_property_readonly("num_users", [](const fairrec::ScoreSet& s) {
        return s.candidates.size();
      });

  py::class_<fairrec::CounterfactualProfile>(m, "CounterfactualProfile")
      .def_readonly("attribute", &fairrec::CounterfactualProfile::attribute)
      .def_readonly("classes", &fairrec::CounterfactualProfile::classes)
      .def_readonly("o_of_class", &fairrec::CounterfactualProfile::o_of_class)
      .def("for_user", [](const fairrec::CounterfactualProfile& p, int user) {
        return p.for_user(user);
      });

  py::class_<fairrec::RankedList>(m, "RankedList")
      .def_readonly("user", &fairrec::RankedList::user)
      .def_readonly("items", &fairrec::RankedList::items);

  py::class_<fairrec::ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("ingest", &fairrec::ExperimentConfig::ingest)
      .def_readwrite("train", &fairrec::ExperimentConfig::train)
      .def_readwrite("rerank", &fairrec::ExperimentConfig::rerank)
      .def_readwrite("external_scores",
                     &fairrec::ExperimentConfig::external_scores)
      .def_readwrite("attributes", &fairrec::ExperimentConfig::attributes)
      .def_readwrite("output_dir", &fairrec::ExperimentConfig::output_dir)
      .def_readwrite("write_lists", &fairrec::ExperimentConfig::write_lists)
      .def_readwrite("threads", &fairrec::ExperimentConfig::threads);

  m.def("ingest", &fairrec::ingest, py::arg("config"));
  m.def("write_dataset_bundle", &fairrec::write_dataset_bundle,
        py::arg("dataset"), py::arg("config"), py::arg("directory"));
  m.def("read_dataset_bundle", &fairrec::read_dataset_bundle,
        py::arg("directory"));
  m.def("train", &fairrec::train, py::arg("dataset"), py::arg("config"));
  m.def("score_candidates", &fairrec::score_candidates, py::arg("model"),
        py::arg("dataset"), py::arg("top_n") = 0, py::arg("threads") = 1);
  m.def("export_scores", &fairrec::export_scores, py::arg("scores"),
        py::arg("dataset"), py::arg("path"));
  m.def("load_external_scores", &fairrec::load_external_scores,
        py::arg("path"), py::arg("dataset"), py::arg("top_n") = 0);
  m.def("build_counterfactual_profile", &fairrec::build_counterfactual_profile,
        py::arg("dataset"), py::arg("attribute"), py::arg("config"));
  m.def(
      "history_distribution",
      [](const fairrec::Dataset& dataset, int user,
         fairrec::TimestampWeighting weighting) {
        return fairrec::history_distribution(user, dataset, weighting);
      },
      py::arg("dataset"), py::arg("user"),
      py::arg("weighting") = fairrec::TimestampWeighting::kRaw);
  m.def(
      "recommended_category_proportion",
      [](const std::vector<fairrec::ItemId>& items,
         const fairrec::Dataset& dataset, double gamma) {
        return fairrec::recommended_category_proportion(items, dataset.catalog,
                                                        gamma);
      },
      py::arg("items"), py::arg("dataset"), py::arg("gamma"));
  m.def("kl_divergence", &fairrec::kl_divergence, py::arg("target"),
        py::arg("recommended"), py::arg("alpha"));
  m.def(
      "greedy_rerank",
      [](int user, const std::vector<std::pair<int, double>>& candidates,
         const fairrec::CounterfactualProfile& profile,
         const fairrec::Dataset& dataset, const fairrec::RerankConfig& config) {
        std::vector<fairrec::ScoredItem> pool;
        pool.reserve(candidates.size());
        for (const auto& [item, score] : candidates)
          pool.push_back({item, score});
        return fairrec::greedy_rerank(user, pool, profile, dataset.catalog,
                                      config);
      },
      py::arg("user"), py::arg("candidates"), py::arg("profile"),
      py::arg("dataset"), py::arg("config"));
  m.def(
      "rerank_all",
      [](const fairrec::ScoreSet& scores,
         const fairrec::CounterfactualProfile& profile,
         const fairrec::Dataset& dataset, const fairrec::RerankConfig& config) {
        return fairrec::rerank_all(scores, profile, dataset.catalog, config);
      },
      py::arg("scores"), py::arg("profile"), py::arg("dataset"),
      py::arg("config"));
  m.def(
      "baseline_topk",
      [](const fairrec::ScoreSet& scores, int k) {
        return fairrec::baseline_topk(scores, k);
      },
      py::arg("scores"), py::arg("k"));
  m.def(
      "bias_report",
      [](const std::vector<fairrec::RankedList>& lists,
         const fairrec::Dataset& dataset, const std::string& attribute) {
        std::vector<fairrec::UserId> all_users(
            static_cast<std::size_t>(dataset.num_users()));
        for (std::size_t u = 0; u < all_users.size(); ++u)
          all_users[u] = static_cast<fairrec::UserId>(u);
        fairrec::AttributePartition part = fairrec::partition_by_attribute(
            all_users, dataset.attributes, attribute);
        fairrec::TopkLists topk = fairrec::to_topk_lists(
            lists, static_cast<std::int32_t>(dataset.num_users()));
        fairrec::BiasReport report =
            fairrec::bias_report(part, topk, dataset.catalog);
        return json_to_py(nlohmann::json::parse(
            fairrec::bias_report_json(report, dataset.catalog.names)));
      },
      py::arg("lists"), py::arg("dataset"), py::arg("attribute"));
  m.def(
      "accuracy_report",
      [](const std::vector<fairrec::RankedList>& lists,
         const fairrec::Dataset& dataset, int k) {
        fairrec::TopkLists topk = fairrec::to_topk_lists(
            lists, static_cast<std::int32_t>(dataset.num_users()));
        fairrec::AccuracyReport report =
            fairrec::accuracy_report(topk, dataset, k);
        return json_to_py(
            nlohmann::json::parse(fairrec::accuracy_report_json(report)));
      },
      py::arg("lists"), py::arg("dataset"), py::arg("k"));
  m.def(
      "run_experiment",
      [](const fairrec::ExperimentConfig& config) {
        fairrec::RunResult result = fairrec::run_experiment(config);
        py::dict out;
        out["run_dir"] = result.run_dir;
        py::list rows;
        for (const fairrec::AttributeResult& r : result.results) {
          py::dict row;
          row["attribute"] = r.attribute;
          row["original_ndcg"] = r.original.accuracy.ndcg;
          row["fair_ndcg"] = r.fair.accuracy.ndcg;
          row["original_hit_ratio"] = r.original.accuracy.hit_ratio;
          row["fair_hit_ratio"] = r.fair.accuracy.hit_ratio;
          row["original_cc_bias"] = r.original.bias.total_cc_bias;
          row["fair_cc_bias"] = r.fair.bias.total_cc_bias;
          row["original_cdcg_bias"] = r.original.bias.total_cdcg_bias;
          row["fair_cdcg_bias"] = r.fair.bias.total_cdcg_bias;
          rows.append(row);
        }
        out["results"] = rows;
        return out;
      },
      py::arg("config"));
  m.def(
      "sweep",
      [](const fairrec::ExperimentConfig& config, const std::string& parameter,
         const std::vector<double>& grid) {
        py::list rows;
        for (const fairrec::SweepPoint& p :
             fairrec::sweep(config, parameter, grid)) {
          py::dict row;
          row["parameter"] = p.parameter;
          row["value"] = p.value;
          row["attribute"] = p.attribute;
          row["ndcg"] = p.ndcg;
          row["hit_ratio"] = p.hit_ratio;
          row["cc_bias"] = p.cc_bias;
          row["cdcg_bias"] = p.cdcg_bias;
          rows.append(row);
        }
        return rows;
      },
      py::arg("config"), py::arg("parameter"), py::arg("grid"));
  m.def("emit_report", &fairrec::emit_report, py::arg("run_dir"));
  m.def("generate_ml100k_files", &fairrec::generate_ml100k_files,
        py::arg("config"), py::arg("directory"));
  m.def(
      "ensure_ml100k_dir",
      [](const std::string& cache_dir) {
        return fairrec::ensure_ml100k_dir(cache_dir);
      },
      py::arg("cache_dir"));

  py::class_<fairrec::SyntheticConfig>(m, "SyntheticConfig")
      .def(py::init<>())
      .def_static("ml100k", &fairrec::SyntheticConfig::ml100k)
      .def_static("small", &fairrec::SyntheticConfig::small)
      .def_readwrite("seed", &fairrec::SyntheticConfig::seed);
}
