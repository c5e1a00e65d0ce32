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
#include <string>

namespace fairrec {

// Generates a MovieLens-100K-layout dataset (u.data, u.item, u.user, u.genre)
// with a known 5-core: a dense core where every user has >= 20 interactions
// and every item >= 5, plus low-degree periphery items (degree <= 4) that the
// 5-core filter removes in one round. Raw counts therefore decompose exactly:
//   users          -> num_users (all survive)
//   items          -> num_core_items + num_periphery_items
//   interactions   -> num_core_interactions + periphery edges
// Attribute-linked genre preferences give user groups distinct category
// profiles so bias metrics have signal.
struct SyntheticConfig {
  std::int32_t num_users = 943;
  std::int32_t num_core_items = 1348;
  std::int32_t num_periphery_items = 334;
  std::int64_t num_core_interactions = 99278;
  std::int64_t num_periphery_interactions = 722;
  int min_user_degree = 20;
  int min_item_degree = 5;  // core items; periphery stays below this
  double popularity_exponent = 0.8;
  double gender_strength = 3.0;
  double age_strength = 2.0;
  double occupation_strength = 2.5;
  std::uint64_t seed = 7;

  void validate() const;

  static SyntheticConfig ml100k() { return SyntheticConfig{}; }
  static SyntheticConfig small();
};

// Writes the four files into directory (created if absent). Deterministic
// for a fixed config.
void generate_ml100k_files(const SyntheticConfig& config,
                           const std::string& directory);

// Returns a directory holding ML100K-layout files: $FAIRREC_ML100K_DIR when
// set, otherwise cache_dir, generating the synthetic fixture there on first
// use (a marker file keyed by the config makes regeneration idempotent).
std::string ensure_ml100k_dir(const std::string& cache_dir,
                              const SyntheticConfig& config =
                                  SyntheticConfig::ml100k());

}  // namespace fairrec
