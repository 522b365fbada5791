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

#include "chromatic/dataset.hpp"
#include "json.hpp"

namespace chromatic {

// Planted-structure generator. Features are partitioned into `groups`
// mutually exclusive groups (the latent colors): an example draws between
// min_nnz and max_nnz distinct groups and one feature from each, with
// Zipf-distributed popularity inside a group. Each feature carries a logit
// effect = group offset + feature noise; labels are Bernoulli(sigmoid(bias +
// sum of effects)), then flipped with probability label_noise.
struct SyntheticConfig {
  std::uint32_t groups = 64;
  std::uint32_t features = 100000;
  std::uint32_t examples = 200000;
  std::uint32_t min_nnz = 1;
  std::uint32_t max_nnz = 10;
  double zipf_exponent = 0.6;
  double group_effect_scale = 0.5;
  double feature_effect_scale = 1.0;
  double bias = -1.0;
  double label_noise = 0.0;
  std::uint64_t seed = 1;

  void validate() const;
  nlohmann::json to_json() const;
  static SyntheticConfig from_json(const nlohmann::json& j);
};

SparseDataset generate_planted(const SyntheticConfig& config);

// Latent group of a generated feature id (the inverse of the id scramble).
std::uint32_t planted_group(const SyntheticConfig& config, FeatureId feature);

}  // namespace chromatic
