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

#include "chromatic/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "chromatic/hashing.hpp"

namespace chromatic {
namespace {

double standard_normal(std::mt19937_64& rng) {
  // Box-Muller; keeps the stream independent of the standard library.
  const double u1 = 1.0 - uniform_unit(rng);
  const double u2 = uniform_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::uint32_t features_per_group(const SyntheticConfig& c) { return c.features / c.groups; }

// Feature ids are the raw slot (group * per_group + rank) passed through a
// fixed odd-multiplier bijection of the 32-bit range, offset by one so 0 is
// never used.
constexpr std::uint64_t kScramble = 0x9e3779b1ULL;
constexpr std::uint64_t kUnscramble = 0x0e8b2f51ULL;  // inverse of kScramble mod 2^32

FeatureId scramble(std::uint64_t slot) { return ((slot * kScramble) & 0xffffffffULL) + 1; }
std::uint64_t unscramble(FeatureId id) { return ((id - 1) * kUnscramble) & 0xffffffffULL; }

}  // namespace

void SyntheticConfig::validate() const {
  if (groups < 1) throw std::invalid_argument("synthetic: groups must be >= 1");
  if (features < groups) {
    throw std::invalid_argument("synthetic: need at least one feature per group");
  }
  if (min_nnz < 1 || min_nnz > max_nnz) {
    throw std::invalid_argument("synthetic: need 1 <= min_nnz <= max_nnz");
  }
  if (max_nnz > groups) throw std::invalid_argument("synthetic: max_nnz cannot exceed groups");
  if (zipf_exponent < 0.0) throw std::invalid_argument("synthetic: zipf exponent must be >= 0");
  if (!(label_noise >= 0.0 && label_noise < 0.5)) {
    throw std::invalid_argument("synthetic: label noise must lie in [0, 0.5)");
  }
}

nlohmann::json SyntheticConfig::to_json() const {
  return {{"groups", groups},
          {"features", features},
          {"examples", examples},
          {"min_nnz", min_nnz},
          {"max_nnz", max_nnz},
          {"zipf_exponent", zipf_exponent},
          {"group_effect_scale", group_effect_scale},
          {"feature_effect_scale", feature_effect_scale},
          {"bias", bias},
          {"label_noise", label_noise},
          {"seed", seed}};
}

SyntheticConfig SyntheticConfig::from_json(const nlohmann::json& j) {
  SyntheticConfig c;
  c.groups = j.value("groups", c.groups);
  c.features = j.value("features", c.features);
  c.examples = j.value("examples", c.examples);
  c.min_nnz = j.value("min_nnz", c.min_nnz);
  c.max_nnz = j.value("max_nnz", c.max_nnz);
  c.zipf_exponent = j.value("zipf_exponent", c.zipf_exponent);
  c.group_effect_scale = j.value("group_effect_scale", c.group_effect_scale);
  c.feature_effect_scale = j.value("feature_effect_scale", c.feature_effect_scale);
  c.bias = j.value("bias", c.bias);
  c.label_noise = j.value("label_noise", c.label_noise);
  c.seed = j.value("seed", c.seed);
  c.validate();
  return c;
}

std::uint32_t planted_group(const SyntheticConfig& config, FeatureId feature) {
  return static_cast<std::uint32_t>(unscramble(feature) / features_per_group(config));
}

SparseDataset generate_planted(const SyntheticConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  const std::uint32_t per_group = features_per_group(config);

  std::vector<double> cdf(per_group);
  double acc = 0.0;
  for (std::uint32_t r = 0; r < per_group; ++r) {
    acc += std::pow(static_cast<double>(r + 1), -config.zipf_exponent);
    cdf[r] = acc;
  }
  for (double& v : cdf) v /= acc;

  std::vector<double> group_effect(config.groups);
  for (double& g : group_effect) g = config.group_effect_scale * standard_normal(rng);
  std::vector<double> effect(static_cast<std::size_t>(config.groups) * per_group);
  for (std::size_t slot = 0; slot < effect.size(); ++slot) {
    effect[slot] = group_effect[slot / per_group] +
                   config.feature_effect_scale * standard_normal(rng);
  }

  SparseDataset ds;
  ds.reserve(config.examples);
  std::vector<std::uint32_t> groups(config.groups);
  for (std::uint32_t i = 0; i < config.examples; ++i) {
    const auto nnz = static_cast<std::uint32_t>(
        config.min_nnz + uniform_below(rng, config.max_nnz - config.min_nnz + 1));
    std::iota(groups.begin(), groups.end(), 0u);
    Example ex;
    double logit = config.bias;
    for (std::uint32_t j = 0; j < nnz; ++j) {
      std::swap(groups[j], groups[j + uniform_below(rng, config.groups - j)]);
      const double u = uniform_unit(rng);
      const auto rank = static_cast<std::uint32_t>(
          std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      const std::uint64_t slot = static_cast<std::uint64_t>(groups[j]) * per_group +
                                 std::min(rank, per_group - 1);
      ex.active.push_back(scramble(slot));
      logit += effect[slot];
    }
    std::sort(ex.active.begin(), ex.active.end());
    bool label = uniform_unit(rng) < sigmoid(logit);
    if (uniform_unit(rng) < config.label_noise) label = !label;
    ex.label = label ? 1 : 0;
    ds.add(std::move(ex));
  }
  return ds;
}

}  // namespace chromatic
