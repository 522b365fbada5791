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

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "chromatic/color_stats.hpp"
#include "chromatic/coloring.hpp"
#include "chromatic/dataset.hpp"
#include "chromatic/submodular.hpp"
#include "json.hpp"

namespace chromatic {

enum class EncoderKind {
  kChromaticSubmodular,  // CL+SM
  kChromaticTarget,      // CL+TE
  kChromaticFrequency,   // CL+FT
  kFrequency,            // FT
  kHashing,              // HT
};
const char* to_string(EncoderKind kind);
EncoderKind encoder_kind_from_string(const std::string& name);

// Sparse output row. Indices are strictly increasing; the budgeted part lives
// in [0, output_dim) and dense passthrough features follow at output_dim + j.
struct EncodedRow {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;
  std::uint8_t label = 0;
};

struct SubmodularTable {
  SplitterSolution solution;
  std::unordered_map<FeatureId, std::uint32_t> index;  // feature -> bucket
};

struct TargetTable {
  std::unordered_map<FeatureId, double> value;  // smoothed positive rate
  double prior = 0.0;
  double smoothing = 0.0;
};

struct ColorFrequencyTable {
  std::unordered_map<FeatureId, std::uint32_t> index;
  std::vector<std::uint32_t> block_offset;  // per color, size m + 1
};

struct FrequencyTable {
  std::unordered_map<FeatureId, std::uint32_t> index;
};

struct HashingParams {
  std::uint64_t seed = 0;
  // Sign hash xi and bucket hash eta, derived independently from `seed`.
  std::uint32_t bucket(FeatureId f, std::uint32_t width) const;
  double sign(FeatureId f) const;
};

// One of the five budgeted transforms, built from training data only.
// Immutable once built; transform() is safe to call concurrently.
class Encoder {
 public:
  using Payload = std::variant<SubmodularTable, TargetTable, ColorFrequencyTable,
                               FrequencyTable, HashingParams>;

  Encoder(EncoderKind kind, std::uint32_t budget, std::uint32_t output_dim,
          std::uint32_t dense_dim, CollisionPolicy policy,
          std::shared_ptr<const Coloring> coloring, Payload payload);

  EncoderKind kind() const { return kind_; }
  std::uint32_t budget() const { return budget_; }
  std::uint32_t output_dim() const { return output_dim_; }
  std::uint32_t dense_dim() const { return dense_dim_; }
  std::uint32_t total_dim() const { return output_dim_ + dense_dim_; }
  CollisionPolicy policy() const { return policy_; }
  const Coloring* coloring() const { return coloring_.get(); }
  const Payload& payload() const { return payload_; }

  EncodedRow transform(const Example& ex) const;
  std::vector<EncodedRow> transform(const SparseDataset& ds) const;

  nlohmann::json to_json() const;
  static Encoder from_json(const nlohmann::json& j);

 private:
  void append_dense(const Example& ex, EncodedRow& row) const;

  EncoderKind kind_;
  std::uint32_t budget_;
  std::uint32_t output_dim_;
  std::uint32_t dense_dim_;
  CollisionPolicy policy_;
  std::shared_ptr<const Coloring> coloring_;
  Payload payload_;
};

// CL+SM. `stats` must come from the estimate half; the encoder is meant to be
// fit on the other half.
Encoder make_submodular_encoder(std::shared_ptr<const Coloring> coloring,
                                const ColorStats& stats, std::uint32_t budget,
                                CollisionPolicy policy, std::uint32_t dense_dim = 0);
Encoder make_submodular_encoder(std::shared_ptr<const Coloring> coloring,
                                SplitterSolution solution, std::uint32_t budget,
                                CollisionPolicy policy, std::uint32_t dense_dim = 0);

// CL+TE: value v of color i maps to (pos_v + smoothing * p) / (n_v + smoothing)
// with p the global positive rate; unseen values and absent colors map to p.
Encoder make_target_encoder(std::shared_ptr<const Coloring> coloring,
                            const ColorStats& stats, double smoothing,
                            CollisionPolicy policy, std::uint32_t dense_dim = 0);

// CL+FT: the `budget` most frequent (color, value) pairs after collision
// resolution, one-hot within per-color blocks.
Encoder make_cl_frequency_encoder(std::shared_ptr<const Coloring> coloring,
                                  const SparseDataset& train, std::uint32_t budget,
                                  CollisionPolicy policy);

// FT: the `budget` most frequent features, ties to the smaller id.
Encoder make_frequency_encoder(const SparseDataset& train, std::uint32_t budget);

// HT with `width` output coordinates.
Encoder make_hashing_encoder(std::uint32_t width, std::uint64_t seed,
                             std::uint32_t dense_dim = 0);

// phi(x) for a binary x given by its active set.
Eigen::VectorXd hashing_project(const HashingParams& params, std::uint32_t width,
                                std::span<const FeatureId> active);

}  // namespace chromatic
