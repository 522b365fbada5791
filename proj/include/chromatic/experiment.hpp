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
#include <memory>
#include <optional>
#include <string>

#include "chromatic/color_stats.hpp"
#include "chromatic/coloring.hpp"
#include "chromatic/dataset.hpp"
#include "chromatic/encoders.hpp"
#include "chromatic/linear_model.hpp"
#include "json.hpp"

namespace chromatic {

struct ExperimentConfig {
  EncoderKind encoder = EncoderKind::kChromaticSubmodular;
  std::uint32_t budget = 64;
  CollisionPolicy policy = CollisionPolicy::kDropMorePopular;
  // Share of training rows (by example hash) used for label statistics by
  // the label-aware encoders; the model is fit on the remaining rows.
  double estimate_ratio = 0.5;
  // Estimate statistics and fit the model on the same full training set.
  bool double_dip = false;
  double target_smoothing = 20.0;
  std::uint64_t hashing_seed = 0;
  LogisticConfig logistic;
};

struct ExperimentResult {
  EncoderKind encoder = EncoderKind::kChromaticSubmodular;
  std::uint32_t budget = 0;
  std::uint32_t output_dim = 0;
  std::size_t fit_rows = 0;
  std::size_t estimate_rows = 0;
  // Log loss on the rows the model was trained on, after training.
  double train_loss = 0.0;
  double test_loss = 0.0;
  double test_accuracy = 0.0;
  // Mutual-information objective of the splitter solution (CL+SM only).
  std::optional<double> objective;
};

bool uses_label_statistics(EncoderKind kind);
bool needs_coloring(EncoderKind kind);

// Builds the encoder for one configuration. Label-aware encoders read their
// statistics from `estimate`; the others look at `fit`.
Encoder fit_encoder(const ExperimentConfig& config, std::shared_ptr<const Coloring> coloring,
                    const SparseDataset& estimate, const SparseDataset& fit);

// Splits `train`, fits the encoder and a logistic model, and scores `test`.
// Throws BudgetError when the budget cannot hold the coloring.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                std::shared_ptr<const Coloring> coloring,
                                const SparseDataset& train, const SparseDataset& test);

nlohmann::json to_json(const ExperimentResult& result);

}  // namespace chromatic
