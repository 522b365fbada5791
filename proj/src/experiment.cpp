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

#include "chromatic/experiment.hpp"

#include <stdexcept>
#include <utility>

#include "chromatic/submodular.hpp"

namespace chromatic {

bool uses_label_statistics(EncoderKind kind) {
  return kind == EncoderKind::kChromaticSubmodular || kind == EncoderKind::kChromaticTarget;
}

bool needs_coloring(EncoderKind kind) {
  return kind == EncoderKind::kChromaticSubmodular || kind == EncoderKind::kChromaticTarget ||
         kind == EncoderKind::kChromaticFrequency;
}

Encoder fit_encoder(const ExperimentConfig& config, std::shared_ptr<const Coloring> coloring,
                    const SparseDataset& estimate, const SparseDataset& fit) {
  if (needs_coloring(config.encoder) && !coloring) {
    throw std::invalid_argument(std::string("encoder ") + to_string(config.encoder) +
                                " needs a coloring");
  }
  const auto dense_dim = static_cast<std::uint32_t>(fit.dense_ids().size());
  switch (config.encoder) {
    case EncoderKind::kChromaticSubmodular: {
      const ColorStats stats = collect_color_stats(*coloring, estimate, config.policy);
      return make_submodular_encoder(std::move(coloring), stats, config.budget, config.policy,
                                     dense_dim);
    }
    case EncoderKind::kChromaticTarget: {
      const ColorStats stats = collect_color_stats(*coloring, estimate, config.policy);
      return make_target_encoder(std::move(coloring), stats, config.target_smoothing,
                                 config.policy, dense_dim);
    }
    case EncoderKind::kChromaticFrequency:
      return make_cl_frequency_encoder(std::move(coloring), fit, config.budget, config.policy);
    case EncoderKind::kFrequency:
      return make_frequency_encoder(fit, config.budget);
    case EncoderKind::kHashing:
      return make_hashing_encoder(config.budget, config.hashing_seed, dense_dim);
  }
  throw std::logic_error("unknown encoder kind");
}

ExperimentResult run_experiment(const ExperimentConfig& config,
                                std::shared_ptr<const Coloring> coloring,
                                const SparseDataset& train, const SparseDataset& test) {
  if (train.empty()) throw std::invalid_argument("empty training set");
  if (test.empty()) throw std::invalid_argument("empty test set");

  std::optional<HashSplit> split;
  if (uses_label_statistics(config.encoder) && !config.double_dip) {
    split = hash_split(train, config.estimate_ratio);
    if (split->fit_half.empty() || split->estimate_half.empty()) {
      throw std::invalid_argument("hash split left one half empty");
    }
  }
  const SparseDataset& estimate = split ? split->estimate_half : train;
  const SparseDataset& fit = split ? split->fit_half : train;

  const Encoder encoder = fit_encoder(config, std::move(coloring), estimate, fit);
  const std::vector<EncodedRow> fit_rows = encoder.transform(fit);
  const std::vector<EncodedRow> test_rows = encoder.transform(test);
  const LogisticModel model = train_logistic(fit_rows, encoder.total_dim(), config.logistic);

  ExperimentResult r;
  r.encoder = config.encoder;
  r.budget = config.budget;
  r.output_dim = encoder.output_dim();
  r.fit_rows = fit.size();
  r.estimate_rows = uses_label_statistics(config.encoder) ? estimate.size() : 0;
  r.train_loss = log_loss(model, fit_rows);
  r.test_loss = log_loss(model, test_rows);
  r.test_accuracy = accuracy(model, test_rows);
  if (const auto* table = std::get_if<SubmodularTable>(&encoder.payload())) {
    r.objective = table->solution.objective;
  }
  return r;
}

nlohmann::json to_json(const ExperimentResult& r) {
  nlohmann::json j{{"encoder", to_string(r.encoder)},
                   {"budget", r.budget},
                   {"output_dim", r.output_dim},
                   {"fit_rows", r.fit_rows},
                   {"estimate_rows", r.estimate_rows},
                   {"train_loss", r.train_loss},
                   {"test_loss", r.test_loss},
                   {"test_accuracy", r.test_accuracy}};
  if (r.objective) j["objective"] = *r.objective;
  return j;
}

}  // namespace chromatic
