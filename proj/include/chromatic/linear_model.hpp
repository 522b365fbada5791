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
#include <span>
#include <stdexcept>
#include <string>

#include "chromatic/encoders.hpp"
#include "json.hpp"

namespace chromatic {

struct LogisticConfig {
  double learning_rate = 0.5;
  std::uint32_t epochs = 1;
  double l2 = 0.0;
  // Examples are consumed in dataset order unless shuffle is set, in which
  // case each epoch uses a permutation drawn from `seed`.
  bool shuffle = false;
  std::uint64_t seed = 0;
};

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Logistic regression with per-coordinate adaptive steps:
//   w_j <- w_j - lr * g_j / sqrt(G_j + 1e-8),  G_j = running sum of g_j^2.
// The bias is the last coordinate.
class LogisticModel {
 public:
  LogisticModel() = default;
  LogisticModel(std::uint32_t dim, LogisticConfig config);

  std::uint32_t dim() const { return dim_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  const LogisticConfig& config() const { return config_; }

  double margin(const EncodedRow& row) const;
  double predict(const EncodedRow& row) const;

  // One online update; returns the example's loss before the update.
  double update(const EncodedRow& row);

  nlohmann::json to_json() const;
  static LogisticModel from_json(const nlohmann::json& j);

 private:
  std::uint32_t dim_ = 0;
  LogisticConfig config_;
  Eigen::VectorXd weights_;
  Eigen::VectorXd grad_sq_;
};

LogisticModel train_logistic(std::span<const EncodedRow> rows, std::uint32_t dim,
                             const LogisticConfig& config = {});

// Mean -[y ln p + (1-y) ln(1-p)] with p clipped to [1e-7, 1 - 1e-7].
// Throws std::invalid_argument on an empty set.
double log_loss(const LogisticModel& model, std::span<const EncodedRow> rows);
double log_loss(std::span<const double> probabilities, std::span<const std::uint8_t> labels);
double accuracy(const LogisticModel& model, std::span<const EncodedRow> rows);

}  // namespace chromatic
