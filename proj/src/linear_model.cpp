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

#include "chromatic/linear_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "chromatic/hashing.hpp"

namespace chromatic {
namespace {

constexpr double kEpsilon = 1e-8;
constexpr double kClip = 1e-7;

double sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

double clipped_loss(double p, std::uint8_t label) {
  p = std::clamp(p, kClip, 1.0 - kClip);
  return label ? -std::log(p) : -std::log(1.0 - p);
}

}  // namespace

LogisticModel::LogisticModel(std::uint32_t dim, LogisticConfig config)
    : dim_(dim),
      config_(config),
      weights_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim) + 1)),
      grad_sq_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim) + 1)) {
  if (!(config.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be > 0");
}

double LogisticModel::margin(const EncodedRow& row) const {
  double z = weights_[dim_];
  for (std::size_t i = 0; i < row.indices.size(); ++i) {
    if (row.indices[i] >= dim_) {
      throw std::out_of_range("feature index " + std::to_string(row.indices[i]) +
                              " outside model dimension " + std::to_string(dim_));
    }
    z += weights_[row.indices[i]] * row.values[i];
  }
  return z;
}

double LogisticModel::predict(const EncodedRow& row) const { return sigmoid(margin(row)); }

double LogisticModel::update(const EncodedRow& row) {
  const double z = margin(row);
  if (!std::isfinite(z)) {
    throw TrainingDiverged("logistic training diverged: non-finite margin");
  }
  const double p = sigmoid(z);
  const double loss = clipped_loss(p, row.label);
  const double g = p - static_cast<double>(row.label);
  auto step = [&](Eigen::Index j, double gj) {
    gj += config_.l2 * weights_[j];
    grad_sq_[j] += gj * gj;
    weights_[j] -= config_.learning_rate * gj / std::sqrt(grad_sq_[j] + kEpsilon);
  };
  for (std::size_t i = 0; i < row.indices.size(); ++i) {
    step(row.indices[i], g * row.values[i]);
  }
  step(dim_, g);
  if (!std::isfinite(loss) || !std::isfinite(weights_[dim_])) {
    std::ostringstream msg;
    msg << "logistic training diverged: loss=" << loss << " bias=" << weights_[dim_]
        << " nnz=" << row.indices.size();
    throw TrainingDiverged(msg.str());
  }
  return loss;
}

nlohmann::json LogisticModel::to_json() const {
  return {{"dim", dim_},
          {"learning_rate", config_.learning_rate},
          {"epochs", config_.epochs},
          {"l2", config_.l2},
          {"shuffle", config_.shuffle},
          {"seed", config_.seed},
          {"weights", std::vector<double>(weights_.begin(), weights_.end())}};
}

LogisticModel LogisticModel::from_json(const nlohmann::json& j) {
  LogisticConfig config;
  config.learning_rate = j.at("learning_rate").get<double>();
  config.epochs = j.at("epochs").get<std::uint32_t>();
  config.l2 = j.at("l2").get<double>();
  config.shuffle = j.at("shuffle").get<bool>();
  config.seed = j.at("seed").get<std::uint64_t>();
  LogisticModel model(j.at("dim").get<std::uint32_t>(), config);
  const auto w = j.at("weights").get<std::vector<double>>();
  if (w.size() != static_cast<std::size_t>(model.weights_.size())) {
    throw std::runtime_error("model weight count does not match its dimension");
  }
  model.weights_ = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
  return model;
}

LogisticModel train_logistic(std::span<const EncodedRow> rows, std::uint32_t dim,
                             const LogisticConfig& config) {
  LogisticModel model(dim, config);
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(config.seed);
  for (std::uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle) {
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[uniform_below(rng, i)]);
      }
    }
    for (std::size_t i : order) model.update(rows[i]);
  }
  return model;
}

double log_loss(const LogisticModel& model, std::span<const EncodedRow> rows) {
  if (rows.empty()) throw std::invalid_argument("log loss of an empty set");
  double total = 0.0;
  for (const EncodedRow& row : rows) total += clipped_loss(model.predict(row), row.label);
  return total / static_cast<double>(rows.size());
}

double log_loss(std::span<const double> probabilities, std::span<const std::uint8_t> labels) {
  if (probabilities.empty()) throw std::invalid_argument("log loss of an empty set");
  if (probabilities.size() != labels.size()) {
    throw std::invalid_argument("probability and label counts differ");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    total += clipped_loss(probabilities[i], labels[i]);
  }
  return total / static_cast<double>(labels.size());
}

double accuracy(const LogisticModel& model, std::span<const EncodedRow> rows) {
  if (rows.empty()) throw std::invalid_argument("accuracy of an empty set");
  std::size_t correct = 0;
  for (const EncodedRow& row : rows) {
    correct += (model.predict(row) >= 0.5) == (row.label == 1);
  }
  return static_cast<double>(correct) / static_cast<double>(rows.size());
}

}  // namespace chromatic
