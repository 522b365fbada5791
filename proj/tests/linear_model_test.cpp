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

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "chromatic/linear_model.hpp"
#include "doctest.h"

namespace chromatic {
namespace {

EncodedRow row(std::vector<std::uint32_t> idx, std::vector<double> val, std::uint8_t label) {
  return {std::move(idx), std::move(val), label};
}

TEST_SUITE("linear_model") {

TEST_CASE("log loss values") {
  const std::vector<double> half{0.5, 0.5};
  const std::vector<std::uint8_t> labels{1, 0};
  CHECK(log_loss(half, labels) == doctest::Approx(std::numbers::ln2));
  const std::vector<double> p{0.9, 0.2, 0.5};
  const std::vector<std::uint8_t> y{1, 0, 1};
  CHECK(log_loss(p, y) ==
        doctest::Approx(-(std::log(0.9) + std::log(0.8) + std::log(0.5)) / 3.0));
  const std::vector<double> perfect{1.0, 0.0};
  CHECK(log_loss(perfect, labels) == doctest::Approx(-std::log1p(-1e-7)));
  const std::vector<double> wrong{0.0};
  const std::vector<std::uint8_t> one{1};
  CHECK(log_loss(wrong, one) == doctest::Approx(-std::log(1e-7)));
  CHECK_THROWS_AS(log_loss(std::vector<double>{}, std::vector<std::uint8_t>{}),
                  std::invalid_argument);
}

TEST_CASE("all-negative labels drive predictions down") {
  std::vector<EncodedRow> rows;
  for (int i = 0; i < 200; ++i) rows.push_back(row({static_cast<std::uint32_t>(i % 3)}, {1.0}, 0));
  LogisticModel model(3, {});
  std::vector<double> previous(3, 1.0);
  for (const EncodedRow& r : rows) {
    model.update(r);
    for (std::uint32_t f = 0; f < 3; ++f) {
      const double p = model.predict(row({f}, {1.0}, 0));
      CHECK(p <= previous[f] + 1e-12);
      previous[f] = p;
    }
  }
  CHECK(log_loss(model, rows) < std::numbers::ln2);
}

TEST_CASE("empty rows learn the base rate through the bias") {
  std::vector<EncodedRow> rows;
  std::mt19937_64 rng(1);
  std::bernoulli_distribution coin(0.3);
  for (int i = 0; i < 20000; ++i) rows.push_back(row({}, {}, coin(rng) ? 1 : 0));
  LogisticConfig cfg;
  cfg.learning_rate = 0.05;
  const LogisticModel model = train_logistic(rows, 0, cfg);
  CHECK(model.predict(row({}, {}, 0)) == doctest::Approx(0.3).epsilon(0.1));
}

TEST_CASE("separable data is fit exactly") {
  std::vector<EncodedRow> train, test;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 600; ++i) {
    const double a = u(rng), b = u(rng);
    if (std::abs(a + b) < 0.1) continue;
    (i < 400 ? train : test).push_back(row({0, 1}, {a, b}, a + b > 0 ? 1 : 0));
  }
  LogisticConfig cfg;
  cfg.epochs = 5;
  const LogisticModel model = train_logistic(train, 2, cfg);
  CHECK(accuracy(model, test) == doctest::Approx(1.0));
}

TEST_CASE("training is deterministic and serializable") {
  std::vector<EncodedRow> rows;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    rows.push_back(row({static_cast<std::uint32_t>(rng() % 5)}, {1.0}, rng() % 2 ? 1 : 0));
  }
  LogisticConfig cfg;
  cfg.shuffle = true;
  cfg.seed = 7;
  cfg.epochs = 2;
  cfg.l2 = 1e-4;
  const LogisticModel a = train_logistic(rows, 5, cfg);
  const LogisticModel b = train_logistic(rows, 5, cfg);
  CHECK(a.weights() == b.weights());
  const LogisticModel c = LogisticModel::from_json(a.to_json());
  CHECK(c.weights() == a.weights());
  CHECK(c.predict(rows[0]) == a.predict(rows[0]));
  CHECK_THROWS(a.predict(row({9}, {1.0}, 0)));
}

TEST_CASE("non-finite inputs abort training") {
  const std::vector<EncodedRow> rows{row({0}, {std::numeric_limits<double>::infinity()}, 1)};
  CHECK_THROWS_AS(train_logistic(rows, 1), TrainingDiverged);
}

}  // TEST_SUITE

}  // namespace
}  // namespace chromatic
