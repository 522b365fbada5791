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
#include <random>
#include <vector>

#include "chromatic/fidelity.hpp"
#include "doctest.h"
#include "oracles.hpp"

namespace chromatic {
namespace {

TEST_SUITE("fidelity") {

TEST_CASE("good-turing recursion") {
  EdgeHistogram h;
  h.add(1, 3);
  h.add(2, 1);
  CHECK(good_turing(h, 1) == 3);
  CHECK(good_turing(h, 2) == 5);
  CHECK(good_turing(h, 3) == 5);
  CHECK(good_turing(EdgeHistogram{}, 2) == 0);
}

TEST_CASE("good-turing equals the leave-one-out count") {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 60; ++trial) {
    const SparseDataset ds = oracle::random_dataset(rng, 1 + rng() % 50, 1 + rng() % 30, 6, 0,
                                                    0.5 * (trial % 3));
    const EdgeHistogram h = build_cooccurrence(ds).histogram;
    for (std::uint32_t k : {1u, 2u, 3u}) {
      CHECK(good_turing(h, k) == oracle::leave_one_out_new_edges(ds, k));
    }
  }
}

TEST_CASE("collision count") {
  const Coloring c({{1, {0, 1}}, {2, {0, 1}}, {3, {1, 1}}});
  const std::vector<FeatureId> t{1, 2, 3};
  CHECK(collision_count(c, t).collisions == 1);
  const std::vector<FeatureId> distinct{1, 3};
  CHECK(collision_count(c, distinct).collisions == 0);
  const std::vector<FeatureId> with_unseen{1, 2, 8, 9};
  const CollisionCount u = collision_count(c, with_unseen);
  CHECK(u.collisions == 1);
  CHECK(u.unseen == 2);
}

TEST_CASE("new edge count") {
  const std::vector<FeatureId> ids{1, 2, 3};
  const std::vector<Edge> edges{{1, 2}};
  const CooccurrenceGraph g = to_adjacency(edges, ids);
  const std::vector<FeatureId> seen{1, 2};
  CHECK(new_edge_count(g, seen) == 0);
  const std::vector<FeatureId> fresh{1, 4};
  CHECK(new_edge_count(g, fresh) == 1);
  const std::vector<FeatureId> three{1, 2, 3};
  CHECK(new_edge_count(g, three) == 2);
}

TEST_CASE("color budget formula") {
  const ColorBudget b = required_colors({1, 0, 0, 10000, 1, 2});
  CHECK(b.raw == doctest::Approx(1.0 + 4.0 * std::log(100.0) / 100.0));
  CHECK(b.ceiled == 2);

  const ColorBudget only_w = required_colors({5, 0, 0, 1, 1, 0});
  CHECK(only_w.raw == doctest::Approx(5.0));
  CHECK(only_w.ceiled == 5);

  const ColorBudget big_n = required_colors({3, 4, 10, 100000000000ULL, 2, 5});
  CHECK(big_n.raw == doctest::Approx(11.0).epsilon(1e-4));
  CHECK_THROWS_AS(required_colors({1, 0, 0, 1, 1, 1}, 0.0), std::invalid_argument);
}

TEST_CASE("fidelity report rows") {
  std::mt19937_64 rng(3);
  const SparseDataset train = oracle::random_dataset(rng, 400, 150, 8, 1, 1.0);
  const SparseDataset test = oracle::random_dataset(rng, 100, 150, 8, 1, 1.0);
  FidelityOptions opts;
  opts.thresholds = {1, 2};
  const FidelityReport r = fidelity_report(train, test, opts);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.n == 400);
  CHECK(r.rows[0].edges >= r.rows[1].edges);
  CHECK(r.rows[0].delta >= r.rows[1].delta);
  CHECK(r.rows[0].held_out >= 2 * static_cast<std::size_t>(r.rows[0].delta_f));
  CHECK(r.rows[0].good_turing_per_example <= r.rows[1].good_turing_per_example);
  const auto j = to_json(r);
  CHECK(j["rows"].size() == 2);
}

}  // TEST_SUITE

}  // namespace
}  // namespace chromatic
