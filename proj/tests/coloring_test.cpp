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
#include <sstream>
#include <vector>

#include "chromatic/coloring.hpp"
#include "doctest.h"
#include "oracles.hpp"

namespace chromatic {
namespace {

CooccurrenceGraph make_graph(std::vector<FeatureId> ids, std::vector<Edge> edges) {
  return to_adjacency(edges, ids);
}

CooccurrenceGraph triangle() { return make_graph({1, 2, 3}, {{1, 2}, {1, 3}, {2, 3}}); }
CooccurrenceGraph star() {
  return make_graph({0, 1, 2, 3, 4, 5}, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
}

FeatureFrequency unit_popularity(const CooccurrenceGraph& g) {
  FeatureFrequency f;
  for (FeatureId id : g.vertex_ids()) f[id] = 1;
  return f;
}

TEST_SUITE("coloring") {

TEST_CASE("greedy first fit") {
  const CooccurrenceGraph t = triangle();
  const Coloring c = greedy_color(t, GreedyOrder::kAscendingId, unit_popularity(t));
  CHECK(c.num_colors() == 3);
  CHECK(is_proper(t, c));

  const CooccurrenceGraph path = make_graph({1, 2, 3}, {{1, 2}, {2, 3}});
  const Coloring p = greedy_color(path, GreedyOrder::kAscendingId, unit_popularity(path));
  CHECK(p.color_of(1) == 0u);
  CHECK(p.color_of(2) == 1u);
  CHECK(p.color_of(3) == 0u);
  CHECK(p.num_colors() == 2);
  CHECK(p.color_of(99) == std::nullopt);
}

TEST_CASE("greedy respects the degree bound in every order") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const SparseDataset ds = oracle::random_dataset(rng, 200, 120, 9);
    const CooccurrenceGraph g = build_cooccurrence(ds).graph;
    for (GreedyOrder order : {GreedyOrder::kDataOrder, GreedyOrder::kAscendingId,
                              GreedyOrder::kDegreeDescending}) {
      const Coloring c = greedy_color(g, order, ds.feature_freq(), &ds);
      CHECK(is_proper(g, c));
      CHECK(c.num_colors() <= g.max_degree() + 1);
    }
  }
}

TEST_CASE("vertex orders") {
  const CooccurrenceGraph s = star();
  const auto by_degree = vertex_order(s, GreedyOrder::kDegreeDescending);
  CHECK(s.vertex_id(by_degree.front()) == 0);
  SparseDataset ds;
  Example ex;
  ex.active = {3, 4};
  ds.add(ex);
  ex.active = {0, 1};
  ds.add(ex);
  const auto by_data = vertex_order(s, GreedyOrder::kDataOrder, &ds);
  std::vector<FeatureId> ids;
  for (VertexIndex v : by_data) ids.push_back(s.vertex_id(v));
  CHECK(ids == std::vector<FeatureId>{3, 4, 0, 1, 2, 5});
}

TEST_CASE("largest-first order") {
  const CooccurrenceGraph s = star();
  const LargestFirstOrder lf = largest_first_order(s);
  CHECK(s.vertex_id(lf.order[0]) == 0);
  CHECK(lf.removal_degree[0] == 5);

  const CooccurrenceGraph t = triangle();
  const LargestFirstOrder tl = largest_first_order(t);
  std::vector<FeatureId> ids;
  for (VertexIndex v : tl.order) ids.push_back(t.vertex_id(v));
  CHECK(ids == std::vector<FeatureId>{1, 2, 3});
  CHECK(tl.removal_degree == std::vector<std::uint32_t>{2, 1, 0});
}

TEST_CASE("largest-first property holds against direct recomputation") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const CooccurrenceGraph g = oracle::random_graph(rng, 60, 0.05 + 0.01 * trial);
    const LargestFirstOrder lf = largest_first_order(g);
    REQUIRE(lf.order.size() == g.num_vertices());
    std::vector<bool> alive(g.num_vertices(), true);
    for (std::size_t i = 0; i < lf.order.size(); ++i) {
      const auto deg = oracle::induced_degrees(g, alive);
      std::uint32_t best = 0;
      for (VertexIndex v = 0; v < g.num_vertices(); ++v) {
        if (alive[v]) best = std::max(best, deg[v]);
      }
      CHECK(deg[lf.order[i]] == best);
      CHECK(lf.removal_degree[i] == best);
      alive[lf.order[i]] = false;
    }
  }
}

TEST_CASE("high-degree filtering") {
  const FilterResult s = filter_high_degree(star());
  CHECK(s.held_out == std::vector<FeatureId>{0});
  CHECK(s.delta_f == 0);

  const CooccurrenceGraph empty = make_graph({1, 2, 3}, {});
  const FilterResult e = filter_high_degree(empty);
  CHECK(e.held_out.empty());
  CHECK(e.delta_f == 0);
  CHECK(e.filtered_graph.num_vertices() == 3);

  const FilterResult t = filter_high_degree(triangle());
  CHECK(t.held_out.size() == 2);
  CHECK(t.delta_f == 0);
  CHECK(t.filtered_graph.num_vertices() == 1);
}

TEST_CASE("filtering returns the minimal qualifying prefix") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 15; ++trial) {
    const CooccurrenceGraph g = oracle::random_graph(rng, 80, 0.02 + 0.02 * trial);
    const LargestFirstOrder lf = largest_first_order(g);
    const FilterResult fr = filter_high_degree(g, lf);
    std::vector<bool> alive(g.num_vertices(), true);
    std::size_t expected = g.num_vertices();
    for (std::size_t w = 0; w <= g.num_vertices(); ++w) {
      const auto deg = oracle::induced_degrees(g, alive);
      std::uint32_t maxdeg = 0;
      for (VertexIndex v = 0; v < g.num_vertices(); ++v) {
        if (alive[v]) maxdeg = std::max(maxdeg, deg[v]);
      }
      if (w >= 2 * static_cast<std::size_t>(maxdeg)) {
        expected = w;
        CHECK(fr.delta_f == maxdeg);
        break;
      }
      alive[lf.order[w]] = false;
    }
    CHECK(fr.held_out.size() == expected);
    CHECK(fr.filtered_graph.max_degree() == fr.delta_f);
  }
}

TEST_CASE("glauber sampling stays proper") {
  const CooccurrenceGraph edge = make_graph({1, 2}, {{1, 2}});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const GlauberResult r = glauber_sample(edge, 2, 50, seed);
    CHECK(r.colors[0] != r.colors[1]);
    CHECK(r.colors[0] < 2);
    CHECK(r.colors[1] < 2);
  }
  std::mt19937_64 rng(8);
  const CooccurrenceGraph g = oracle::random_graph(rng, 100, 0.05);
  const std::uint32_t m = 2 * g.max_degree() + 1;
  const GlauberResult r = glauber_sample(g, m, 100000, 3);
  CHECK(is_proper(g, r.colors));
  CHECK(r.mixing_guaranteed);
  CHECK(glauber_sample(g, m, 100000, 3).colors == r.colors);
  CHECK_THROWS_AS(glauber_sample(g, g.max_degree(), 10, 3), std::invalid_argument);
  CHECK_FALSE(glauber_sample(g, g.max_degree() + 1, 10, 3).mixing_guaranteed);
}

TEST_CASE("glauber with a large palette samples uniformly") {
  // Two adjacent vertices, m = 70: every color of vertex 1 is equally likely.
  const CooccurrenceGraph edge = make_graph({1, 2}, {{1, 2}});
  const std::uint32_t m = 70;
  const int runs = 14000;
  std::vector<int> counts(m, 0);
  for (int r = 0; r < runs; ++r) {
    const GlauberResult g = glauber_sample(edge, m, 50, static_cast<std::uint64_t>(r));
    REQUIRE(g.colors[0] != g.colors[1]);
    ++counts[g.colors[0]];
  }
  const double expected = static_cast<double>(runs) / m;
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 99.9% quantile of chi-square with 69 degrees of freedom.
  CHECK(chi2 < 111.06);
}

TEST_CASE("zero glauber steps return the greedy start") {
  std::mt19937_64 rng(12);
  const CooccurrenceGraph g = oracle::random_graph(rng, 50, 0.1);
  const auto order = vertex_order(g, GreedyOrder::kAscendingId);
  const GlauberResult r = glauber_sample(g, g.max_degree() + 3, 0, 1);
  CHECK(r.colors == greedy_colors(g, order));
  CHECK(r.steps == 0);
}

TEST_CASE("default step count") {
  CHECK(default_glauber_steps(4, 3) == static_cast<std::uint64_t>(std::ceil(12 * std::log(3.0))));
  CHECK(default_glauber_steps(4, 1) == 1);
  CHECK(default_glauber_steps(4, 0) == 0);
  // (m - d) / (m - 2d) = 2 for m = 9, d = 3.
  CHECK(mixing_glauber_steps(9, 3, 100) ==
        static_cast<std::uint64_t>(std::ceil(2 * 100 * std::log(100.0))));
  CHECK(mixing_glauber_steps(6, 3, 100) == default_glauber_steps(6, 100));
  CHECK(mixing_glauber_steps(9, 3, 1) == 1);
}

TEST_CASE("combining a filtered coloring") {
  const CooccurrenceGraph s = star();
  const FilterResult fr = filter_high_degree(s);
  const FeatureFrequency pop = unit_popularity(s);
  const Coloring inner =
      greedy_color(fr.filtered_graph, GreedyOrder::kAscendingId, pop);
  CHECK(inner.num_colors() == 1);
  const Coloring combined = combine_filtered_coloring(fr, inner, pop);
  CHECK(combined.num_colors() == 2);
  CHECK(combined.color_of(0) == 1u);
  for (FeatureId leaf = 1; leaf <= 5; ++leaf) CHECK(combined.color_of(leaf) == 0u);

  const CooccurrenceGraph none = make_graph({1, 2}, {});
  const FilterResult nf = filter_high_degree(none);
  const Coloring ni = greedy_color(nf.filtered_graph, GreedyOrder::kAscendingId,
                                   unit_popularity(none));
  CHECK(combine_filtered_coloring(nf, ni, unit_popularity(none)) == ni);

  std::mt19937_64 rng(30);
  for (int trial = 0; trial < 10; ++trial) {
    const CooccurrenceGraph g = oracle::random_graph(rng, 120, 0.08);
    const FilterResult f = filter_high_degree(g);
    const GlauberResult r =
        glauber_sample(f.filtered_graph, 2 * f.delta_f + 1, 20000, trial);
    const Coloring in = Coloring::from_graph(f.filtered_graph, r.colors, unit_popularity(g));
    CHECK(is_proper(g, combine_filtered_coloring(f, in, unit_popularity(g))));
  }
}

TEST_CASE("coloring binary format round trips") {
  const CooccurrenceGraph t = triangle();
  const FeatureFrequency pop{{1, 4}, {2, 5}, {3, 6}};
  const Coloring c = greedy_color(t, GreedyOrder::kAscendingId, pop);
  std::stringstream s;
  write_coloring(s, c);
  const Coloring back = read_coloring(s, pop);
  CHECK(back == c);
  CHECK(back.popularity(2) == 5);
}

TEST_CASE("names of orders") {
  for (GreedyOrder o : {GreedyOrder::kDataOrder, GreedyOrder::kAscendingId,
                        GreedyOrder::kDegreeDescending}) {
    CHECK(greedy_order_from_string(to_string(o)) == o);
  }
  CHECK_THROWS_AS(greedy_order_from_string("random"), std::invalid_argument);
}

}  // TEST_SUITE

}  // namespace
}  // namespace chromatic
