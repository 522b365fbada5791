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
#include <span>
#include <vector>

#include "chromatic/coloring.hpp"
#include "chromatic/cooccurrence_graph.hpp"
#include "chromatic/dataset.hpp"
#include "json.hpp"

namespace chromatic {

// N^(k) = sum_{j=1..k} j * f(j): the number of (example, edge) incidences
// whose edge would be missing from G^(k) built without that example.
std::uint64_t good_turing(const EdgeHistogram& h, std::uint32_t k);

struct CollisionCount {
  // |T ∩ dom(c)| - |c(T ∩ dom(c))|
  std::size_t collisions = 0;
  // Active features the coloring has never seen; not part of `collisions`.
  std::size_t unseen = 0;
};
CollisionCount collision_count(const Coloring& c, std::span<const FeatureId> active);

// |K(T) \ E| for the graph's threshold.
std::size_t new_edge_count(const CooccurrenceGraph& g, std::span<const FeatureId> active);

struct ColorBudgetInputs {
  std::size_t held_out = 0;     // |W|
  std::uint32_t delta_f = 0;    // max degree after filtering
  std::uint64_t n_f = 0;        // Good-Turing N_f^(k) on the filtered graph
  std::uint64_t n = 1;          // training examples
  std::uint32_t k = 1;
  std::size_t eta = 0;          // max nnz
};

struct ColorBudget {
  double raw = 0.0;
  std::uint64_t ceiled = 0;
};
// m_f = |W| + 2 delta_f + N_f/n + k eta^2 ln(1/delta) / sqrt(n).
ColorBudget required_colors(const ColorBudgetInputs& in, double confidence_delta = 0.01);

struct CollisionSummary {
  double avg_collisions = 0.0;
  double unseen_feature_rate = 0.0;  // unseen / total active
  std::size_t examples = 0;
};
CollisionSummary average_collisions(const Coloring& c, const SparseDataset& data);

double average_new_edges(const CooccurrenceGraph& g, const SparseDataset& data);

struct FidelityOptions {
  std::vector<std::uint32_t> thresholds{1, 2, 3, 4};
  double confidence_delta = 0.01;
  GreedyOrder greedy_order = GreedyOrder::kDataOrder;
  unsigned workers = 1;
};

struct FidelityRow {
  std::uint32_t k = 1;
  std::uint64_t edges = 0;
  std::uint32_t delta = 0;
  double good_turing_per_example = 0.0;   // N_k / n
  double empirical_new_edges = 0.0;       // held-out mean |K(T) \ E^(k)|
  std::uint32_t greedy_colors = 0;
  double greedy_avg_collisions = 0.0;
  double unseen_feature_rate = 0.0;
  std::size_t held_out = 0;               // |W|
  std::uint32_t delta_f = 0;
  double filtered_good_turing_per_example = 0.0;
  double filtered_empirical_new_edges = 0.0;
  ColorBudget required_unfiltered;        // W = {} variant
  ColorBudget required_filtered;          // m_f
};

struct FidelityReport {
  std::size_t n = 0;
  std::size_t eta = 0;
  // Mean |K(T_i)| over training examples (multiset view) and |E| / n
  // (distinct-edge view).
  double avg_edges_per_example = 0.0;
  double distinct_edges_per_example = 0.0;
  std::vector<FidelityRow> rows;
};

FidelityReport fidelity_report(const SparseDataset& train, const SparseDataset& held_out,
                               const FidelityOptions& options = {});
FidelityReport fidelity_report(const SparseDataset& train, const EdgeMultiset& multiset,
                               const SparseDataset& held_out,
                               const FidelityOptions& options = {});
nlohmann::json to_json(const FidelityReport& report);

}  // namespace chromatic
