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

#include "chromatic/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace chromatic {

std::uint64_t good_turing(const EdgeHistogram& h, std::uint32_t k) {
  if (k < 1) throw std::invalid_argument("good_turing needs k >= 1");
  std::uint64_t total = 0;
  for (std::uint32_t j = 1; j <= k; ++j) total += j * h.at(j);
  return total;
}

CollisionCount collision_count(const Coloring& c, std::span<const FeatureId> active) {
  CollisionCount out;
  std::vector<std::uint32_t> colors;
  colors.reserve(active.size());
  for (FeatureId f : active) {
    if (auto color = c.color_of(f)) {
      colors.push_back(*color);
    } else {
      ++out.unseen;
    }
  }
  std::sort(colors.begin(), colors.end());
  const auto distinct = static_cast<std::size_t>(
      std::unique(colors.begin(), colors.end()) - colors.begin());
  out.collisions = colors.size() - distinct;
  return out;
}

std::size_t new_edge_count(const CooccurrenceGraph& g, std::span<const FeatureId> active) {
  std::size_t missing = 0;
  for (std::size_t i = 0; i < active.size(); ++i) {
    for (std::size_t j = i + 1; j < active.size(); ++j) {
      if (!g.has_edge(active[i], active[j])) ++missing;
    }
  }
  return missing;
}

ColorBudget required_colors(const ColorBudgetInputs& in, double confidence_delta) {
  if (in.n < 1) throw std::invalid_argument("required_colors needs n >= 1");
  if (!(confidence_delta > 0.0 && confidence_delta < 1.0)) {
    throw std::invalid_argument("confidence delta must lie in (0, 1)");
  }
  const double n = static_cast<double>(in.n);
  const double eta = static_cast<double>(in.eta);
  ColorBudget out;
  out.raw = static_cast<double>(in.held_out) + 2.0 * in.delta_f +
            static_cast<double>(in.n_f) / n +
            in.k * eta * eta * std::log(1.0 / confidence_delta) / std::sqrt(n);
  out.ceiled = static_cast<std::uint64_t>(std::ceil(out.raw));
  return out;
}

CollisionSummary average_collisions(const Coloring& c, const SparseDataset& data) {
  CollisionSummary out;
  out.examples = data.size();
  if (data.empty()) return out;
  std::uint64_t collisions = 0;
  std::uint64_t unseen = 0;
  std::uint64_t active = 0;
  for (const Example& ex : data) {
    const CollisionCount cc = collision_count(c, ex.active);
    collisions += cc.collisions;
    unseen += cc.unseen;
    active += ex.active.size();
  }
  out.avg_collisions = static_cast<double>(collisions) / static_cast<double>(data.size());
  out.unseen_feature_rate =
      active == 0 ? 0.0 : static_cast<double>(unseen) / static_cast<double>(active);
  return out;
}

double average_new_edges(const CooccurrenceGraph& g, const SparseDataset& data) {
  if (data.empty()) return 0.0;
  std::uint64_t total = 0;
  for (const Example& ex : data) total += new_edge_count(g, ex.active);
  return static_cast<double>(total) / static_cast<double>(data.size());
}

namespace {

// Held-out new edges restricted to vertices outside W.
double average_new_edges_excluding(const CooccurrenceGraph& gf,
                                   const std::unordered_set<FeatureId>& excluded,
                                   const SparseDataset& data) {
  if (data.empty()) return 0.0;
  std::uint64_t total = 0;
  std::vector<FeatureId> kept;
  for (const Example& ex : data) {
    kept.clear();
    for (FeatureId f : ex.active) {
      if (!excluded.contains(f)) kept.push_back(f);
    }
    total += new_edge_count(gf, kept);
  }
  return static_cast<double>(total) / static_cast<double>(data.size());
}

}  // namespace

FidelityReport fidelity_report(const SparseDataset& train, const SparseDataset& held_out,
                               const FidelityOptions& options) {
  GraphBuildOptions build;
  build.workers = options.workers;
  return fidelity_report(train, count_edges(train, build), held_out, options);
}

FidelityReport fidelity_report(const SparseDataset& train, const EdgeMultiset& multiset,
                               const SparseDataset& held_out,
                               const FidelityOptions& options) {
  if (train.empty()) throw std::invalid_argument("fidelity report needs training data");
  FidelityReport report;
  report.n = train.size();
  report.eta = train.eta();
  std::uint64_t pairs = 0;
  for (const Example& ex : train) pairs += ex.active.size() * (ex.active.size() - 1) / 2;
  const double n = static_cast<double>(train.size());
  report.avg_edges_per_example = static_cast<double>(pairs) / n;
  report.distinct_edges_per_example = static_cast<double>(multiset.edges.size()) / n;
  const EdgeHistogram histogram = multiset.histogram();

  for (std::uint32_t k : options.thresholds) {
    FidelityRow row;
    row.k = k;
    const CooccurrenceGraph g = threshold_graph(multiset, k, options.workers);
    row.edges = g.num_edges();
    row.delta = g.max_degree();
    row.good_turing_per_example = static_cast<double>(good_turing(histogram, k)) / n;
    row.empirical_new_edges = average_new_edges(g, held_out);

    const Coloring greedy = greedy_color(g, options.greedy_order, train.feature_freq(), &train);
    row.greedy_colors = greedy.num_colors();
    const CollisionSummary cc = average_collisions(greedy, held_out);
    row.greedy_avg_collisions = cc.avg_collisions;
    row.unseen_feature_rate = cc.unseen_feature_rate;

    const FilterResult fr = filter_high_degree(g);
    row.held_out = fr.held_out.size();
    row.delta_f = fr.delta_f;
    const std::uint64_t n_f = good_turing(multiset.histogram_excluding(fr.held_out), k);
    row.filtered_good_turing_per_example = static_cast<double>(n_f) / n;
    const std::unordered_set<FeatureId> excluded(fr.held_out.begin(), fr.held_out.end());
    row.filtered_empirical_new_edges =
        average_new_edges_excluding(fr.filtered_graph, excluded, held_out);

    row.required_unfiltered = required_colors(
        {0, row.delta, good_turing(histogram, k), train.size(), k, train.eta()},
        options.confidence_delta);
    row.required_filtered = required_colors(
        {fr.held_out.size(), fr.delta_f, n_f, train.size(), k, train.eta()},
        options.confidence_delta);
    report.rows.push_back(row);
  }
  return report;
}

nlohmann::json to_json(const FidelityReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const FidelityRow& r : report.rows) {
    rows.push_back({
        {"k", r.k},
        {"edges", r.edges},
        {"delta", r.delta},
        {"good_turing_per_example", r.good_turing_per_example},
        {"empirical_new_edges", r.empirical_new_edges},
        {"greedy_colors", r.greedy_colors},
        {"greedy_avg_collisions", r.greedy_avg_collisions},
        {"unseen_feature_rate", r.unseen_feature_rate},
        {"held_out", r.held_out},
        {"delta_f", r.delta_f},
        {"filtered_good_turing_per_example", r.filtered_good_turing_per_example},
        {"filtered_empirical_new_edges", r.filtered_empirical_new_edges},
        {"required_colors_unfiltered", r.required_unfiltered.raw},
        {"required_colors_unfiltered_ceil", r.required_unfiltered.ceiled},
        {"required_colors_filtered", r.required_filtered.raw},
        {"required_colors_filtered_ceil", r.required_filtered.ceiled},
    });
  }
  return {{"n", report.n},
          {"eta", report.eta},
          {"avg_edges_per_example", report.avg_edges_per_example},
          {"distinct_edges_per_example", report.distinct_edges_per_example},
          {"rows", rows}};
}

}  // namespace chromatic
