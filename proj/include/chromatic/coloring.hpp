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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "chromatic/cooccurrence_graph.hpp"
#include "chromatic/dataset.hpp"

namespace chromatic {

// Feature -> color map with each feature's training frequency (popularity),
// which collision resolution needs at encode time.
class Coloring {
 public:
  struct Entry {
    std::uint32_t color = 0;
    std::uint64_t popularity = 0;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  Coloring() = default;
  Coloring(std::unordered_map<FeatureId, Entry> entries);

  // colors[v] is the color of graph vertex v.
  static Coloring from_graph(const CooccurrenceGraph& g,
                             std::span<const std::uint32_t> colors,
                             const FeatureFrequency& popularity);

  std::optional<std::uint32_t> color_of(FeatureId f) const;
  const Entry* find(FeatureId f) const;
  std::uint64_t popularity(FeatureId f) const;
  // 1 + max color, 0 when empty.
  std::uint32_t num_colors() const { return num_colors_; }
  std::size_t size() const { return entries_.size(); }
  const std::unordered_map<FeatureId, Entry>& entries() const { return entries_; }
  // Entries sorted by feature id.
  std::vector<std::pair<FeatureId, Entry>> sorted_entries() const;

  friend bool operator==(const Coloring& a, const Coloring& b) {
    return a.num_colors_ == b.num_colors_ && a.entries_ == b.entries_;
  }

 private:
  std::unordered_map<FeatureId, Entry> entries_;
  std::uint32_t num_colors_ = 0;
};

enum class GreedyOrder { kDataOrder, kAscendingId, kDegreeDescending };
const char* to_string(GreedyOrder order);
GreedyOrder greedy_order_from_string(const std::string& name);

// Visit order for greedy coloring. kDataOrder follows first appearance in
// `data` (vertices that never appear there go last, by id); ties in
// kDegreeDescending go to the smaller id.
std::vector<VertexIndex> vertex_order(const CooccurrenceGraph& g, GreedyOrder order,
                                      const SparseDataset* data = nullptr);

// First fit: each vertex in `order` takes the smallest color unused by its
// already colored neighbors. Uses at most max_degree + 1 colors.
std::vector<std::uint32_t> greedy_colors(const CooccurrenceGraph& g,
                                         std::span<const VertexIndex> order);
Coloring greedy_color(const CooccurrenceGraph& g, GreedyOrder order,
                      const FeatureFrequency& popularity,
                      const SparseDataset* data = nullptr);

bool is_proper(const CooccurrenceGraph& g, std::span<const std::uint32_t> colors);
// Every vertex colored and no edge monochromatic.
bool is_proper(const CooccurrenceGraph& g, const Coloring& c);

struct LargestFirstOrder {
  std::vector<VertexIndex> order;
  // removal_degree[i]: degree of order[i] in the subgraph induced by
  // order[i..], which is that subgraph's maximum degree.
  std::vector<std::uint32_t> removal_degree;
};
// Repeatedly removes a maximum-degree vertex of the remaining graph, ties to
// the smaller feature id. O((V + E) log V) with a tournament tree over
// (current degree, id).
LargestFirstOrder largest_first_order(const CooccurrenceGraph& g);

struct FilterResult {
  // Held-out prefix W of the largest-first order, in removal order.
  std::vector<FeatureId> held_out;
  CooccurrenceGraph filtered_graph;
  std::uint32_t delta_f = 0;
};
// Smallest largest-first prefix W with |W| >= 2 * maxdeg(G - W).
FilterResult filter_high_degree(const CooccurrenceGraph& g);
FilterResult filter_high_degree(const CooccurrenceGraph& g, const LargestFirstOrder& lf);

struct GlauberResult {
  std::vector<std::uint32_t> colors;
  std::uint64_t steps = 0;
  // False when m <= 2 * max_degree, where rapid mixing is not guaranteed.
  bool mixing_guaranteed = true;
};

// ceil(multiplier * m * v * ln v) for v vertices.
std::uint64_t default_glauber_steps(std::uint32_t m, std::size_t vertices,
                                    double multiplier = 1.0);

// ceil(multiplier * (m - d) / (m - 2d) * v * ln v) for maximum degree d, the
// coupling bound on the mixing time when m > 2d. Falls back to
// default_glauber_steps otherwise.
std::uint64_t mixing_glauber_steps(std::uint32_t m, std::uint32_t max_degree,
                                   std::size_t vertices, double multiplier = 1.0);

// Single-site Glauber dynamics over proper m-colorings, started from the
// ascending-id greedy coloring. Each step picks a uniform vertex and gives it
// a uniform color among those its neighbors do not use. Deterministic given
// the seed. Throws std::invalid_argument when m < max_degree + 1.
GlauberResult glauber_sample(const CooccurrenceGraph& g, std::uint32_t m,
                             std::uint64_t steps, std::uint64_t seed);

// Held-out vertices get fresh colors inner.num_colors(), inner.num_colors()+1,
// ... in removal order. Throws when `inner` misses a filtered vertex.
Coloring combine_filtered_coloring(const FilterResult& fr, const Coloring& inner,
                                   const FeatureFrequency& popularity);

// "CLCOLOR1" | u64 count | count x (u64 feature id, u32 color), sorted by id.
void write_coloring(std::ostream& out, const Coloring& c);
Coloring read_coloring(std::istream& in, const FeatureFrequency& popularity);
void write_coloring(const std::filesystem::path& path, const Coloring& c);
Coloring read_coloring(const std::filesystem::path& path,
                       const FeatureFrequency& popularity);

}  // namespace chromatic
