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
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "chromatic/dataset.hpp"
#include "chromatic/edge_table.hpp"
#include "json.hpp"

namespace chromatic {

using VertexIndex = std::uint32_t;

// Undirected graph over feature ids in CSR form. Vertices are stored sorted by
// id; VertexIndex is the position in that order. Neighbor lists are sorted
// and duplicate free. Immutable after construction.
class CooccurrenceGraph {
 public:
  CooccurrenceGraph() = default;
  // Takes ownership of a finished CSR layout; validates symmetry-free basics
  // (sizes, sortedness, no self loops).
  CooccurrenceGraph(std::vector<FeatureId> vertices,
                    std::vector<std::uint64_t> offsets,
                    std::vector<VertexIndex> neighbors, std::uint32_t k);

  std::size_t num_vertices() const { return vertices_.size(); }
  std::uint64_t num_edges() const { return neighbors_.size() / 2; }
  std::uint32_t k() const { return k_; }
  std::uint32_t max_degree() const { return max_degree_; }

  FeatureId vertex_id(VertexIndex v) const { return vertices_[v]; }
  const std::vector<FeatureId>& vertex_ids() const { return vertices_; }
  std::optional<VertexIndex> index_of(FeatureId f) const;

  std::span<const VertexIndex> neighbors(VertexIndex v) const {
    return {neighbors_.data() + offsets_[v],
            static_cast<std::size_t>(offsets_[v + 1] - offsets_[v])};
  }
  std::uint32_t degree(VertexIndex v) const {
    return static_cast<std::uint32_t>(offsets_[v + 1] - offsets_[v]);
  }
  bool adjacent(VertexIndex a, VertexIndex b) const;
  bool has_edge(FeatureId a, FeatureId b) const;

  // Canonical, sorted edge list.
  std::vector<Edge> edges() const;

  // Subgraph induced on all vertices except `removed`.
  CooccurrenceGraph without(std::span<const VertexIndex> removed) const;

  const std::vector<std::uint64_t>& offsets() const { return offsets_; }
  const std::vector<VertexIndex>& neighbor_array() const { return neighbors_; }

  friend bool operator==(const CooccurrenceGraph&, const CooccurrenceGraph&) = default;

 private:
  std::vector<FeatureId> vertices_;
  std::vector<std::uint64_t> offsets_{0};
  std::vector<VertexIndex> neighbors_;
  std::uint32_t k_ = 1;
  std::uint32_t max_degree_ = 0;
};

// f(j): number of distinct edges that occur in exactly j examples.
class EdgeHistogram {
 public:
  void add(std::uint32_t multiplicity, std::uint64_t edges = 1);
  std::uint64_t at(std::uint32_t multiplicity) const;
  // |E^(k)| = sum over j >= k of f(j).
  std::uint64_t edges_at_least(std::uint32_t k) const;
  std::uint64_t total_edges() const { return edges_at_least(1); }
  const std::map<std::uint32_t, std::uint64_t>& counts() const { return counts_; }
  bool empty() const { return counts_.empty(); }

  friend bool operator==(const EdgeHistogram&, const EdgeHistogram&) = default;

 private:
  std::map<std::uint32_t, std::uint64_t> counts_;
};

struct EdgeCount {
  Edge edge;
  std::uint32_t count = 0;
  friend bool operator==(const EdgeCount&, const EdgeCount&) = default;
};

// Exact multiplicity of every distinct edge, sorted by edge, plus the vertex
// set (every active feature, including ones that never share an example).
struct EdgeMultiset {
  std::vector<EdgeCount> edges;
  std::vector<FeatureId> vertices;

  EdgeHistogram histogram() const;
  // Histogram restricted to edges with neither endpoint in `excluded`.
  EdgeHistogram histogram_excluding(std::span<const FeatureId> excluded) const;
};

struct GraphBuildOptions {
  unsigned workers = 1;
  // W = shard_factor * workers global edge sets.
  unsigned shard_factor = 1;
  // Per-worker, per-shard local buffer; flushed into the shard when full.
  std::size_t buffer_capacity = 4096;
  // Distinct-edge cap; 0 disables. Exceeding it raises GraphBuildError.
  std::uint64_t max_edges = 0;
};

class GraphBuildError : public std::runtime_error {
 public:
  GraphBuildError(const std::string& what, std::uint64_t edges_reached)
      : std::runtime_error(what + " (distinct edges reached: " +
                           std::to_string(edges_reached) + ")"),
        edges_reached_(edges_reached) {}
  std::uint64_t edges_reached() const { return edges_reached_; }

 private:
  std::uint64_t edges_reached_;
};

// Edges of the complete graph on a sorted, duplicate-free set.
std::vector<Edge> clique_edges(std::span<const FeatureId> active);

// Sharded parallel count of every edge of every K(T_i).
EdgeMultiset count_edges(const SparseDataset& train,
                         const GraphBuildOptions& options = {});

struct CooccurrenceBuild {
  CooccurrenceGraph graph;
  EdgeHistogram histogram;
  EdgeMultiset multiset;
};
CooccurrenceBuild build_cooccurrence(const SparseDataset& train,
                                     const GraphBuildOptions& options = {});

// G^(k) from already counted edges.
CooccurrenceGraph threshold_graph(const EdgeMultiset& multiset, std::uint32_t k,
                                  unsigned workers = 1);

enum class ThresholdMode { kExact, kBloom };

struct BloomOptions {
  double false_positive_rate = 0.01;
  // Distinct edges the filters are sized for; 0 means use sum_i |K(T_i)|.
  std::uint64_t expected_edges = 0;
};

// G^(k) straight from data. Bloom mode runs a first pass through k rolling
// filters (an edge found in filter j moves on to filter j+1), then counts
// exactly only the edges that reached the last filter.
CooccurrenceGraph build_thresholded(const SparseDataset& train, std::uint32_t k,
                                    ThresholdMode mode,
                                    const GraphBuildOptions& options = {},
                                    const BloomOptions& bloom = {});

// Parallel CSR construction: atomic degree counts, prefix-sum offsets, then
// an atomic-cursor fill. Neighbor lists are sorted afterwards, so the result
// does not depend on the worker count. Throws std::invalid_argument for an
// edge whose endpoint is not in `vertices` or that is not canonical.
CooccurrenceGraph to_adjacency(std::span<const Edge> edges,
                               std::span<const FeatureId> vertices,
                               unsigned workers = 1, std::uint32_t k = 1);

struct DegreeStats {
  std::size_t vertices = 0;
  std::uint64_t edges = 0;
  std::uint32_t max_degree = 0;
  double avg_degree = 0.0;
  std::size_t isolated = 0;
};
DegreeStats degree_stats(const CooccurrenceGraph& g);

// "CLGRAPH1" | u32 k | u64 V | u64 ids[V] | u32 degree[V] | u32 neighbors[2E]
void write_graph(std::ostream& out, const CooccurrenceGraph& g);
CooccurrenceGraph read_graph(std::istream& in);
void write_graph(const std::filesystem::path& path, const CooccurrenceGraph& g);
CooccurrenceGraph read_graph(const std::filesystem::path& path);
nlohmann::json graph_stats_json(const CooccurrenceGraph& g);

}  // namespace chromatic
