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

#include "chromatic/cooccurrence_graph.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <new>
#include <numeric>
#include <unordered_set>

#include "chromatic/binary_io.hpp"
#include "chromatic/bloom_filter.hpp"
#include "chromatic/parallel.hpp"

namespace chromatic {

CooccurrenceGraph::CooccurrenceGraph(std::vector<FeatureId> vertices,
                                     std::vector<std::uint64_t> offsets,
                                     std::vector<VertexIndex> neighbors,
                                     std::uint32_t k)
    : vertices_(std::move(vertices)),
      offsets_(std::move(offsets)),
      neighbors_(std::move(neighbors)),
      k_(k) {
  if (offsets_.size() != vertices_.size() + 1 || offsets_.front() != 0 ||
      offsets_.back() != neighbors_.size()) {
    throw std::invalid_argument("inconsistent CSR layout");
  }
  if (!std::is_sorted(vertices_.begin(), vertices_.end()) ||
      std::adjacent_find(vertices_.begin(), vertices_.end()) != vertices_.end()) {
    throw std::invalid_argument("vertex ids must be sorted and unique");
  }
  for (VertexIndex v = 0; v < vertices_.size(); ++v) {
    auto adj = this->neighbors(v);
    for (std::size_t i = 0; i < adj.size(); ++i) {
      if (adj[i] >= vertices_.size() || adj[i] == v ||
          (i > 0 && adj[i - 1] >= adj[i])) {
        throw std::invalid_argument("neighbor lists must be sorted, in range and loop free");
      }
    }
    max_degree_ = std::max(max_degree_, degree(v));
  }
}

std::optional<VertexIndex> CooccurrenceGraph::index_of(FeatureId f) const {
  auto it = std::lower_bound(vertices_.begin(), vertices_.end(), f);
  if (it == vertices_.end() || *it != f) return std::nullopt;
  return static_cast<VertexIndex>(it - vertices_.begin());
}

bool CooccurrenceGraph::adjacent(VertexIndex a, VertexIndex b) const {
  auto adj = neighbors(a);
  return std::binary_search(adj.begin(), adj.end(), b);
}

bool CooccurrenceGraph::has_edge(FeatureId a, FeatureId b) const {
  auto ia = index_of(a);
  auto ib = index_of(b);
  return ia && ib && adjacent(*ia, *ib);
}

std::vector<Edge> CooccurrenceGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (VertexIndex v = 0; v < vertices_.size(); ++v) {
    for (VertexIndex w : neighbors(v)) {
      if (v < w) out.push_back({vertices_[v], vertices_[w]});
    }
  }
  return out;
}

CooccurrenceGraph CooccurrenceGraph::without(std::span<const VertexIndex> removed) const {
  constexpr VertexIndex kGone = ~VertexIndex{0};
  std::vector<VertexIndex> remap(vertices_.size(), 0);
  for (VertexIndex v : removed) remap.at(v) = kGone;
  std::vector<FeatureId> kept;
  kept.reserve(vertices_.size());
  for (VertexIndex v = 0; v < vertices_.size(); ++v) {
    if (remap[v] == kGone) continue;
    remap[v] = static_cast<VertexIndex>(kept.size());
    kept.push_back(vertices_[v]);
  }
  std::vector<std::uint64_t> offsets{0};
  offsets.reserve(kept.size() + 1);
  std::vector<VertexIndex> adj;
  for (VertexIndex v = 0; v < vertices_.size(); ++v) {
    if (remap[v] == kGone) continue;
    for (VertexIndex w : neighbors(v)) {
      if (remap[w] != kGone) adj.push_back(remap[w]);
    }
    offsets.push_back(adj.size());
  }
  return CooccurrenceGraph(std::move(kept), std::move(offsets), std::move(adj), k_);
}

void EdgeHistogram::add(std::uint32_t multiplicity, std::uint64_t edges) {
  if (multiplicity == 0) throw std::invalid_argument("multiplicity must be >= 1");
  if (edges > 0) counts_[multiplicity] += edges;
}

std::uint64_t EdgeHistogram::at(std::uint32_t multiplicity) const {
  auto it = counts_.find(multiplicity);
  return it == counts_.end() ? 0 : it->second;
}

std::uint64_t EdgeHistogram::edges_at_least(std::uint32_t k) const {
  std::uint64_t total = 0;
  for (auto it = counts_.lower_bound(k); it != counts_.end(); ++it) total += it->second;
  return total;
}

EdgeHistogram EdgeMultiset::histogram() const {
  EdgeHistogram h;
  for (const EdgeCount& e : edges) h.add(e.count);
  return h;
}

EdgeHistogram EdgeMultiset::histogram_excluding(std::span<const FeatureId> excluded) const {
  std::unordered_set<FeatureId> drop(excluded.begin(), excluded.end());
  EdgeHistogram h;
  for (const EdgeCount& e : edges) {
    if (!drop.contains(e.edge.u) && !drop.contains(e.edge.v)) h.add(e.count);
  }
  return h;
}

std::vector<Edge> clique_edges(std::span<const FeatureId> active) {
  std::vector<Edge> out;
  if (active.size() < 2) return out;
  out.reserve(active.size() * (active.size() - 1) / 2);
  for (std::size_t i = 0; i < active.size(); ++i) {
    for (std::size_t j = i + 1; j < active.size(); ++j) {
      out.push_back(Edge::canonical(active[i], active[j]));
    }
  }
  return out;
}

namespace {

struct EdgeShard {
  std::mutex mutex;
  EdgeCountTable table;
};

std::size_t shard_of(const Edge& e, std::size_t shards) {
  return static_cast<std::size_t>((edge_hash(e) >> 32) % shards);
}

std::vector<FeatureId> sorted_vertices(const SparseDataset& ds) {
  std::vector<FeatureId> out;
  out.reserve(ds.feature_freq().size());
  for (const auto& [f, count] : ds.feature_freq()) out.push_back(f);
  std::sort(out.begin(), out.end());
  return out;
}

template <class Fn>
void for_each_pair(const Example& ex, Fn&& fn) {
  const auto& a = ex.active;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) fn(Edge{a[i], a[j]});
  }
}

}  // namespace

EdgeMultiset count_edges(const SparseDataset& train, const GraphBuildOptions& options) {
  const unsigned workers = std::max(1u, options.workers);
  const std::size_t shard_count =
      static_cast<std::size_t>(std::max(1u, options.shard_factor)) * workers;
  const std::size_t capacity = std::max<std::size_t>(1, options.buffer_capacity);
  std::vector<EdgeShard> shards(shard_count);
  std::atomic<std::uint64_t> distinct{0};

  parallel_for_ranges(train.size(), workers, [&](std::size_t begin, std::size_t end, unsigned) {
    std::vector<std::vector<Edge>> local(shard_count);
    try {
      for (auto& buf : local) buf.reserve(capacity);
      auto flush = [&](std::size_t s) {
        std::lock_guard lock(shards[s].mutex);
        EdgeCountTable& table = shards[s].table;
        const std::size_t before = table.size();
        for (const Edge& e : local[s]) table.add(e);
        const std::uint64_t total = distinct += table.size() - before;
        local[s].clear();
        if (options.max_edges != 0 && total > options.max_edges) {
          throw GraphBuildError("edge budget exceeded while building co-occurrence graph",
                                total);
        }
      };
      for (std::size_t i = begin; i < end; ++i) {
        for_each_pair(train[i], [&](const Edge& e) {
          const std::size_t s = shard_of(e, shard_count);
          local[s].push_back(e);
          if (local[s].size() >= capacity) flush(s);
        });
      }
      for (std::size_t s = 0; s < shard_count; ++s) {
        if (!local[s].empty()) flush(s);
      }
    } catch (const std::bad_alloc&) {
      throw GraphBuildError("out of memory while building co-occurrence graph",
                            distinct.load());
    }
  });

  EdgeMultiset out;
  out.edges.reserve(distinct.load());
  for (const EdgeShard& shard : shards) {
    shard.table.for_each([&](const Edge& e, std::uint32_t c) { out.edges.push_back({e, c}); });
  }
  std::sort(out.edges.begin(), out.edges.end(),
            [](const EdgeCount& a, const EdgeCount& b) { return a.edge < b.edge; });
  out.vertices = sorted_vertices(train);
  return out;
}

CooccurrenceGraph threshold_graph(const EdgeMultiset& multiset, std::uint32_t k,
                                  unsigned workers) {
  if (k < 1) throw std::invalid_argument("threshold k must be >= 1");
  std::vector<Edge> kept;
  for (const EdgeCount& e : multiset.edges) {
    if (e.count >= k) kept.push_back(e.edge);
  }
  return to_adjacency(kept, multiset.vertices, workers, k);
}

CooccurrenceBuild build_cooccurrence(const SparseDataset& train,
                                     const GraphBuildOptions& options) {
  CooccurrenceBuild out;
  out.multiset = count_edges(train, options);
  out.histogram = out.multiset.histogram();
  out.graph = threshold_graph(out.multiset, 1, options.workers);
  return out;
}

CooccurrenceGraph build_thresholded(const SparseDataset& train, std::uint32_t k,
                                    ThresholdMode mode, const GraphBuildOptions& options,
                                    const BloomOptions& bloom) {
  if (k < 2) throw std::invalid_argument("thresholded build needs k >= 2");
  if (!(bloom.false_positive_rate > 0.0 && bloom.false_positive_rate < 1.0)) {
    throw std::invalid_argument("bloom false-positive rate must lie in (0, 1)");
  }
  if (mode == ThresholdMode::kExact) {
    return threshold_graph(count_edges(train, options), k, options.workers);
  }

  std::uint64_t expected = bloom.expected_edges;
  if (expected == 0) {
    for (const Example& ex : train) {
      expected += ex.active.size() * (ex.active.size() - 1) / 2;
    }
  }
  // Each worker owns one slice of the edge hash space and scans the whole
  // dataset, so filters and counters are never shared between threads.
  const unsigned workers = std::max(1u, options.workers);
  std::vector<std::vector<Edge>> survivors(workers);
  parallel_for_ranges(workers, workers, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t w = begin; w < end; ++w) {
      std::vector<BloomFilter> filters;
      filters.reserve(k);
      for (std::uint32_t j = 0; j < k; ++j) {
        filters.emplace_back(expected / workers + 1, bloom.false_positive_rate);
      }
      for (const Example& ex : train) {
        for_each_pair(ex, [&](const Edge& e) {
          if (shard_of(e, workers) != w) return;
          const std::uint64_t key = edge_hash(e);
          for (BloomFilter& f : filters) {
            if (!f.test_and_insert(key)) break;
          }
        });
      }
      EdgeCountTable counts;
      for (const Example& ex : train) {
        for_each_pair(ex, [&](const Edge& e) {
          if (shard_of(e, workers) == w && filters.back().contains(edge_hash(e))) {
            counts.add(e);
          }
        });
      }
      counts.for_each([&](const Edge& e, std::uint32_t c) {
        if (c >= k) survivors[w].push_back(e);
      });
    }
  });
  std::vector<Edge> kept;
  for (auto& s : survivors) kept.insert(kept.end(), s.begin(), s.end());
  std::sort(kept.begin(), kept.end());
  return to_adjacency(kept, sorted_vertices(train), options.workers, k);
}

CooccurrenceGraph to_adjacency(std::span<const Edge> edges,
                               std::span<const FeatureId> vertices, unsigned workers,
                               std::uint32_t k) {
  std::vector<FeatureId> ids(vertices.begin(), vertices.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  const std::size_t n = ids.size();
  auto lookup = [&](FeatureId f) {
    auto it = std::lower_bound(ids.begin(), ids.end(), f);
    if (it == ids.end() || *it != f) {
      throw std::invalid_argument("edge references unknown vertex " + std::to_string(f));
    }
    return static_cast<VertexIndex>(it - ids.begin());
  };

  std::vector<std::atomic<std::uint32_t>> degree(n);
  parallel_for_ranges(edges.size(), workers, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t i = begin; i < end; ++i) {
      const Edge& e = edges[i];
      if (e.u >= e.v) throw std::invalid_argument("edge is not canonical");
      degree[lookup(e.u)].fetch_add(1, std::memory_order_relaxed);
      degree[lookup(e.v)].fetch_add(1, std::memory_order_relaxed);
    }
  });

  std::vector<std::uint64_t> offsets(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) offsets[v + 1] = offsets[v] + degree[v].load();

  std::vector<std::atomic<std::uint64_t>> cursor(n);
  for (std::size_t v = 0; v < n; ++v) cursor[v].store(offsets[v], std::memory_order_relaxed);
  std::vector<VertexIndex> adj(offsets[n]);
  parallel_for_ranges(edges.size(), workers, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t i = begin; i < end; ++i) {
      const VertexIndex a = lookup(edges[i].u);
      const VertexIndex b = lookup(edges[i].v);
      adj[cursor[a].fetch_add(1, std::memory_order_relaxed)] = b;
      adj[cursor[b].fetch_add(1, std::memory_order_relaxed)] = a;
    }
  });
  parallel_for_ranges(n, workers, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t v = begin; v < end; ++v) {
      auto first = adj.begin() + static_cast<std::ptrdiff_t>(offsets[v]);
      auto last = adj.begin() + static_cast<std::ptrdiff_t>(offsets[v + 1]);
      std::sort(first, last);
      if (std::adjacent_find(first, last) != last) {
        throw std::invalid_argument("duplicate edge in edge set");
      }
    }
  });
  return CooccurrenceGraph(std::move(ids), std::move(offsets), std::move(adj), k);
}

DegreeStats degree_stats(const CooccurrenceGraph& g) {
  DegreeStats s;
  s.vertices = g.num_vertices();
  s.edges = g.num_edges();
  s.max_degree = g.max_degree();
  s.avg_degree = s.vertices == 0 ? 0.0
                                 : 2.0 * static_cast<double>(s.edges) /
                                       static_cast<double>(s.vertices);
  for (VertexIndex v = 0; v < g.num_vertices(); ++v) {
    if (g.degree(v) == 0) ++s.isolated;
  }
  return s;
}

namespace {
constexpr char kGraphMagic[9] = "CLGRAPH1";
}

void write_graph(std::ostream& out, const CooccurrenceGraph& g) {
  io::write_magic(out, kGraphMagic);
  io::write_le<std::uint32_t>(out, g.k());
  io::write_le<std::uint64_t>(out, g.num_vertices());
  for (FeatureId f : g.vertex_ids()) io::write_le<std::uint64_t>(out, f);
  for (VertexIndex v = 0; v < g.num_vertices(); ++v) io::write_le<std::uint32_t>(out, g.degree(v));
  for (VertexIndex w : g.neighbor_array()) io::write_le<std::uint32_t>(out, w);
}

CooccurrenceGraph read_graph(std::istream& in) {
  io::expect_magic(in, kGraphMagic);
  const auto k = io::read_le<std::uint32_t>(in);
  const auto n = io::read_le<std::uint64_t>(in);
  std::vector<FeatureId> ids(n);
  for (auto& f : ids) f = io::read_le<std::uint64_t>(in);
  std::vector<std::uint64_t> offsets(n + 1, 0);
  for (std::uint64_t v = 0; v < n; ++v) {
    offsets[v + 1] = offsets[v] + io::read_le<std::uint32_t>(in);
  }
  std::vector<VertexIndex> adj(offsets[n]);
  for (auto& w : adj) w = io::read_le<std::uint32_t>(in);
  return CooccurrenceGraph(std::move(ids), std::move(offsets), std::move(adj), k);
}

void write_graph(const std::filesystem::path& path, const CooccurrenceGraph& g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_graph(out, g);
}

CooccurrenceGraph read_graph(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_graph(in);
}

nlohmann::json graph_stats_json(const CooccurrenceGraph& g) {
  const DegreeStats s = degree_stats(g);
  return {{"vertices", s.vertices},   {"edges", s.edges},
          {"max_degree", s.max_degree}, {"avg_degree", s.avg_degree},
          {"isolated", s.isolated},   {"k", g.k()}};
}

}  // namespace chromatic
