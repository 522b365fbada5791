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

#include "chromatic/coloring.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "chromatic/binary_io.hpp"
#include "chromatic/hashing.hpp"

namespace chromatic {

Coloring::Coloring(std::unordered_map<FeatureId, Entry> entries)
    : entries_(std::move(entries)) {
  for (const auto& [f, e] : entries_) num_colors_ = std::max(num_colors_, e.color + 1);
}

Coloring Coloring::from_graph(const CooccurrenceGraph& g,
                              std::span<const std::uint32_t> colors,
                              const FeatureFrequency& popularity) {
  if (colors.size() != g.num_vertices()) {
    throw std::invalid_argument("one color per vertex required");
  }
  std::unordered_map<FeatureId, Entry> entries;
  entries.reserve(colors.size());
  for (VertexIndex v = 0; v < g.num_vertices(); ++v) {
    const FeatureId f = g.vertex_id(v);
    auto it = popularity.find(f);
    entries.emplace(f, Entry{colors[v], it == popularity.end() ? 0 : it->second});
  }
  return Coloring(std::move(entries));
}

const Coloring::Entry* Coloring::find(FeatureId f) const {
  auto it = entries_.find(f);
  return it == entries_.end() ? nullptr : &it->second;
}

std::optional<std::uint32_t> Coloring::color_of(FeatureId f) const {
  const Entry* e = find(f);
  if (!e) return std::nullopt;
  return e->color;
}

std::uint64_t Coloring::popularity(FeatureId f) const {
  const Entry* e = find(f);
  return e ? e->popularity : 0;
}

std::vector<std::pair<FeatureId, Coloring::Entry>> Coloring::sorted_entries() const {
  std::vector<std::pair<FeatureId, Entry>> out(entries_.begin(), entries_.end());
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

const char* to_string(GreedyOrder order) {
  switch (order) {
    case GreedyOrder::kDataOrder: return "data";
    case GreedyOrder::kAscendingId: return "ascending";
    case GreedyOrder::kDegreeDescending: return "degree";
  }
  return "?";
}

GreedyOrder greedy_order_from_string(const std::string& name) {
  if (name == "data") return GreedyOrder::kDataOrder;
  if (name == "ascending") return GreedyOrder::kAscendingId;
  if (name == "degree") return GreedyOrder::kDegreeDescending;
  throw std::invalid_argument("unknown greedy order '" + name + "'");
}

std::vector<VertexIndex> vertex_order(const CooccurrenceGraph& g, GreedyOrder order,
                                      const SparseDataset* data) {
  std::vector<VertexIndex> out(g.num_vertices());
  std::iota(out.begin(), out.end(), VertexIndex{0});
  switch (order) {
    case GreedyOrder::kAscendingId:
      break;
    case GreedyOrder::kDegreeDescending:
      std::stable_sort(out.begin(), out.end(), [&](VertexIndex a, VertexIndex b) {
        return g.degree(a) > g.degree(b);
      });
      break;
    case GreedyOrder::kDataOrder: {
      if (data == nullptr) throw std::invalid_argument("data order needs the dataset");
      std::vector<bool> placed(g.num_vertices(), false);
      out.clear();
      for (FeatureId f : data->first_seen_order()) {
        if (auto v = g.index_of(f); v && !placed[*v]) {
          placed[*v] = true;
          out.push_back(*v);
        }
      }
      for (VertexIndex v = 0; v < g.num_vertices(); ++v) {
        if (!placed[v]) out.push_back(v);
      }
      break;
    }
  }
  return out;
}

std::vector<std::uint32_t> greedy_colors(const CooccurrenceGraph& g,
                                         std::span<const VertexIndex> order) {
  constexpr std::uint32_t kUncolored = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> colors(g.num_vertices(), kUncolored);
  // used[c] == stamp marks color c as taken by a neighbor of the current vertex.
  std::vector<std::uint32_t> used(static_cast<std::size_t>(g.max_degree()) + 2, kUncolored);
  std::uint32_t stamp = 0;
  for (VertexIndex v : order) {
    for (VertexIndex w : g.neighbors(v)) {
      if (colors[w] != kUncolored) used[colors[w]] = stamp;
    }
    std::uint32_t c = 0;
    while (used[c] == stamp) ++c;
    colors[v] = c;
    ++stamp;
  }
  if (std::find(colors.begin(), colors.end(), kUncolored) != colors.end()) {
    throw std::invalid_argument("vertex order does not cover every vertex");
  }
  return colors;
}

Coloring greedy_color(const CooccurrenceGraph& g, GreedyOrder order,
                      const FeatureFrequency& popularity, const SparseDataset* data) {
  const auto sequence = vertex_order(g, order, data);
  return Coloring::from_graph(g, greedy_colors(g, sequence), popularity);
}

bool is_proper(const CooccurrenceGraph& g, std::span<const std::uint32_t> colors) {
  if (colors.size() != g.num_vertices()) return false;
  for (VertexIndex v = 0; v < g.num_vertices(); ++v) {
    for (VertexIndex w : g.neighbors(v)) {
      if (colors[v] == colors[w]) return false;
    }
  }
  return true;
}

bool is_proper(const CooccurrenceGraph& g, const Coloring& c) {
  std::vector<std::uint32_t> colors(g.num_vertices());
  for (VertexIndex v = 0; v < g.num_vertices(); ++v) {
    auto color = c.color_of(g.vertex_id(v));
    if (!color) return false;
    colors[v] = *color;
  }
  return is_proper(g, colors);
}

namespace {

// Tournament tree whose root holds the remaining vertex with the largest
// degree, smallest index on ties. Removed vertices sit at key -1.
class MaxDegreeTree {
 public:
  explicit MaxDegreeTree(const CooccurrenceGraph& g) : key_(g.num_vertices()) {
    leaves_ = 1;
    while (leaves_ < key_.size()) leaves_ *= 2;
    tree_.assign(2 * leaves_, kNone);
    for (VertexIndex v = 0; v < key_.size(); ++v) {
      key_[v] = g.degree(v);
      tree_[leaves_ + v] = v;
    }
    for (std::size_t i = leaves_ - 1; i >= 1; --i) {
      tree_[i] = better(tree_[2 * i], tree_[2 * i + 1]);
    }
  }

  VertexIndex top() const { return tree_[1]; }
  std::int64_t key(VertexIndex v) const { return key_[v]; }

  void set(VertexIndex v, std::int64_t key) {
    key_[v] = key;
    for (std::size_t i = (leaves_ + v) / 2; i >= 1; i /= 2) {
      tree_[i] = better(tree_[2 * i], tree_[2 * i + 1]);
    }
  }

 private:
  static constexpr VertexIndex kNone = std::numeric_limits<VertexIndex>::max();

  VertexIndex better(VertexIndex a, VertexIndex b) const {
    if (a == kNone) return b;
    if (b == kNone) return a;
    if (key_[a] != key_[b]) return key_[a] > key_[b] ? a : b;
    return std::min(a, b);
  }

  std::vector<std::int64_t> key_;
  std::vector<VertexIndex> tree_;
  std::size_t leaves_ = 1;
};

}  // namespace

LargestFirstOrder largest_first_order(const CooccurrenceGraph& g) {
  LargestFirstOrder out;
  const std::size_t n = g.num_vertices();
  out.order.reserve(n);
  out.removal_degree.reserve(n);
  if (n == 0) return out;
  MaxDegreeTree tree(g);
  std::vector<bool> removed(n, false);
  for (std::size_t step = 0; step < n; ++step) {
    const VertexIndex v = tree.top();
    out.order.push_back(v);
    out.removal_degree.push_back(static_cast<std::uint32_t>(tree.key(v)));
    removed[v] = true;
    tree.set(v, -1);
    for (VertexIndex w : g.neighbors(v)) {
      if (!removed[w]) tree.set(w, tree.key(w) - 1);
    }
  }
  return out;
}

FilterResult filter_high_degree(const CooccurrenceGraph& g) {
  return filter_high_degree(g, largest_first_order(g));
}

FilterResult filter_high_degree(const CooccurrenceGraph& g, const LargestFirstOrder& lf) {
  const std::size_t n = lf.order.size();
  std::size_t w = 0;
  // The suffix starting at position w has maximum degree removal_degree[w].
  while (w < n && w < 2 * static_cast<std::size_t>(lf.removal_degree[w])) ++w;
  FilterResult out;
  std::span<const VertexIndex> prefix(lf.order.data(), w);
  out.held_out.reserve(w);
  for (VertexIndex v : prefix) out.held_out.push_back(g.vertex_id(v));
  out.filtered_graph = g.without(prefix);
  out.delta_f = out.filtered_graph.max_degree();
  return out;
}

std::uint64_t default_glauber_steps(std::uint32_t m, std::size_t vertices, double multiplier) {
  if (vertices < 2) return vertices;
  const double v = static_cast<double>(vertices);
  return static_cast<std::uint64_t>(std::ceil(multiplier * m * v * std::log(v)));
}

std::uint64_t mixing_glauber_steps(std::uint32_t m, std::uint32_t max_degree,
                                   std::size_t vertices, double multiplier) {
  if (static_cast<std::uint64_t>(m) <= 2ULL * max_degree) {
    return default_glauber_steps(m, vertices, multiplier);
  }
  if (vertices < 2) return vertices;
  const double v = static_cast<double>(vertices);
  const double ratio = (static_cast<double>(m) - max_degree) /
                       (static_cast<double>(m) - 2.0 * max_degree);
  return static_cast<std::uint64_t>(std::ceil(multiplier * ratio * v * std::log(v)));
}

// Palettes up to this size pick a free color by index instead of rejection.
constexpr std::uint32_t kDirectPaletteLimit = 64;

GlauberResult glauber_sample(const CooccurrenceGraph& g, std::uint32_t m,
                             std::uint64_t steps, std::uint64_t seed) {
  const std::uint32_t delta = g.max_degree();
  if (static_cast<std::uint64_t>(m) < static_cast<std::uint64_t>(delta) + 1) {
    throw std::invalid_argument("glauber dynamics needs m >= max degree + 1 (m=" +
                                std::to_string(m) + ", max degree=" +
                                std::to_string(delta) + ")");
  }
  GlauberResult out;
  out.mixing_guaranteed = static_cast<std::uint64_t>(m) > 2ULL * delta;
  std::vector<VertexIndex> ascending(g.num_vertices());
  std::iota(ascending.begin(), ascending.end(), VertexIndex{0});
  out.colors = greedy_colors(g, ascending);
  const std::size_t n = g.num_vertices();
  if (n == 0) return out;

  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> mark(m, 0);
  std::uint64_t stamp = 0;
  for (std::uint64_t step = 0; step < steps; ++step) {
    const auto v = static_cast<VertexIndex>(uniform_below(rng, n));
    const auto adj = g.neighbors(v);
    if (adj.size() >= m) {
      throw std::logic_error("blocked vertex: every color is used by a neighbor");
    }
    ++stamp;
    std::uint32_t blocked = 0;
    for (VertexIndex w : adj) {
      if (mark[out.colors[w]] != stamp) {
        mark[out.colors[w]] = stamp;
        ++blocked;
      }
    }
    // Both branches draw uniformly from the m - blocked >= 1 free colors.
    std::uint32_t c;
    if (m <= kDirectPaletteLimit) {
      auto r = static_cast<std::uint32_t>(uniform_below(rng, m - blocked));
      c = 0;
      while (mark[c] == stamp || r-- != 0) ++c;
    } else {
      do {
        c = static_cast<std::uint32_t>(uniform_below(rng, m));
      } while (mark[c] == stamp);
    }
    out.colors[v] = c;
#ifndef NDEBUG
    if ((step + 1) % 10000 == 0 && !is_proper(g, out.colors)) {
      throw std::logic_error("glauber step produced an improper coloring");
    }
#endif
  }
  out.steps = steps;
  return out;
}

Coloring combine_filtered_coloring(const FilterResult& fr, const Coloring& inner,
                                   const FeatureFrequency& popularity) {
  const CooccurrenceGraph& gf = fr.filtered_graph;
  std::unordered_map<FeatureId, Coloring::Entry> entries;
  entries.reserve(gf.num_vertices() + fr.held_out.size());
  for (FeatureId f : gf.vertex_ids()) {
    const Coloring::Entry* e = inner.find(f);
    if (e == nullptr) {
      throw std::invalid_argument("inner coloring misses filtered vertex " + std::to_string(f));
    }
    entries.emplace(f, *e);
  }
  std::uint32_t next = inner.num_colors();
  for (FeatureId f : fr.held_out) {
    auto it = popularity.find(f);
    entries[f] = Coloring::Entry{next++, it == popularity.end() ? 0 : it->second};
  }
  return Coloring(std::move(entries));
}

namespace {
constexpr char kColoringMagic[9] = "CLCOLOR1";
}

void write_coloring(std::ostream& out, const Coloring& c) {
  io::write_magic(out, kColoringMagic);
  const auto sorted = c.sorted_entries();
  io::write_le<std::uint64_t>(out, sorted.size());
  for (const auto& [f, e] : sorted) {
    io::write_le<std::uint64_t>(out, f);
    io::write_le<std::uint32_t>(out, e.color);
  }
}

Coloring read_coloring(std::istream& in, const FeatureFrequency& popularity) {
  io::expect_magic(in, kColoringMagic);
  const auto n = io::read_le<std::uint64_t>(in);
  std::unordered_map<FeatureId, Coloring::Entry> entries;
  entries.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto f = io::read_le<std::uint64_t>(in);
    const auto color = io::read_le<std::uint32_t>(in);
    auto it = popularity.find(f);
    entries.emplace(f, Coloring::Entry{color, it == popularity.end() ? 0 : it->second});
  }
  return Coloring(std::move(entries));
}

void write_coloring(const std::filesystem::path& path, const Coloring& c) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_coloring(out, c);
}

Coloring read_coloring(const std::filesystem::path& path, const FeatureFrequency& popularity) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_coloring(in, popularity);
}

}  // namespace chromatic
