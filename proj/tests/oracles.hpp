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

// Brute-force reference implementations used by the unit and acceptance
// tests. They share no code with the library beyond plain data types.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "chromatic/cooccurrence_graph.hpp"
#include "chromatic/dataset.hpp"
#include "chromatic/mutual_information.hpp"

namespace chromatic::oracle {

using Pair = std::pair<FeatureId, FeatureId>;

// Random dataset: `n` examples over features 1..features, each with a
// uniform number of distinct features in [min_nnz, max_nnz].
inline SparseDataset random_dataset(std::mt19937_64& rng, std::size_t n, std::uint32_t features,
                                    std::uint32_t max_nnz, std::uint32_t min_nnz = 0,
                                    double zipf = 0.0) {
  std::vector<double> weights(features);
  for (std::uint32_t f = 0; f < features; ++f) weights[f] = std::pow(f + 1.0, -zipf);
  std::discrete_distribution<std::uint32_t> pick(weights.begin(), weights.end());
  std::uniform_int_distribution<std::uint32_t> nnz(min_nnz, std::min(max_nnz, features));
  std::bernoulli_distribution coin(0.4);
  SparseDataset ds;
  for (std::size_t i = 0; i < n; ++i) {
    std::set<FeatureId> active;
    const std::uint32_t target = nnz(rng);
    while (active.size() < target) active.insert(pick(rng) + 1);
    Example ex;
    ex.active.assign(active.begin(), active.end());
    ex.label = coin(rng) ? 1 : 0;
    ds.add(std::move(ex));
  }
  return ds;
}

// Edge -> number of examples containing both endpoints.
inline std::map<Pair, std::uint32_t> edge_multiplicities(const SparseDataset& ds) {
  std::map<Pair, std::uint32_t> m;
  for (const Example& ex : ds) {
    for (std::size_t a = 0; a < ex.active.size(); ++a) {
      for (std::size_t b = a + 1; b < ex.active.size(); ++b) {
        ++m[{ex.active[a], ex.active[b]}];
      }
    }
  }
  return m;
}

// sum_i |K(T_i) \ E_i^(k)|, where E_i^(k) holds the edges seen at least k
// times in the other examples. Quadratic in n on purpose.
inline std::uint64_t leave_one_out_new_edges(const SparseDataset& ds, std::uint32_t k) {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& t = ds[i].active;
    for (std::size_t a = 0; a < t.size(); ++a) {
      for (std::size_t b = a + 1; b < t.size(); ++b) {
        std::uint32_t others = 0;
        for (std::size_t j = 0; j < ds.size(); ++j) {
          if (j == i) continue;
          const auto& s = ds[j].active;
          if (std::binary_search(s.begin(), s.end(), t[a]) &&
              std::binary_search(s.begin(), s.end(), t[b])) {
            ++others;
          }
        }
        if (others < k) ++total;
      }
    }
  }
  return total;
}

// Plug-in I(X; Y) in nats by the textbook double sum over outcomes x and
// labels y.
inline double plug_in_mi(const std::vector<LabelCounts>& outcomes) {
  double n = 0.0;
  double pos = 0.0;
  for (const LabelCounts& o : outcomes) {
    n += static_cast<double>(o.rows);
    pos += static_cast<double>(o.positives);
  }
  if (n == 0.0) return 0.0;
  const double py[2] = {(n - pos) / n, pos / n};
  double mi = 0.0;
  for (const LabelCounts& o : outcomes) {
    const double px = static_cast<double>(o.rows) / n;
    const double joint[2] = {static_cast<double>(o.rows - o.positives) / n,
                             static_cast<double>(o.positives) / n};
    for (int y = 0; y < 2; ++y) {
      if (joint[y] > 0.0) mi += joint[y] * std::log(joint[y] / (px * py[y]));
    }
  }
  return mi;
}

// One color of a splitter instance: per-value label counts in rank order,
// plus the rows where the color is absent.
struct ColorInstance {
  std::vector<LabelCounts> values;
  LabelCounts absent;
};

// Values sorted by positive rate, ties by original position.
inline std::vector<LabelCounts> rank_by_rate(std::vector<LabelCounts> values) {
  std::vector<std::size_t> idx(values.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return static_cast<double>(values[a].positives) / static_cast<double>(values[a].rows) <
           static_cast<double>(values[b].positives) / static_cast<double>(values[b].rows);
  });
  std::vector<LabelCounts> out;
  for (std::size_t i : idx) out.push_back(values[i]);
  return out;
}

// MI of one color's quantization: `cuts` are positions into the ranked
// values; absent rows form their own outcome.
inline double quantized_mi(const std::vector<LabelCounts>& ranked, const LabelCounts& absent,
                           const std::vector<std::uint32_t>& cuts) {
  std::vector<LabelCounts> outcomes;
  std::size_t start = 0;
  std::vector<std::uint32_t> bounds = cuts;
  bounds.push_back(static_cast<std::uint32_t>(ranked.size()));
  for (std::uint32_t end : bounds) {
    LabelCounts b;
    for (std::size_t r = start; r < end; ++r) {
      b.rows += ranked[r].rows;
      b.positives += ranked[r].positives;
    }
    outcomes.push_back(b);
    start = end;
  }
  if (absent.rows > 0) outcomes.push_back(absent);
  return plug_in_mi(outcomes);
}

// Every ascending subset of {1, ..., d-1} with at most `limit` elements.
inline std::vector<std::vector<std::uint32_t>> cut_subsets(std::uint32_t d, std::uint32_t limit) {
  std::vector<std::vector<std::uint32_t>> out{{}};
  for (std::uint32_t pos = 1; pos < d; ++pos) {
    const std::size_t existing = out.size();
    for (std::size_t i = 0; i < existing; ++i) {
      if (out[i].size() >= limit) continue;
      auto extended = out[i];
      extended.push_back(pos);
      out.push_back(std::move(extended));
    }
  }
  return out;
}

// Best objective over every placement of at most `extra` splitters across
// the colors. Each color's values must already be ranked.
inline double exhaustive_splitter_optimum(const std::vector<ColorInstance>& colors,
                                          std::uint32_t extra) {
  // Per color: (number of cuts, MI) for each cut subset.
  std::vector<std::vector<std::pair<std::uint32_t, double>>> options(colors.size());
  for (std::size_t c = 0; c < colors.size(); ++c) {
    const auto d = static_cast<std::uint32_t>(colors[c].values.size());
    for (const auto& cuts : cut_subsets(d, extra)) {
      options[c].emplace_back(static_cast<std::uint32_t>(cuts.size()),
                              quantized_mi(colors[c].values, colors[c].absent, cuts));
    }
  }
  double best = 0.0;
  auto recurse = [&](auto&& self, std::size_t c, std::uint32_t left, double acc) -> void {
    if (c == colors.size()) {
      best = std::max(best, acc);
      return;
    }
    for (const auto& [used, mi] : options[c]) {
      if (used <= left) self(self, c + 1, left - used, acc + mi);
    }
  };
  recurse(recurse, 0, extra, 0.0);
  return best;
}

// Degree of every vertex inside the subgraph induced by `alive`.
inline std::vector<std::uint32_t> induced_degrees(const CooccurrenceGraph& g,
                                                  const std::vector<bool>& alive) {
  std::vector<std::uint32_t> deg(g.num_vertices(), 0);
  for (VertexIndex v = 0; v < g.num_vertices(); ++v) {
    if (!alive[v]) continue;
    for (VertexIndex u : g.neighbors(v)) {
      if (alive[u]) ++deg[v];
    }
  }
  return deg;
}

// Random simple graph on vertex ids 1..vertices with each pair present
// independently with probability p, built from its edge list.
inline CooccurrenceGraph random_graph(std::mt19937_64& rng, std::uint32_t vertices, double p) {
  std::vector<FeatureId> ids(vertices);
  for (std::uint32_t i = 0; i < vertices; ++i) ids[i] = i + 1;
  std::vector<Edge> edges;
  std::bernoulli_distribution coin(p);
  for (std::uint32_t a = 0; a < vertices; ++a) {
    for (std::uint32_t b = a + 1; b < vertices; ++b) {
      if (coin(rng)) edges.push_back({ids[a], ids[b]});
    }
  }
  return to_adjacency(edges, ids);
}

}  // namespace chromatic::oracle
