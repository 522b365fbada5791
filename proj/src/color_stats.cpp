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

#include "chromatic/color_stats.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace chromatic {

const char* to_string(CollisionPolicy policy) {
  switch (policy) {
    case CollisionPolicy::kDropMorePopular: return "popular";
    case CollisionPolicy::kKeepLowestIndex: return "lowest";
  }
  return "?";
}

CollisionPolicy collision_policy_from_string(const std::string& name) {
  if (name == "popular") return CollisionPolicy::kDropMorePopular;
  if (name == "lowest") return CollisionPolicy::kKeepLowestIndex;
  throw std::invalid_argument("unknown collision policy '" + name + "'");
}

ChromaticView chromatic_view(const Coloring& c, std::span<const FeatureId> active,
                             CollisionPolicy policy) {
  struct Candidate {
    std::uint32_t color;
    std::uint64_t popularity;
    FeatureId feature;
  };
  ChromaticView view;
  std::vector<Candidate> candidates;
  candidates.reserve(active.size());
  for (FeatureId f : active) {
    if (const Coloring::Entry* e = c.find(f)) {
      candidates.push_back({e->color, e->popularity, f});
    } else {
      ++view.unseen;
    }
  }
  // Within a color the winner sorts first.
  std::sort(candidates.begin(), candidates.end(), [policy](const Candidate& a, const Candidate& b) {
    if (a.color != b.color) return a.color < b.color;
    if (policy == CollisionPolicy::kDropMorePopular && a.popularity != b.popularity) {
      return a.popularity < b.popularity;
    }
    return a.feature < b.feature;
  });
  for (const Candidate& cand : candidates) {
    if (!view.values.empty() && view.values.back().color == cand.color) {
      ++view.dropped;
      continue;
    }
    view.values.push_back({cand.color, cand.feature});
  }
  return view;
}

ColorStats collect_color_stats(const Coloring& c, const SparseDataset& estimate_half,
                               CollisionPolicy policy) {
  const std::uint32_t m = c.num_colors();
  std::vector<std::unordered_map<FeatureId, LabelCounts>> tallies(m);
  ColorStats stats;
  stats.colors.resize(m);
  for (const Example& ex : estimate_half) {
    stats.total += LabelCounts{1, ex.label};
    for (const ColorValue& cv : chromatic_view(c, ex.active, policy).values) {
      tallies[cv.color][cv.feature] += LabelCounts{1, ex.label};
      stats.colors[cv.color].present += LabelCounts{1, ex.label};
    }
  }
  for (std::uint32_t i = 0; i < m; ++i) {
    ColorStatistics& color = stats.colors[i];
    color.values.reserve(tallies[i].size());
    for (const auto& [f, counts] : tallies[i]) color.values.push_back({f, counts});
    std::sort(color.values.begin(), color.values.end(),
              [](const ValueStats& a, const ValueStats& b) { return a.feature < b.feature; });
    color.absent = stats.total - color.present;
  }
  return stats;
}

std::vector<SortedColor> sort_by_positive_rate(const ColorStats& stats) {
  std::vector<SortedColor> out(stats.colors.size());
  for (std::size_t i = 0; i < stats.colors.size(); ++i) {
    const auto& values = stats.colors[i].values;
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    // p_a / n_a < p_b / n_b  <=>  p_a * n_b < p_b * n_a
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto lhs = static_cast<unsigned __int128>(values[a].counts.positives) *
                       values[b].counts.rows;
      const auto rhs = static_cast<unsigned __int128>(values[b].counts.positives) *
                       values[a].counts.rows;
      if (lhs != rhs) return lhs < rhs;
      return values[a].feature < values[b].feature;
    });
    SortedColor& sc = out[i];
    sc.present = stats.colors[i].present;
    sc.absent = stats.colors[i].absent;
    for (std::size_t j : order) {
      sc.values.push_back(values[j].feature);
      sc.counts.push_back(values[j].counts);
    }
  }
  return out;
}

}  // namespace chromatic
