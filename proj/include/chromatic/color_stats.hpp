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
#include <string>
#include <vector>

#include "chromatic/coloring.hpp"
#include "chromatic/dataset.hpp"
#include "chromatic/mutual_information.hpp"

namespace chromatic {

// How a test example keeps one feature per color when several collide.
enum class CollisionPolicy {
  // Keep the least popular (lowest training frequency), ties to the smaller id.
  kDropMorePopular,
  // Keep the smallest feature id.
  kKeepLowestIndex,
};
const char* to_string(CollisionPolicy policy);
CollisionPolicy collision_policy_from_string(const std::string& name);

struct ColorValue {
  std::uint32_t color = 0;
  FeatureId feature = 0;
  friend bool operator==(const ColorValue&, const ColorValue&) = default;
};

struct ChromaticView {
  // At most one entry per color, sorted by color.
  std::vector<ColorValue> values;
  std::size_t unseen = 0;   // active features without a color
  std::size_t dropped = 0;  // features lost to collisions
};

ChromaticView chromatic_view(const Coloring& c, std::span<const FeatureId> active,
                             CollisionPolicy policy);

struct ValueStats {
  FeatureId feature = 0;
  LabelCounts counts;
};

struct ColorStatistics {
  // Sorted by feature id; only values seen at least once.
  std::vector<ValueStats> values;
  LabelCounts present;  // rows where this color has a value
  LabelCounts absent;   // rows where it has none (the "bottom" value)
};

// Per-color label counts from the estimate half.
struct ColorStats {
  std::vector<ColorStatistics> colors;
  LabelCounts total;
  double positive_rate() const {
    return total.rows == 0 ? 0.0
                           : static_cast<double>(total.positives) /
                                 static_cast<double>(total.rows);
  }
};

ColorStats collect_color_stats(const Coloring& c, const SparseDataset& estimate_half,
                               CollisionPolicy policy);

// One color's values ordered by estimated P(Y=1 | X=v) ascending, ties to the
// smaller feature id.
struct SortedColor {
  std::vector<FeatureId> values;
  std::vector<LabelCounts> counts;
  LabelCounts present;
  LabelCounts absent;
};
std::vector<SortedColor> sort_by_positive_rate(const ColorStats& stats);

}  // namespace chromatic
