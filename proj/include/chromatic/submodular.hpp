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
#include <stdexcept>
#include <vector>

#include "chromatic/color_stats.hpp"

namespace chromatic {

// Contiguous quantization of one color's probability-sorted values.
// A splitter at position s (1 <= s < D) separates sorted_values[s-1] from
// sorted_values[s]; bucket j holds ranks [s_j, s_{j+1}) with s_0 = 0 and
// s_last = D.
struct ColorBuckets {
  std::vector<FeatureId> sorted_values;
  std::vector<std::uint32_t> splitters;  // ascending
  std::uint32_t bucket_offset = 0;       // global index of bucket 0
  // Bucket for values of this color that have no statistics: the one where
  // a value with the color's pooled positive rate would be ranked.
  std::uint32_t catch_all = 0;

  std::uint32_t bucket_count() const {
    return static_cast<std::uint32_t>(splitters.size()) + 1;
  }
  std::uint32_t bucket_of_rank(std::uint32_t rank) const;
};

struct SplitterSolution {
  std::vector<ColorBuckets> colors;
  std::uint32_t output_dim = 0;
  // sum_i I(Z_i(X_i); Y) in nats, each color's absent rows counted as their
  // own outcome.
  double objective = 0.0;
  // Marginal gain of each accepted splitter, in acceptance order.
  std::vector<double> accepted_gains;
};

class BudgetError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Global lazy greedy over every color's candidate splitters at once. Starts
// from one bucket per color (m budget units) and adds up to budget - m
// splitters; stops early only when no candidate is left. Throws BudgetError
// when budget < number of colors.
SplitterSolution submodular_compress(const ColorStats& stats, std::uint32_t budget);

// Comparison baseline: each color is compressed on its own rows (absent rows
// excluded) to saturation, the per-color selections are pooled and ranked by
// their solution-local gains, and the top budget - m are kept.
SplitterSolution sorting_heuristic_compress(const ColorStats& stats, std::uint32_t budget);

// Objective of arbitrary per-color splitter sets (positions into the sorted
// order produced by sort_by_positive_rate).
double splitter_objective(const std::vector<SortedColor>& sorted,
                          const std::vector<std::vector<std::uint32_t>>& splitters);

}  // namespace chromatic
