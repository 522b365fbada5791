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

#include "chromatic/submodular.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <tuple>

namespace chromatic {

std::uint32_t ColorBuckets::bucket_of_rank(std::uint32_t rank) const {
  return static_cast<std::uint32_t>(
      std::upper_bound(splitters.begin(), splitters.end(), rank) - splitters.begin());
}

namespace {

// Prefix sums over one color's sorted value counts plus the marginal the
// information terms are measured against.
class ColorPrefix {
 public:
  ColorPrefix(const SortedColor& color, double total_rows, double positive_rate)
      : total_rows_(total_rows), positive_rate_(positive_rate) {
    prefix_.reserve(color.counts.size() + 1);
    prefix_.push_back({});
    for (const LabelCounts& c : color.counts) prefix_.push_back(prefix_.back() + c);
  }

  std::uint32_t size() const { return static_cast<std::uint32_t>(prefix_.size() - 1); }

  double bucket(std::uint32_t lo, std::uint32_t hi) const {
    return outcome_information(prefix_[hi] - prefix_[lo], total_rows_, positive_rate_);
  }

  // Gain of adding splitter s given the current splitter set.
  double gain(const std::set<std::uint32_t>& current, std::uint32_t s) const {
    auto next = current.upper_bound(s);
    const std::uint32_t hi = next == current.end() ? size() : *next;
    const std::uint32_t lo = next == current.begin() ? 0 : *std::prev(next);
    return bucket(lo, s) + bucket(s, hi) - bucket(lo, hi);
  }

 private:
  std::vector<LabelCounts> prefix_;
  double total_rows_;
  double positive_rate_;
};

struct Candidate {
  double gain;
  std::uint32_t color;
  std::uint32_t position;
};

// Max-heap order: larger gain first, then smaller color, then smaller position.
struct CandidateLess {
  bool operator()(const Candidate& a, const Candidate& b) const {
    if (a.gain != b.gain) return a.gain < b.gain;
    return std::tie(a.color, a.position) > std::tie(b.color, b.position);
  }
};

struct GreedyTrace {
  std::vector<std::set<std::uint32_t>> splitters;
  std::vector<Candidate> accepted;  // gain is the fresh gain at acceptance
};

// Lazy greedy over the candidate positions of the given colors. Stale gains
// upper-bound fresh ones, so a fresh gain that still beats every stale entry
// is the true maximum.
GreedyTrace lazy_greedy(const std::vector<ColorPrefix>& prefixes,
                        const std::vector<std::uint32_t>& colors, std::size_t picks) {
  GreedyTrace trace;
  trace.splitters.resize(prefixes.size());
  std::priority_queue<Candidate, std::vector<Candidate>, CandidateLess> heap;
  for (std::uint32_t i : colors) {
    for (std::uint32_t s = 1; s < prefixes[i].size(); ++s) {
      heap.push({prefixes[i].gain(trace.splitters[i], s), i, s});
    }
  }
  CandidateLess less;
  while (trace.accepted.size() < picks && !heap.empty()) {
    Candidate top = heap.top();
    heap.pop();
    top.gain = prefixes[top.color].gain(trace.splitters[top.color], top.position);
    if (heap.empty() || !less(top, heap.top())) {
      trace.splitters[top.color].insert(top.position);
      trace.accepted.push_back(top);
    } else {
      heap.push(top);
    }
  }
  return trace;
}

void check_budget(const ColorStats& stats, std::uint32_t budget) {
  if (budget < stats.colors.size()) {
    throw BudgetError("budget " + std::to_string(budget) + " is below the " +
                      std::to_string(stats.colors.size()) +
                      " colors; use a larger budget or a coloring with fewer colors");
  }
}

SplitterSolution assemble(const std::vector<SortedColor>& sorted,
                          const std::vector<std::set<std::uint32_t>>& splitters) {
  SplitterSolution out;
  std::vector<std::vector<std::uint32_t>> as_vectors;
  std::uint32_t offset = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    ColorBuckets b;
    b.sorted_values = sorted[i].values;
    b.splitters.assign(splitters[i].begin(), splitters[i].end());
    b.bucket_offset = offset;
    // Rank of a value with the color's pooled rate: the number of values
    // whose estimated rate is strictly below it.
    const LabelCounts pooled = sorted[i].present;
    std::uint32_t rank = 0;
    while (rank < sorted[i].counts.size()) {
      const LabelCounts& c = sorted[i].counts[rank];
      if (static_cast<unsigned __int128>(c.positives) * pooled.rows >=
          static_cast<unsigned __int128>(pooled.positives) * c.rows) {
        break;
      }
      ++rank;
    }
    b.catch_all = b.bucket_of_rank(rank);
    offset += b.bucket_count();
    as_vectors.push_back(b.splitters);
    out.colors.push_back(std::move(b));
  }
  out.output_dim = offset;
  out.objective = splitter_objective(sorted, as_vectors);
  return out;
}

}  // namespace

double splitter_objective(const std::vector<SortedColor>& sorted,
                          const std::vector<std::vector<std::uint32_t>>& splitters) {
  double total = 0.0;
  std::vector<LabelCounts> buckets;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    buckets.clear();
    std::size_t next = 0;
    LabelCounts current;
    for (std::uint32_t r = 0; r < sorted[i].counts.size(); ++r) {
      if (next < splitters[i].size() && splitters[i][next] == r) {
        buckets.push_back(current);
        current = {};
        ++next;
      }
      current += sorted[i].counts[r];
    }
    buckets.push_back(current);
    total += mutual_information(buckets, sorted[i].absent);
  }
  return total;
}

SplitterSolution submodular_compress(const ColorStats& stats, std::uint32_t budget) {
  check_budget(stats, budget);
  const auto sorted = sort_by_positive_rate(stats);
  const double rows = static_cast<double>(stats.total.rows);
  std::vector<ColorPrefix> prefixes;
  std::vector<std::uint32_t> colors;
  for (std::uint32_t i = 0; i < sorted.size(); ++i) {
    prefixes.emplace_back(sorted[i], rows, stats.positive_rate());
    colors.push_back(i);
  }
  const std::size_t extra = budget - stats.colors.size();
  GreedyTrace trace = lazy_greedy(prefixes, colors, extra);
  SplitterSolution out = assemble(sorted, trace.splitters);
  for (const Candidate& c : trace.accepted) out.accepted_gains.push_back(c.gain);
  return out;
}

SplitterSolution sorting_heuristic_compress(const ColorStats& stats, std::uint32_t budget) {
  check_budget(stats, budget);
  const auto sorted = sort_by_positive_rate(stats);
  const std::size_t extra = budget - stats.colors.size();

  struct Selection {
    double local_gain;
    std::uint32_t color;
    std::uint32_t sequence;
    std::uint32_t position;
  };
  std::vector<Selection> pool;
  for (std::uint32_t i = 0; i < sorted.size(); ++i) {
    const LabelCounts present = sorted[i].present;
    if (present.rows == 0) continue;
    const double rate = static_cast<double>(present.positives) /
                        static_cast<double>(present.rows);
    const std::vector<ColorPrefix> prefixes{
        ColorPrefix(sorted[i], static_cast<double>(present.rows), rate)};
    const GreedyTrace trace = lazy_greedy(prefixes, {0}, extra);
    for (std::uint32_t seq = 0; seq < trace.accepted.size(); ++seq) {
      pool.push_back({trace.accepted[seq].gain, i, seq, trace.accepted[seq].position});
    }
  }
  std::sort(pool.begin(), pool.end(), [](const Selection& a, const Selection& b) {
    if (a.local_gain != b.local_gain) return a.local_gain > b.local_gain;
    return std::tie(a.color, a.sequence) < std::tie(b.color, b.sequence);
  });
  if (pool.size() > extra) pool.resize(extra);

  std::vector<std::set<std::uint32_t>> splitters(sorted.size());
  for (const Selection& s : pool) splitters[s.color].insert(s.position);
  SplitterSolution out = assemble(sorted, splitters);
  for (const Selection& s : pool) out.accepted_gains.push_back(s.local_gain);
  return out;
}

}  // namespace chromatic
