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


// Acceptance runner: one PASS/FAIL line per criterion. Pass criterion
// numbers as arguments to run a subset. Exits nonzero when a gating
// criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "chromatic/color_stats.hpp"
#include "chromatic/coloring.hpp"
#include "chromatic/cooccurrence_graph.hpp"
#include "chromatic/dataset.hpp"
#include "chromatic/encoders.hpp"
#include "chromatic/experiment.hpp"
#include "chromatic/fidelity.hpp"
#include "chromatic/mutual_information.hpp"
#include "chromatic/submodular.hpp"
#include "chromatic/synthetic.hpp"
#include "instances.hpp"
#include "oracles.hpp"

namespace chromatic {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  bool gating;
  double time_limit;  // seconds, 0 for none
  std::function<Outcome()> run;
};

template <class... Args>
std::string format(const char* fmt, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

struct MeanStd {
  double mean = 0.0;
  double stderr_of_mean = 0.0;
};

MeanStd summarize(const std::vector<double>& xs) {
  MeanStd out;
  for (double x : xs) out.mean += x;
  out.mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  const double var = ss / static_cast<double>(xs.size() - 1);
  out.stderr_of_mean = std::sqrt(var / static_cast<double>(xs.size()));
  return out;
}

constexpr std::array<GreedyOrder, 3> kOrders{GreedyOrder::kDataOrder, GreedyOrder::kAscendingId,
                                             GreedyOrder::kDegreeDescending};

Outcome properness() {
  std::mt19937_64 rng(101);
  std::size_t examples = 0;
  std::size_t collisions = 0;
  std::size_t improper = 0;
  std::uint32_t max_colors = 0;
  for (int d = 0; d < 50; ++d) {
    const SparseDataset ds = oracle::random_dataset(rng, 1000, 500, 10);
    const CooccurrenceGraph g = build_cooccurrence(ds).graph;
    const Coloring c = greedy_color(g, GreedyOrder::kDataOrder, ds.feature_freq(), &ds);
    if (!is_proper(g, c)) ++improper;
    max_colors = std::max(max_colors, c.num_colors());
    for (const Example& ex : ds) {
      ++examples;
      const CollisionCount cc = collision_count(c, ex.active);
      if (cc.collisions != 0 || cc.unseen != 0) ++collisions;
    }
  }
  return {collisions == 0 && improper == 0,
          format("%zu training examples over 50 datasets, %zu with collisions, "
                 "%zu improper colorings, at most %u colors",
                 examples, collisions, improper, max_colors)};
}

Outcome greedy_bound() {
  std::mt19937_64 rng(202);
  std::size_t graphs = 0;
  std::size_t violations = 0;
  auto check = [&](const CooccurrenceGraph& g, const SparseDataset* data) {
    for (GreedyOrder order : kOrders) {
      if (order == GreedyOrder::kDataOrder && data == nullptr) continue;
      const auto colors = greedy_colors(g, vertex_order(g, order, data));
      const std::uint32_t used =
          colors.empty() ? 0 : 1 + *std::max_element(colors.begin(), colors.end());
      ++graphs;
      if (used > g.max_degree() + 1 || !is_proper(g, colors)) ++violations;
    }
  };
  for (int d = 0; d < 50; ++d) {
    const SparseDataset ds = oracle::random_dataset(rng, 1000, 500, 10);
    const CooccurrenceBuild b = build_cooccurrence(ds);
    for (std::uint32_t k = 1; k <= 3; ++k) check(threshold_graph(b.multiset, k), &ds);
  }
  for (int trial = 0; trial < 100; ++trial) {
    const std::uint32_t v = 1 + rng() % 400;
    check(oracle::random_graph(rng, v, std::uniform_real_distribution<double>(0, 0.3)(rng)),
          nullptr);
  }
  return {violations == 0,
          format("%zu greedy colorings, %zu above max degree + 1", graphs, violations)};
}

Outcome parallel_determinism() {
  std::mt19937_64 rng(303);
  std::size_t mismatches = 0;
  std::uint64_t edges = 0;
  for (int d = 0; d < 20; ++d) {
    const SparseDataset ds = oracle::random_dataset(rng, 5000, 3000, 10, 0, 0.8);
    GraphBuildOptions base;
    base.workers = 1;
    const CooccurrenceBuild ref = build_cooccurrence(ds, base);
    edges += ref.multiset.edges.size();
    for (unsigned p : {2u, 4u, 8u}) {
      GraphBuildOptions opt;
      opt.workers = p;
      opt.buffer_capacity = 64 + d;
      const CooccurrenceBuild other = build_cooccurrence(ds, opt);
      if (!(other.multiset.edges == ref.multiset.edges) ||
          !(other.multiset.vertices == ref.multiset.vertices) ||
          !(other.histogram == ref.histogram) || !(other.graph == ref.graph)) {
        ++mismatches;
      }
    }
  }
  return {mismatches == 0,
          format("20 datasets x P in {2,4,8} against P=1, %llu edges compared, %zu mismatches",
                 static_cast<unsigned long long>(edges), mismatches)};
}

Outcome good_turing_identity() {
  std::mt19937_64 rng(404);
  std::size_t checks = 0;
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = 1 + rng() % 50;
    const auto features = static_cast<std::uint32_t>(2 + rng() % 29);
    const auto max_nnz = static_cast<std::uint32_t>(1 + rng() % features);
    const SparseDataset ds = oracle::random_dataset(rng, n, features, max_nnz, 0, 0.7);
    const EdgeHistogram h = build_cooccurrence(ds).histogram;
    for (std::uint32_t k = 1; k <= 3; ++k) {
      ++checks;
      if (good_turing(h, k) != oracle::leave_one_out_new_edges(ds, k)) ++mismatches;
    }
  }
  return {mismatches == 0,
          format("%zu (instance, k) pairs with n <= 50, features <= 30, %zu mismatches", checks,
                 mismatches)};
}

Outcome good_turing_upper_bound() {
  std::mt19937_64 rng(505);
  const int resamples = 200;
  const std::size_t n = 400;
  std::map<std::uint32_t, std::vector<double>> held, estimate, diff;
  for (int r = 0; r < resamples; ++r) {
    const SparseDataset train = oracle::random_dataset(rng, n, 400, 8, 1, 1.0);
    const SparseDataset fresh = oracle::random_dataset(rng, n, 400, 8, 1, 1.0);
    const CooccurrenceBuild b = build_cooccurrence(train);
    for (std::uint32_t k = 1; k <= 3; ++k) {
      const double observed = average_new_edges(threshold_graph(b.multiset, k), fresh);
      const double gt = static_cast<double>(good_turing(b.histogram, k)) / static_cast<double>(n);
      held[k].push_back(observed);
      estimate[k].push_back(gt);
      diff[k].push_back(observed - gt);
    }
  }
  bool pass = true;
  std::ostringstream detail;
  detail << resamples << " resamples;";
  for (std::uint32_t k = 1; k <= 3; ++k) {
    const MeanStd h = summarize(held[k]);
    const MeanStd e = summarize(estimate[k]);
    const MeanStd d = summarize(diff[k]);
    const double limit = e.mean + 3.0 * d.stderr_of_mean;
    pass = pass && h.mean <= limit;
    detail << format(" k=%u held-out %.3f vs N/n %.3f (+3SE %.3f);", k, h.mean, e.mean, limit);
  }
  return {pass, detail.str()};
}

Outcome mi_oracle() {
  std::mt19937_64 rng(606);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<LabelCounts> buckets(rng() % 12);
    const std::uint64_t scale = t % 3 == 0 ? 10 : (t % 3 == 1 ? 1000 : 1000000);
    for (auto& b : buckets) {
      b.rows = rng() % scale;
      b.positives = b.rows == 0 ? 0 : rng() % (b.rows + 1);
    }
    LabelCounts absent;
    absent.rows = rng() % 2 == 0 ? 0 : rng() % scale;
    absent.positives = absent.rows == 0 ? 0 : rng() % (absent.rows + 1);
    std::vector<LabelCounts> outcomes = buckets;
    outcomes.push_back(absent);
    worst = std::max(worst, std::abs(mutual_information(buckets, absent) -
                                     oracle::plug_in_mi(outcomes)));
  }
  return {worst <= 1e-10, format("1000 tables, max |difference| %.3g", worst)};
}

struct SplitterRun {
  std::vector<oracle::ColorInstance> instance;
  std::uint32_t extra;
};

std::vector<SplitterRun> splitter_family() {
  std::mt19937_64 rng(707);
  std::vector<SplitterRun> out;
  for (int t = 0; t < 500; ++t) {
    const auto colors = static_cast<std::uint32_t>(1 + rng() % 3);
    const auto rows = static_cast<std::uint32_t>(40 + rng() % 200);
    out.push_back({oracle::random_instance(rng, colors, 8, rows),
                   static_cast<std::uint32_t>(rng() % 5)});
  }
  return out;
}

Outcome submodular_approximation() {
  const double ratio = 1.0 - 1.0 / std::numbers::e;
  std::size_t below = 0;
  std::size_t increasing = 0;
  double worst_ratio = 1.0;
  for (const SplitterRun& run : splitter_family()) {
    const ColorStats stats = oracle::make_stats(run.instance);
    const auto m = static_cast<std::uint32_t>(run.instance.size());
    const SplitterSolution s = submodular_compress(stats, m + run.extra);
    const double opt = oracle::exhaustive_splitter_optimum(oracle::ranked(run.instance), run.extra);
    if (opt > 0.0) worst_ratio = std::min(worst_ratio, s.objective / opt);
    if (s.objective < ratio * opt - 1e-12) ++below;
    for (std::size_t i = 1; i < s.accepted_gains.size(); ++i) {
      if (s.accepted_gains[i] > s.accepted_gains[i - 1] + 1e-12) {
        ++increasing;
        break;
      }
    }
  }
  return {below == 0 && increasing == 0,
          format("500 instances, %zu below (1-1/e) OPT, %zu with increasing gains, "
                 "worst greedy/OPT %.4f",
                 below, increasing, worst_ratio)};
}

Outcome global_beats_sorting() {
  std::size_t worse = 0;
  std::size_t strict = 0;
  std::size_t comparisons = 0;
  for (const SplitterRun& run : splitter_family()) {
    const ColorStats stats = oracle::make_stats(run.instance);
    const auto m = static_cast<std::uint32_t>(run.instance.size());
    for (std::uint32_t extra = 0; extra <= 4; ++extra) {
      ++comparisons;
      const double g = submodular_compress(stats, m + extra).objective;
      const double h = sorting_heuristic_compress(stats, m + extra).objective;
      if (h > g + 1e-12) ++worse;
      if (g > h + 1e-12) ++strict;
    }
  }
  // A rarely present color that is perfectly informative where present wins
  // on local gain, while splitting the always-present color is worth more
  // to the global objective.
  const std::vector<oracle::ColorInstance> constructed{
      {{{5, 5}, {5, 0}}, {990, 495}},
      {{{500, 350}, {500, 150}}, {0, 0}},
  };
  const ColorStats stats = oracle::make_stats(constructed);
  const double g = submodular_compress(stats, 3).objective;
  const double h = sorting_heuristic_compress(stats, 3).objective;
  const double opt = oracle::exhaustive_splitter_optimum(oracle::ranked(constructed), 1);
  const bool constructed_ok = g > h + 1e-6 && std::abs(g - opt) < 1e-12;
  return {worse == 0 && constructed_ok,
          format("%zu (instance, budget) pairs, heuristic above global in %zu, strictly below "
                 "in %zu; constructed instance global %.5f vs heuristic %.5f",
                 comparisons, worse, strict, g, h)};
}

Outcome hashing_unbiased() {
  const std::vector<FeatureId> x{11, 23, 35, 47, 59, 71};
  const std::vector<FeatureId> y{35, 47, 59, 83, 95};
  const int seeds = 10000;
  double sum = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const HashingParams p{static_cast<std::uint64_t>(s)};
    sum += hashing_project(p, 64, x).dot(hashing_project(p, 64, y));
  }
  const double mean = sum / seeds;
  return {std::abs(mean - 3.0) <= 0.02 * 3.0,
          format("<x,y> = 3, d = 64, mean over %d seeds %.4f", seeds, mean)};
}

Outcome glauber_uniform() {
  const CooccurrenceGraph triangle =
      to_adjacency(std::vector<Edge>{{1, 2}, {1, 3}, {2, 3}}, std::vector<FeatureId>{1, 2, 3});
  const int runs = 10000;
  std::map<std::array<std::uint32_t, 3>, int> counts;
  bool improper = false;
  for (int r = 0; r < runs; ++r) {
    const GlauberResult g = glauber_sample(triangle, 4, 100000, static_cast<std::uint64_t>(r));
    improper = improper || !is_proper(triangle, g.colors);
    ++counts[{g.colors[0], g.colors[1], g.colors[2]}];
  }
  const double expected = runs / 24.0;
  double chi2 = 0.0;
  for (const auto& [coloring, count] : counts) {
    chi2 += (count - expected) * (count - expected) / expected;
  }
  chi2 += static_cast<double>(24 - static_cast<int>(counts.size())) * expected;
  return {!improper && counts.size() == 24 && chi2 < 41.64,
          format("%d runs x 1e5 steps, %zu distinct colorings, chi-square %.2f (limit 41.64)",
                 runs, counts.size(), chi2)};
}

Outcome filtering_rule() {
  std::mt19937_64 rng(1111);
  std::size_t wrong_prefix = 0;
  std::size_t wrong_order = 0;
  std::size_t total_vertices = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto v = static_cast<std::uint32_t>(1 + rng() % 1000);
    const double avg_degree = std::uniform_real_distribution<double>(0.5, 40.0)(rng);
    const double p = v > 1 ? std::min(1.0, avg_degree / (v - 1)) : 0.0;
    const CooccurrenceGraph g = oracle::random_graph(rng, v, p);
    total_vertices += v;
    const LargestFirstOrder lf = largest_first_order(g);
    const FilterResult fr = filter_high_degree(g, lf);

    std::vector<std::uint32_t> deg(v);
    for (VertexIndex u = 0; u < v; ++u) deg[u] = static_cast<std::uint32_t>(g.neighbors(u).size());
    std::vector<bool> alive(v, true);
    std::optional<std::size_t> minimal;
    std::uint32_t delta_at_minimal = 0;
    bool order_ok = lf.order.size() == v;
    for (std::size_t i = 0; i <= v && order_ok; ++i) {
      std::uint32_t maxdeg = 0;
      for (VertexIndex u = 0; u < v; ++u) {
        if (alive[u]) maxdeg = std::max(maxdeg, deg[u]);
      }
      if (!minimal && i >= 2 * static_cast<std::size_t>(maxdeg)) {
        minimal = i;
        delta_at_minimal = maxdeg;
      }
      if (i == v) break;
      const VertexIndex removed = lf.order[i];
      if (!alive[removed] || deg[removed] != maxdeg || lf.removal_degree[i] != maxdeg) {
        order_ok = false;
        break;
      }
      alive[removed] = false;
      for (VertexIndex w : g.neighbors(removed)) {
        if (alive[w]) --deg[w];
      }
    }
    if (!order_ok) ++wrong_order;
    if (!minimal || fr.held_out.size() != *minimal || fr.delta_f != delta_at_minimal ||
        fr.filtered_graph.num_vertices() != v - fr.held_out.size()) {
      ++wrong_prefix;
    } else {
      for (std::size_t i = 0; i < fr.held_out.size(); ++i) {
        if (fr.held_out[i] != g.vertex_id(lf.order[i])) {
          ++wrong_prefix;
          break;
        }
      }
    }
  }
  return {wrong_prefix == 0 && wrong_order == 0,
          format("100 graphs, %zu vertices total, %zu wrong prefixes, %zu orders violating the "
                 "largest-first property",
                 total_vertices, wrong_prefix, wrong_order)};
}

struct PlantedSplit {
  SparseDataset train;
  SparseDataset test;
  std::shared_ptr<const Coloring> coloring;
};

PlantedSplit planted(std::uint64_t seed) {
  SyntheticConfig config;
  config.seed = seed;
  auto [train, test] = chronological_split(generate_planted(config), 0.8);
  const CooccurrenceGraph g = build_cooccurrence(train).graph;
  auto coloring = std::make_shared<const Coloring>(
      greedy_color(g, GreedyOrder::kDataOrder, train.feature_freq(), &train));
  return {std::move(train), std::move(test), std::move(coloring)};
}

Outcome end_to_end() {
  bool pass = true;
  std::ostringstream detail;
  for (std::uint64_t seed : {1, 2, 3}) {
    const PlantedSplit data = planted(seed);
    detail << format("seed %llu (%u colors):", static_cast<unsigned long long>(seed),
                     data.coloring->num_colors());
    for (std::uint32_t budget : {64u, 256u}) {
      std::map<EncoderKind, double> loss;
      for (EncoderKind kind :
           {EncoderKind::kChromaticSubmodular, EncoderKind::kFrequency, EncoderKind::kHashing}) {
        ExperimentConfig config;
        config.encoder = kind;
        config.budget = budget;
        config.hashing_seed = seed;
        loss[kind] = run_experiment(config, data.coloring, data.train, data.test).test_loss;
      }
      const double sm = loss[EncoderKind::kChromaticSubmodular];
      pass = pass && sm < loss[EncoderKind::kFrequency] && sm < loss[EncoderKind::kHashing];
      detail << format(" b=%u CL+SM %.4f FT %.4f HT %.4f;", budget, sm,
                       loss[EncoderKind::kFrequency], loss[EncoderKind::kHashing]);
    }
    detail << ' ';
  }
  return {pass, detail.str()};
}

Outcome sample_splitting() {
  const PlantedSplit data = planted(1);
  const HashSplit halves = hash_split(data.train);
  bool pass = true;
  std::ostringstream detail;
  for (std::uint32_t budget : {256u, 1024u}) {
    ExperimentConfig split;
    split.encoder = EncoderKind::kChromaticSubmodular;
    split.budget = budget;
    const ExperimentResult s = run_experiment(split, data.coloring, data.train, data.test);
    ExperimentConfig dip = split;
    dip.double_dip = true;
    const ExperimentResult d = run_experiment(dip, data.coloring, halves.fit_half, data.test);
    pass = pass && d.train_loss < s.train_loss && d.test_loss >= s.test_loss;
    detail << format("b=%u split train %.4f test %.4f, double-dip train %.4f test %.4f; ", budget,
                     s.train_loss, s.test_loss, d.train_loss, d.test_loss);
  }
  return {pass, detail.str()};
}

Outcome full_scale() {
  return {false,
          "needs the public url/kdda/kddb/kdd12 files and large-memory hardware; run "
          "tools/full_scale.sh to check the color counts and collision rates"};
}

}  // namespace
}  // namespace chromatic

int main(int argc, char** argv) {
  using namespace chromatic;
  const std::vector<Criterion> criteria{
      {1, true, 10.0, properness},
      {2, true, 0.0, greedy_bound},
      {3, true, 30.0, parallel_determinism},
      {4, true, 0.0, good_turing_identity},
      {5, true, 0.0, good_turing_upper_bound},
      {6, true, 0.0, mi_oracle},
      {7, true, 0.0, submodular_approximation},
      {8, true, 0.0, global_beats_sorting},
      {9, true, 0.0, hashing_unbiased},
      {10, true, 60.0, glauber_uniform},
      {11, true, 0.0, filtering_rule},
      {12, true, 300.0, end_to_end},
      {13, true, 0.0, sample_splitting},
      {14, false, 0.0, full_scale},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    if (!c.gating) {
      const Outcome o = c.run();
      std::printf("criterion %2d: SKIP (non-gating) %s\n", c.id, o.detail.c_str());
      std::fflush(stdout);
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.time_limit == 0.0 || seconds < c.time_limit;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::string timing = format("%.2fs", seconds);
    if (c.time_limit > 0.0) timing += format(" of %.0fs", c.time_limit);
    std::printf("criterion %2d: %s [%s] %s\n", c.id, pass ? "PASS" : "FAIL", timing.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
