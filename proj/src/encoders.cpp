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

#include "chromatic/encoders.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

#include "chromatic/hashing.hpp"

namespace chromatic {
namespace {

constexpr int kEncoderFormatVersion = 1;
constexpr std::uint64_t kBucketSalt = 0x6275636b65745f68ULL;
constexpr std::uint64_t kSignSalt = 0x7369676e5f686173ULL;

std::unordered_map<FeatureId, std::uint32_t> bucket_index(const SplitterSolution& s) {
  std::unordered_map<FeatureId, std::uint32_t> index;
  for (const ColorBuckets& b : s.colors) {
    for (std::uint32_t r = 0; r < b.sorted_values.size(); ++r) {
      index.emplace(b.sorted_values[r], b.bucket_offset + b.bucket_of_rank(r));
    }
  }
  return index;
}

nlohmann::json coloring_json(const Coloring& c) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [f, e] : c.sorted_entries()) arr.push_back({f, e.color, e.popularity});
  return arr;
}

std::shared_ptr<const Coloring> coloring_from_json(const nlohmann::json& arr) {
  std::unordered_map<FeatureId, Coloring::Entry> entries;
  for (const auto& item : arr) {
    entries.emplace(item.at(0).get<FeatureId>(),
                    Coloring::Entry{item.at(1).get<std::uint32_t>(),
                                    item.at(2).get<std::uint64_t>()});
  }
  return std::make_shared<const Coloring>(std::move(entries));
}

template <class Map>
nlohmann::json sorted_pairs(const Map& map) {
  std::vector<std::pair<FeatureId, typename Map::mapped_type>> items(map.begin(), map.end());
  std::sort(items.begin(), items.end());
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [k, v] : items) arr.push_back({k, v});
  return arr;
}

void require_coloring(const std::shared_ptr<const Coloring>& c) {
  if (!c) throw std::invalid_argument("chromatic encoders need a coloring");
}

}  // namespace

const char* to_string(EncoderKind kind) {
  switch (kind) {
    case EncoderKind::kChromaticSubmodular: return "clsm";
    case EncoderKind::kChromaticTarget: return "clte";
    case EncoderKind::kChromaticFrequency: return "clft";
    case EncoderKind::kFrequency: return "ft";
    case EncoderKind::kHashing: return "ht";
  }
  return "?";
}

EncoderKind encoder_kind_from_string(const std::string& name) {
  if (name == "clsm") return EncoderKind::kChromaticSubmodular;
  if (name == "clte") return EncoderKind::kChromaticTarget;
  if (name == "clft") return EncoderKind::kChromaticFrequency;
  if (name == "ft") return EncoderKind::kFrequency;
  if (name == "ht") return EncoderKind::kHashing;
  throw std::invalid_argument("unknown encoder '" + name + "'");
}

std::uint32_t HashingParams::bucket(FeatureId f, std::uint32_t width) const {
  return static_cast<std::uint32_t>(hash_combine(mix64(seed ^ kBucketSalt), f) % width);
}

double HashingParams::sign(FeatureId f) const {
  return (hash_combine(mix64(seed ^ kSignSalt), f) >> 63) ? 1.0 : -1.0;
}

Eigen::VectorXd hashing_project(const HashingParams& params, std::uint32_t width,
                                std::span<const FeatureId> active) {
  if (width == 0) throw std::invalid_argument("hashing width must be >= 1");
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(width);
  for (FeatureId f : active) phi[params.bucket(f, width)] += params.sign(f);
  return phi;
}

Encoder::Encoder(EncoderKind kind, std::uint32_t budget, std::uint32_t output_dim,
                 std::uint32_t dense_dim, CollisionPolicy policy,
                 std::shared_ptr<const Coloring> coloring, Payload payload)
    : kind_(kind),
      budget_(budget),
      output_dim_(output_dim),
      dense_dim_(dense_dim),
      policy_(policy),
      coloring_(std::move(coloring)),
      payload_(std::move(payload)) {}

void Encoder::append_dense(const Example& ex, EncodedRow& row) const {
  if (ex.dense.size() != dense_dim_) {
    throw std::invalid_argument("example dense width " + std::to_string(ex.dense.size()) +
                                " does not match encoder dense width " +
                                std::to_string(dense_dim_));
  }
  for (std::uint32_t j = 0; j < dense_dim_; ++j) {
    row.indices.push_back(output_dim_ + j);
    row.values.push_back(ex.dense[j]);
  }
}

EncodedRow Encoder::transform(const Example& ex) const {
  EncodedRow row;
  row.label = ex.label;
  switch (kind_) {
    case EncoderKind::kChromaticSubmodular: {
      const auto& table = std::get<SubmodularTable>(payload_);
      for (const ColorValue& cv : chromatic_view(*coloring_, ex.active, policy_).values) {
        auto it = table.index.find(cv.feature);
        const ColorBuckets& b = table.solution.colors[cv.color];
        row.indices.push_back(it != table.index.end() ? it->second
                                                      : b.bucket_offset + b.catch_all);
        row.values.push_back(1.0);
      }
      break;
    }
    case EncoderKind::kChromaticTarget: {
      const auto& table = std::get<TargetTable>(payload_);
      std::vector<double> encoded(output_dim_, table.prior);
      for (const ColorValue& cv : chromatic_view(*coloring_, ex.active, policy_).values) {
        auto it = table.value.find(cv.feature);
        if (it != table.value.end()) encoded[cv.color] = it->second;
      }
      for (std::uint32_t i = 0; i < output_dim_; ++i) {
        row.indices.push_back(i);
        row.values.push_back(encoded[i]);
      }
      break;
    }
    case EncoderKind::kChromaticFrequency: {
      const auto& table = std::get<ColorFrequencyTable>(payload_);
      for (const ColorValue& cv : chromatic_view(*coloring_, ex.active, policy_).values) {
        auto it = table.index.find(cv.feature);
        if (it == table.index.end()) continue;
        row.indices.push_back(it->second);
        row.values.push_back(1.0);
      }
      break;
    }
    case EncoderKind::kFrequency: {
      const auto& table = std::get<FrequencyTable>(payload_);
      for (FeatureId f : ex.active) {
        auto it = table.index.find(f);
        if (it != table.index.end()) row.indices.push_back(it->second);
      }
      std::sort(row.indices.begin(), row.indices.end());
      row.values.assign(row.indices.size(), 1.0);
      break;
    }
    case EncoderKind::kHashing: {
      const auto& params = std::get<HashingParams>(payload_);
      std::map<std::uint32_t, double> sums;
      for (FeatureId f : ex.active) sums[params.bucket(f, output_dim_)] += params.sign(f);
      for (const auto& [i, v] : sums) {
        if (v == 0.0) continue;
        row.indices.push_back(i);
        row.values.push_back(v);
      }
      break;
    }
  }
  append_dense(ex, row);
  return row;
}

std::vector<EncodedRow> Encoder::transform(const SparseDataset& ds) const {
  std::vector<EncodedRow> rows;
  rows.reserve(ds.size());
  for (const Example& ex : ds) rows.push_back(transform(ex));
  return rows;
}

Encoder make_submodular_encoder(std::shared_ptr<const Coloring> coloring,
                                SplitterSolution solution, std::uint32_t budget,
                                CollisionPolicy policy, std::uint32_t dense_dim) {
  require_coloring(coloring);
  if (solution.colors.size() != coloring->num_colors()) {
    throw std::invalid_argument("splitter solution and coloring disagree on color count");
  }
  SubmodularTable table;
  table.index = bucket_index(solution);
  const std::uint32_t dim = solution.output_dim;
  table.solution = std::move(solution);
  return Encoder(EncoderKind::kChromaticSubmodular, budget, dim, dense_dim, policy,
                 std::move(coloring), std::move(table));
}

Encoder make_submodular_encoder(std::shared_ptr<const Coloring> coloring,
                                const ColorStats& stats, std::uint32_t budget,
                                CollisionPolicy policy, std::uint32_t dense_dim) {
  return make_submodular_encoder(std::move(coloring), submodular_compress(stats, budget),
                                 budget, policy, dense_dim);
}

Encoder make_target_encoder(std::shared_ptr<const Coloring> coloring, const ColorStats& stats,
                            double smoothing, CollisionPolicy policy,
                            std::uint32_t dense_dim) {
  require_coloring(coloring);
  if (smoothing < 0.0) throw std::invalid_argument("smoothing must be >= 0");
  TargetTable table;
  table.prior = stats.positive_rate();
  table.smoothing = smoothing;
  for (const ColorStatistics& color : stats.colors) {
    for (const ValueStats& v : color.values) {
      table.value[v.feature] =
          (static_cast<double>(v.counts.positives) + smoothing * table.prior) /
          (static_cast<double>(v.counts.rows) + smoothing);
    }
  }
  const auto m = static_cast<std::uint32_t>(stats.colors.size());
  return Encoder(EncoderKind::kChromaticTarget, m, m, dense_dim, policy, std::move(coloring),
                 std::move(table));
}

Encoder make_cl_frequency_encoder(std::shared_ptr<const Coloring> coloring,
                                  const SparseDataset& train, std::uint32_t budget,
                                  CollisionPolicy policy) {
  require_coloring(coloring);
  if (budget < 1) throw std::invalid_argument("budget must be >= 1");
  std::unordered_map<FeatureId, std::pair<std::uint32_t, std::uint64_t>> counts;
  for (const Example& ex : train) {
    for (const ColorValue& cv : chromatic_view(*coloring, ex.active, policy).values) {
      auto& entry = counts[cv.feature];
      entry.first = cv.color;
      ++entry.second;
    }
  }
  struct Item {
    FeatureId feature;
    std::uint32_t color;
    std::uint64_t count;
  };
  std::vector<Item> items;
  items.reserve(counts.size());
  for (const auto& [f, cc] : counts) items.push_back({f, cc.first, cc.second});
  auto by_frequency = [](const Item& a, const Item& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.feature < b.feature;
  };
  std::sort(items.begin(), items.end(), by_frequency);
  if (items.size() > budget) items.resize(budget);
  std::stable_sort(items.begin(), items.end(),
                   [](const Item& a, const Item& b) { return a.color < b.color; });

  const std::uint32_t m = coloring->num_colors();
  ColorFrequencyTable table;
  table.block_offset.assign(m + 1, 0);
  for (const Item& it : items) ++table.block_offset[it.color + 1];
  std::partial_sum(table.block_offset.begin(), table.block_offset.end(),
                   table.block_offset.begin());
  for (std::uint32_t i = 0; i < items.size(); ++i) table.index.emplace(items[i].feature, i);
  const auto dim = static_cast<std::uint32_t>(items.size());
  return Encoder(EncoderKind::kChromaticFrequency, budget, dim,
                 static_cast<std::uint32_t>(train.dense_ids().size()), policy,
                 std::move(coloring), std::move(table));
}

Encoder make_frequency_encoder(const SparseDataset& train, std::uint32_t budget) {
  if (budget < 1) throw std::invalid_argument("budget must be >= 1");
  std::vector<std::pair<FeatureId, std::uint64_t>> items(train.feature_freq().begin(),
                                                         train.feature_freq().end());
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (items.size() > budget) items.resize(budget);
  FrequencyTable table;
  for (std::uint32_t i = 0; i < items.size(); ++i) table.index.emplace(items[i].first, i);
  return Encoder(EncoderKind::kFrequency, budget, static_cast<std::uint32_t>(items.size()),
                 static_cast<std::uint32_t>(train.dense_ids().size()),
                 CollisionPolicy::kDropMorePopular, nullptr, std::move(table));
}

Encoder make_hashing_encoder(std::uint32_t width, std::uint64_t seed, std::uint32_t dense_dim) {
  if (width < 1) throw std::invalid_argument("hashing width must be >= 1");
  return Encoder(EncoderKind::kHashing, width, width, dense_dim,
                 CollisionPolicy::kDropMorePopular, nullptr, HashingParams{seed});
}

nlohmann::json Encoder::to_json() const {
  nlohmann::json j;
  j["format_version"] = kEncoderFormatVersion;
  j["variant"] = to_string(kind_);
  j["budget"] = budget_;
  j["output_dim"] = output_dim_;
  j["dense_dim"] = dense_dim_;
  j["policy"] = to_string(policy_);
  if (coloring_) j["coloring"] = coloring_json(*coloring_);
  switch (kind_) {
    case EncoderKind::kChromaticSubmodular: {
      const auto& s = std::get<SubmodularTable>(payload_).solution;
      nlohmann::json colors = nlohmann::json::array();
      for (const ColorBuckets& b : s.colors) {
        colors.push_back({{"sorted_values", b.sorted_values},
                          {"splitters", b.splitters},
                          {"bucket_offset", b.bucket_offset},
                          {"catch_all", b.catch_all}});
      }
      j["colors"] = colors;
      j["objective"] = s.objective;
      j["accepted_gains"] = s.accepted_gains;
      break;
    }
    case EncoderKind::kChromaticTarget: {
      const auto& t = std::get<TargetTable>(payload_);
      j["prior"] = t.prior;
      j["smoothing"] = t.smoothing;
      j["values"] = sorted_pairs(t.value);
      break;
    }
    case EncoderKind::kChromaticFrequency: {
      const auto& t = std::get<ColorFrequencyTable>(payload_);
      j["index"] = sorted_pairs(t.index);
      j["block_offset"] = t.block_offset;
      break;
    }
    case EncoderKind::kFrequency:
      j["index"] = sorted_pairs(std::get<FrequencyTable>(payload_).index);
      break;
    case EncoderKind::kHashing:
      j["seed"] = std::get<HashingParams>(payload_).seed;
      break;
  }
  return j;
}

Encoder Encoder::from_json(const nlohmann::json& j) {
  if (j.at("format_version").get<int>() != kEncoderFormatVersion) {
    throw std::runtime_error("unsupported encoder format version");
  }
  const EncoderKind kind = encoder_kind_from_string(j.at("variant").get<std::string>());
  const auto budget = j.at("budget").get<std::uint32_t>();
  const auto output_dim = j.at("output_dim").get<std::uint32_t>();
  const auto dense_dim = j.at("dense_dim").get<std::uint32_t>();
  const CollisionPolicy policy = collision_policy_from_string(j.at("policy").get<std::string>());
  std::shared_ptr<const Coloring> coloring;
  if (j.contains("coloring")) coloring = coloring_from_json(j.at("coloring"));

  auto read_index = [](const nlohmann::json& arr) {
    std::unordered_map<FeatureId, std::uint32_t> index;
    for (const auto& item : arr) {
      index.emplace(item.at(0).get<FeatureId>(), item.at(1).get<std::uint32_t>());
    }
    return index;
  };

  switch (kind) {
    case EncoderKind::kChromaticSubmodular: {
      SplitterSolution s;
      for (const auto& c : j.at("colors")) {
        ColorBuckets b;
        b.sorted_values = c.at("sorted_values").get<std::vector<FeatureId>>();
        b.splitters = c.at("splitters").get<std::vector<std::uint32_t>>();
        b.bucket_offset = c.at("bucket_offset").get<std::uint32_t>();
        b.catch_all = c.at("catch_all").get<std::uint32_t>();
        s.colors.push_back(std::move(b));
      }
      s.output_dim = output_dim;
      s.objective = j.at("objective").get<double>();
      s.accepted_gains = j.at("accepted_gains").get<std::vector<double>>();
      return make_submodular_encoder(std::move(coloring), std::move(s), budget, policy,
                                     dense_dim);
    }
    case EncoderKind::kChromaticTarget: {
      TargetTable t;
      t.prior = j.at("prior").get<double>();
      t.smoothing = j.at("smoothing").get<double>();
      for (const auto& item : j.at("values")) {
        t.value.emplace(item.at(0).get<FeatureId>(), item.at(1).get<double>());
      }
      return Encoder(kind, budget, output_dim, dense_dim, policy, std::move(coloring),
                     std::move(t));
    }
    case EncoderKind::kChromaticFrequency: {
      ColorFrequencyTable t;
      t.index = read_index(j.at("index"));
      t.block_offset = j.at("block_offset").get<std::vector<std::uint32_t>>();
      return Encoder(kind, budget, output_dim, dense_dim, policy, std::move(coloring),
                     std::move(t));
    }
    case EncoderKind::kFrequency:
      return Encoder(kind, budget, output_dim, dense_dim, policy, nullptr,
                     FrequencyTable{read_index(j.at("index"))});
    case EncoderKind::kHashing:
      return Encoder(kind, budget, output_dim, dense_dim, policy, nullptr,
                     HashingParams{j.at("seed").get<std::uint64_t>()});
  }
  throw std::runtime_error("unreachable encoder variant");
}

}  // namespace chromatic
