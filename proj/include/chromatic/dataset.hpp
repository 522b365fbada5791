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
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "chromatic/hashing.hpp"
#include "json.hpp"

namespace chromatic {

using FeatureFrequency = std::unordered_map<FeatureId, std::uint64_t>;

struct Example {
  std::uint8_t label = 0;
  // Strictly increasing.
  std::vector<FeatureId> active;
  // Raw value of each active feature (parallel to `active`). Sparse encoders
  // only look at presence; the values survive for dense-feature extraction.
  std::vector<float> values;
  // Values of the dataset's dense features, in the order of dense_ids().
  std::vector<double> dense;

  friend bool operator==(const Example&, const Example&) = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// An ordered collection of labeled examples plus the statistics every
// downstream stage needs: max nnz (eta) and per-feature occurrence counts.
// Immutable once built; safe to share read-only across threads.
class SparseDataset {
 public:
  SparseDataset() = default;

  // Validates and appends. Throws std::invalid_argument when `active` is not
  // strictly increasing, when values/active sizes differ, when the label is
  // not binary or when the dense width disagrees with dense_ids().
  void add(Example example);
  void reserve(std::size_t n) { examples_.reserve(n); }

  std::size_t size() const { return examples_.size(); }
  bool empty() const { return examples_.empty(); }
  const Example& operator[](std::size_t i) const { return examples_[i]; }
  const std::vector<Example>& examples() const { return examples_; }
  auto begin() const { return examples_.begin(); }
  auto end() const { return examples_.end(); }

  std::size_t eta() const { return eta_; }
  std::uint64_t total_nnz() const { return total_nnz_; }
  std::uint64_t positives() const { return positives_; }
  const FeatureFrequency& feature_freq() const { return freq_; }
  std::uint64_t frequency(FeatureId f) const;

  // Features split out into Example::dense, in column order.
  const std::vector<FeatureId>& dense_ids() const { return dense_ids_; }
  void set_dense_ids(std::vector<FeatureId> ids);

  // Same dense layout, no examples.
  SparseDataset empty_like() const;

  // Feature ids in order of first appearance in the data.
  std::vector<FeatureId> first_seen_order() const;

 private:
  std::vector<Example> examples_;
  std::vector<FeatureId> dense_ids_;
  FeatureFrequency freq_;
  std::size_t eta_ = 0;
  std::uint64_t total_nnz_ = 0;
  std::uint64_t positives_ = 0;
};

struct LibsvmOptions {
  // Hash every feature key with feature_string_hash instead of reading it as
  // an unsigned integer.
  bool string_keys = false;
  unsigned workers = 1;
};

// One example per non-empty line: `<label> <key>:<value> ...`. Labels 0/1 or
// -1/+1. Duplicate keys on a line collapse to one feature (first value kept).
SparseDataset parse_libsvm(std::istream& in, const LibsvmOptions& options = {});
SparseDataset parse_libsvm(const std::vector<std::string>& lines,
                           const LibsvmOptions& options = {});
Example parse_libsvm_line(std::string_view line, std::size_t line_number,
                          const LibsvmOptions& options = {});

// Reads plain or gzip-compressed libsvm text.
SparseDataset read_libsvm_file(const std::filesystem::path& path,
                               const LibsvmOptions& options = {});

// Writes `<label> <id>:<value> ...`; dense values are not written.
void write_libsvm(std::ostream& out, const SparseDataset& ds);
std::string to_libsvm_line(const Example& ex);

// First ceil(n * train_fraction) examples form the train half, in order.
std::pair<SparseDataset, SparseDataset> chronological_split(
    const SparseDataset& ds, double train_fraction);
// Count-based variant; train_count is clamped to ds.size().
std::pair<SparseDataset, SparseDataset> chronological_split_count(
    const SparseDataset& ds, std::size_t train_count);

// Deterministic split on example_hash. An example goes to the estimate half
// when hash < estimate_ratio * 2^64; at the default 0.5 this is exactly
// "most significant bit is 0".
struct HashSplit {
  SparseDataset estimate_half;
  SparseDataset fit_half;
};
HashSplit hash_split(const SparseDataset& ds, double estimate_ratio = 0.5);
bool in_estimate_half(const Example& ex, double estimate_ratio = 0.5);

struct DenseDetection {
  std::set<FeatureId> dense_ids;
  std::set<FeatureId> sparse_ids;
};
// Dense when freq(f) > threshold * n (strict).
DenseDetection detect_dense(const SparseDataset& ds, double threshold = 0.1);

// Moves the given features out of every example's active set and into
// Example::dense (value when present, 0 otherwise), ordered by id.
SparseDataset separate_dense(const SparseDataset& ds,
                             const std::set<FeatureId>& dense_ids);

// Little-endian binary cache:
//   "CLDSET01" | u64 n | u64 dense_count | u64 dense_ids[dense_count]
//   per example: u8 label | u32 nnz | u64 ids[nnz] | f32 values[nnz]
//                | u32 dense_width | f64 dense[dense_width]
void write_binary_cache(std::ostream& out, const SparseDataset& ds);
SparseDataset read_binary_cache(std::istream& in);
void write_binary_cache(const std::filesystem::path& path,
                        const SparseDataset& ds);
SparseDataset read_binary_cache(const std::filesystem::path& path);

nlohmann::json dataset_summary(const SparseDataset& ds);

// Compact 32-bit index over 64-bit feature hashes, assigned in first-seen
// order. Used when string-keyed data must be re-indexed densely.
class FeatureIndex {
 public:
  std::uint32_t index_of(std::uint64_t key);
  std::optional<std::uint32_t> find(std::uint64_t key) const;
  std::size_t size() const { return map_.size(); }

 private:
  std::unordered_map<std::uint64_t, std::uint32_t> map_;
};

}  // namespace chromatic
