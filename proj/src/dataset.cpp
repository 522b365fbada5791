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

#include "chromatic/dataset.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "chromatic/binary_io.hpp"
#include "chromatic/parallel.hpp"

namespace chromatic {

void SparseDataset::add(Example example) {
  if (example.label > 1) {
    throw std::invalid_argument("label must be 0 or 1");
  }
  if (example.values.empty() && !example.active.empty()) {
    example.values.assign(example.active.size(), 1.0f);
  }
  if (example.values.size() != example.active.size()) {
    throw std::invalid_argument("values and active sizes differ");
  }
  for (std::size_t i = 1; i < example.active.size(); ++i) {
    if (example.active[i - 1] >= example.active[i]) {
      throw std::invalid_argument("active features must be strictly increasing");
    }
  }
  if (example.dense.size() != dense_ids_.size()) {
    throw std::invalid_argument("dense width does not match dense_ids");
  }
  for (FeatureId f : example.active) ++freq_[f];
  eta_ = std::max(eta_, example.active.size());
  total_nnz_ += example.active.size();
  positives_ += example.label;
  examples_.push_back(std::move(example));
}

std::uint64_t SparseDataset::frequency(FeatureId f) const {
  auto it = freq_.find(f);
  return it == freq_.end() ? 0 : it->second;
}

void SparseDataset::set_dense_ids(std::vector<FeatureId> ids) {
  if (!examples_.empty()) {
    throw std::logic_error("dense ids must be set before adding examples");
  }
  dense_ids_ = std::move(ids);
}

SparseDataset SparseDataset::empty_like() const {
  SparseDataset out;
  out.dense_ids_ = dense_ids_;
  return out;
}

std::vector<FeatureId> SparseDataset::first_seen_order() const {
  std::vector<FeatureId> order;
  order.reserve(freq_.size());
  std::unordered_set<FeatureId> seen;
  seen.reserve(freq_.size());
  for (const Example& ex : examples_) {
    for (FeatureId f : ex.active) {
      if (seen.insert(f).second) order.push_back(f);
    }
  }
  return order;
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

std::string_view next_token(std::string_view& rest) {
  std::size_t i = 0;
  while (i < rest.size() && is_space(rest[i])) ++i;
  std::size_t j = i;
  while (j < rest.size() && !is_space(rest[j])) ++j;
  std::string_view token = rest.substr(i, j - i);
  rest.remove_prefix(j);
  return token;
}

std::uint8_t parse_label(std::string_view token, std::size_t line_number) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(line_number, "malformed label '" + std::string(token) + "'");
  }
  if (value == 1.0) return 1;
  if (value == 0.0 || value == -1.0) return 0;
  throw ParseError(line_number, "non-binary label '" + std::string(token) + "'");
}

}  // namespace

Example parse_libsvm_line(std::string_view line, std::size_t line_number,
                          const LibsvmOptions& options) {
  std::string_view rest = line;
  Example ex;
  ex.label = parse_label(next_token(rest), line_number);

  std::vector<std::pair<FeatureId, float>> entries;
  for (std::string_view token = next_token(rest); !token.empty();
       token = next_token(rest)) {
    const std::size_t colon = token.rfind(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == token.size()) {
      throw ParseError(line_number, "expected <index>:<value>, got '" +
                                        std::string(token) + "'");
    }
    std::string_view key = token.substr(0, colon);
    std::string_view val = token.substr(colon + 1);
    FeatureId id = 0;
    if (options.string_keys) {
      id = feature_string_hash(key);
    } else {
      auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), id);
      if (ec != std::errc() || ptr != key.data() + key.size()) {
        throw ParseError(line_number, "malformed feature index '" +
                                          std::string(key) + "'");
      }
    }
    float value = 0;
    auto [vptr, vec] = std::from_chars(val.data(), val.data() + val.size(), value);
    if (vec != std::errc() || vptr != val.data() + val.size()) {
      throw ParseError(line_number, "malformed feature value '" +
                                        std::string(val) + "'");
    }
    entries.emplace_back(id, value);
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  ex.active.reserve(entries.size());
  ex.values.reserve(entries.size());
  for (const auto& [id, value] : entries) {
    if (!ex.active.empty() && ex.active.back() == id) continue;
    ex.active.push_back(id);
    ex.values.push_back(value);
  }
  return ex;
}

SparseDataset parse_libsvm(const std::vector<std::string>& lines,
                           const LibsvmOptions& options) {
  std::vector<std::size_t> nonblank;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].find_first_not_of(" \t\r\n") != std::string::npos) {
      nonblank.push_back(i);
    }
  }
  std::vector<Example> parsed(nonblank.size());
  parallel_for_ranges(nonblank.size(), options.workers,
                      [&](std::size_t begin, std::size_t end, unsigned) {
                        for (std::size_t i = begin; i < end; ++i) {
                          parsed[i] = parse_libsvm_line(lines[nonblank[i]],
                                                        nonblank[i] + 1, options);
                        }
                      });
  SparseDataset ds;
  ds.reserve(parsed.size());
  for (Example& ex : parsed) ds.add(std::move(ex));
  return ds;
}

SparseDataset parse_libsvm(std::istream& in, const LibsvmOptions& options) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(std::move(line));
  return parse_libsvm(lines, options);
}

SparseDataset read_libsvm_file(const std::filesystem::path& path,
                               const LibsvmOptions& options) {
  // gzread passes uncompressed files through unchanged.
  std::unique_ptr<gzFile_s, decltype(&gzclose)> file(
      gzopen(path.c_str(), "rb"), &gzclose);
  if (!file) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string pending;
  std::vector<char> buf(1 << 16);
  for (;;) {
    const int got = gzread(file.get(), buf.data(), static_cast<unsigned>(buf.size()));
    if (got < 0) throw std::runtime_error("read error in " + path.string());
    if (got == 0) break;
    pending.append(buf.data(), static_cast<std::size_t>(got));
    std::size_t start = 0;
    for (std::size_t nl = pending.find('\n'); nl != std::string::npos;
         nl = pending.find('\n', start)) {
      lines.emplace_back(pending, start, nl - start);
      start = nl + 1;
    }
    pending.erase(0, start);
  }
  if (!pending.empty()) lines.push_back(std::move(pending));
  return parse_libsvm(lines, options);
}

std::string to_libsvm_line(const Example& ex) {
  std::ostringstream out;
  out << static_cast<int>(ex.label);
  for (std::size_t i = 0; i < ex.active.size(); ++i) {
    out << ' ' << ex.active[i] << ':'
        << (ex.values.empty() ? 1.0f : ex.values[i]);
  }
  return out.str();
}

void write_libsvm(std::ostream& out, const SparseDataset& ds) {
  for (const Example& ex : ds) out << to_libsvm_line(ex) << '\n';
}

std::pair<SparseDataset, SparseDataset> chronological_split_count(
    const SparseDataset& ds, std::size_t train_count) {
  train_count = std::min(train_count, ds.size());
  SparseDataset train = ds.empty_like();
  SparseDataset test = ds.empty_like();
  train.reserve(train_count);
  test.reserve(ds.size() - train_count);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    (i < train_count ? train : test).add(ds[i]);
  }
  return {std::move(train), std::move(test)};
}

std::pair<SparseDataset, SparseDataset> chronological_split(
    const SparseDataset& ds, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train fraction must lie in (0, 1)");
  }
  if (ds.empty()) throw std::invalid_argument("cannot split an empty dataset");
  const auto train_count = static_cast<std::size_t>(
      std::ceil(static_cast<double>(ds.size()) * train_fraction));
  return chronological_split_count(ds, train_count);
}

namespace {

std::uint64_t split_threshold(double estimate_ratio) {
  if (!(estimate_ratio > 0.0 && estimate_ratio < 1.0)) {
    throw std::invalid_argument("estimate ratio must lie in (0, 1)");
  }
  return static_cast<std::uint64_t>(std::ldexp(estimate_ratio, 64));
}

}  // namespace

bool in_estimate_half(const Example& ex, double estimate_ratio) {
  return example_hash(ex.active) < split_threshold(estimate_ratio);
}

HashSplit hash_split(const SparseDataset& ds, double estimate_ratio) {
  const std::uint64_t threshold = split_threshold(estimate_ratio);
  HashSplit out{ds.empty_like(), ds.empty_like()};
  for (const Example& ex : ds) {
    (example_hash(ex.active) < threshold ? out.estimate_half : out.fit_half).add(ex);
  }
  return out;
}

DenseDetection detect_dense(const SparseDataset& ds, double threshold) {
  DenseDetection out;
  const double cutoff = threshold * static_cast<double>(ds.size());
  for (const auto& [f, count] : ds.feature_freq()) {
    (static_cast<double>(count) > cutoff ? out.dense_ids : out.sparse_ids).insert(f);
  }
  return out;
}

SparseDataset separate_dense(const SparseDataset& ds,
                             const std::set<FeatureId>& dense_ids) {
  std::vector<FeatureId> columns = ds.dense_ids();
  const std::size_t carried = columns.size();
  for (FeatureId f : dense_ids) {
    if (std::find(columns.begin(), columns.end(), f) == columns.end()) {
      columns.push_back(f);
    }
  }
  SparseDataset out;
  out.set_dense_ids(columns);
  out.reserve(ds.size());
  for (const Example& ex : ds) {
    Example next;
    next.label = ex.label;
    next.dense = ex.dense;
    next.dense.resize(columns.size(), 0.0);
    for (std::size_t i = 0; i < ex.active.size(); ++i) {
      const FeatureId f = ex.active[i];
      if (dense_ids.contains(f)) {
        auto pos = std::find(columns.begin() + static_cast<std::ptrdiff_t>(carried),
                             columns.end(), f);
        next.dense[static_cast<std::size_t>(pos - columns.begin())] = ex.values[i];
      } else {
        next.active.push_back(f);
        next.values.push_back(ex.values[i]);
      }
    }
    out.add(std::move(next));
  }
  return out;
}

namespace {
constexpr char kDatasetMagic[9] = "CLDSET01";
}

void write_binary_cache(std::ostream& out, const SparseDataset& ds) {
  io::write_magic(out, kDatasetMagic);
  io::write_le<std::uint64_t>(out, ds.size());
  io::write_le<std::uint64_t>(out, ds.dense_ids().size());
  for (FeatureId f : ds.dense_ids()) io::write_le<std::uint64_t>(out, f);
  for (const Example& ex : ds) {
    io::write_le<std::uint8_t>(out, ex.label);
    io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(ex.active.size()));
    for (FeatureId f : ex.active) io::write_le<std::uint64_t>(out, f);
    for (float v : ex.values) io::write_le<float>(out, v);
    io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(ex.dense.size()));
    for (double v : ex.dense) io::write_le<double>(out, v);
  }
}

SparseDataset read_binary_cache(std::istream& in) {
  io::expect_magic(in, kDatasetMagic);
  const auto n = io::read_le<std::uint64_t>(in);
  const auto dense_count = io::read_le<std::uint64_t>(in);
  std::vector<FeatureId> dense_ids(dense_count);
  for (auto& f : dense_ids) f = io::read_le<std::uint64_t>(in);
  SparseDataset ds;
  ds.set_dense_ids(std::move(dense_ids));
  ds.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    Example ex;
    ex.label = io::read_le<std::uint8_t>(in);
    const auto nnz = io::read_le<std::uint32_t>(in);
    ex.active.resize(nnz);
    ex.values.resize(nnz);
    for (auto& f : ex.active) f = io::read_le<std::uint64_t>(in);
    for (auto& v : ex.values) v = io::read_le<float>(in);
    ex.dense.resize(io::read_le<std::uint32_t>(in));
    for (auto& v : ex.dense) v = io::read_le<double>(in);
    ds.add(std::move(ex));
  }
  return ds;
}

void write_binary_cache(const std::filesystem::path& path,
                        const SparseDataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_binary_cache(out, ds);
}

SparseDataset read_binary_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_binary_cache(in);
}

nlohmann::json dataset_summary(const SparseDataset& ds) {
  return {
      {"n", ds.size()},
      {"eta", ds.eta()},
      {"feature_count", ds.feature_freq().size()},
      {"total_nnz", ds.total_nnz()},
      {"avg_nnz", ds.empty() ? 0.0
                             : static_cast<double>(ds.total_nnz()) /
                                   static_cast<double>(ds.size())},
      {"positives", ds.positives()},
      {"dense_ids", ds.dense_ids()},
  };
}

std::uint32_t FeatureIndex::index_of(std::uint64_t key) {
  auto [it, inserted] =
      map_.try_emplace(key, static_cast<std::uint32_t>(map_.size()));
  return it->second;
}

std::optional<std::uint32_t> FeatureIndex::find(std::uint64_t key) const {
  auto it = map_.find(key);
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

}  // namespace chromatic
