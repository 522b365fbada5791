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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "chromatic/hashing.hpp"

namespace chromatic {

// Unordered feature pair in canonical form u < v.
struct Edge {
  FeatureId u = 0;
  FeatureId v = 0;

  static Edge canonical(FeatureId a, FeatureId b) {
    return a < b ? Edge{a, b} : Edge{b, a};
  }
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline std::uint64_t edge_hash(const Edge& e) {
  return hash_combine(mix64(e.u), e.v);
}

struct EdgeHash {
  std::size_t operator()(const Edge& e) const { return edge_hash(e); }
};

// Open-addressing multiplicity table for edges. Growth is incremental: when
// the live table passes half load a table of twice the capacity becomes
// live and the old one is drained a few slots per insertion, so no single
// insertion pays for a full rehash.
class EdgeCountTable {
 public:
  EdgeCountTable() = default;
  explicit EdgeCountTable(std::size_t initial_capacity);

  void add(const Edge& e, std::uint32_t count = 1);
  std::uint32_t count(const Edge& e) const;
  std::size_t size() const { return size_; }
  bool migrating() const { return !previous_.empty(); }

  template <class Fn>
  void for_each(Fn&& fn) const {
    for (const Slot& s : previous_) {
      if (s.occupied() && !s.moved) fn(s.edge, s.count);
    }
    for (const Slot& s : current_) {
      if (s.occupied()) fn(s.edge, s.count);
    }
  }

 private:
  struct Slot {
    // u == v marks an empty slot; canonical edges never have u == v.
    Edge edge{std::numeric_limits<FeatureId>::max(),
              std::numeric_limits<FeatureId>::max()};
    std::uint32_t count = 0;
    bool moved = false;
    bool occupied() const { return edge.u != edge.v; }
  };

  static std::size_t probe(const std::vector<Slot>& table, const Edge& e);
  void grow();
  void migrate_step();

  std::vector<Slot> current_;
  std::vector<Slot> previous_;
  std::size_t current_size_ = 0;
  std::size_t size_ = 0;
  std::size_t migrate_cursor_ = 0;
};

}  // namespace chromatic
