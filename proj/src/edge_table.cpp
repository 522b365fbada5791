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

#include "chromatic/edge_table.hpp"

#include <bit>
#include <stdexcept>

namespace chromatic {
namespace {
constexpr std::size_t kMigrateSlotsPerInsert = 8;
}

EdgeCountTable::EdgeCountTable(std::size_t initial_capacity)
    : current_(std::bit_ceil(std::max<std::size_t>(initial_capacity, 16))) {}

std::size_t EdgeCountTable::probe(const std::vector<Slot>& table, const Edge& e) {
  const std::size_t mask = table.size() - 1;
  std::size_t i = edge_hash(e) & mask;
  while (table[i].occupied() && table[i].edge != e) i = (i + 1) & mask;
  return i;
}

void EdgeCountTable::add(const Edge& e, std::uint32_t count) {
  if (e.u >= e.v) throw std::invalid_argument("edge is not canonical");
  if (current_.empty()) current_.resize(16);
  if (!previous_.empty()) {
    Slot& old = previous_[probe(previous_, e)];
    if (old.occupied() && !old.moved) {
      old.count += count;
      migrate_step();
      return;
    }
  }
  Slot& slot = current_[probe(current_, e)];
  if (slot.occupied()) {
    slot.count += count;
  } else {
    slot.edge = e;
    slot.count = count;
    ++current_size_;
    ++size_;
  }
  if (!previous_.empty()) migrate_step();
  if (2 * current_size_ > current_.size()) grow();
}

std::uint32_t EdgeCountTable::count(const Edge& e) const {
  if (!previous_.empty()) {
    const Slot& old = previous_[probe(previous_, e)];
    if (old.occupied() && !old.moved) return old.count;
  }
  if (current_.empty()) return 0;
  const Slot& slot = current_[probe(current_, e)];
  return slot.occupied() ? slot.count : 0;
}

void EdgeCountTable::grow() {
  // A previous drain still in progress is finished first; this only happens
  // when a single add() call pushes the live table over half load twice.
  while (!previous_.empty()) migrate_step();
  previous_ = std::move(current_);
  current_.assign(previous_.size() * 2, Slot{});
  current_size_ = 0;
  migrate_cursor_ = 0;
}

void EdgeCountTable::migrate_step() {
  for (std::size_t n = 0; n < kMigrateSlotsPerInsert && migrate_cursor_ < previous_.size();
       ++migrate_cursor_) {
    Slot& old = previous_[migrate_cursor_];
    if (!old.occupied() || old.moved) continue;
    Slot& slot = current_[probe(current_, old.edge)];
    slot.edge = old.edge;
    slot.count = old.count;
    ++current_size_;
    old.moved = true;
    ++n;
  }
  if (migrate_cursor_ == previous_.size()) {
    previous_.clear();
    previous_.shrink_to_fit();
  }
}

}  // namespace chromatic
