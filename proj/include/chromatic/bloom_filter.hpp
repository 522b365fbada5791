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

#include <cstddef>
#include <cstdint>
#include <vector>

namespace chromatic {

// Classic bit-array Bloom filter over pre-hashed 64-bit keys, probing with
// double hashing (Kirsch-Mitzenmacher).
class BloomFilter {
 public:
  // Sized for `expected_items` at the target false-positive rate, which must
  // lie in (0, 1).
  BloomFilter(std::size_t expected_items, double false_positive_rate);

  void insert(std::uint64_t key);
  bool contains(std::uint64_t key) const;
  // Inserts and reports whether the key was (possibly) already present.
  bool test_and_insert(std::uint64_t key);

  std::size_t bit_count() const { return bit_count_; }
  unsigned hash_count() const { return hash_count_; }

 private:
  std::vector<std::uint64_t> words_;
  std::size_t bit_count_;
  unsigned hash_count_;
};

}  // namespace chromatic
