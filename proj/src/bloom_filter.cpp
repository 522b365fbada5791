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

#include "chromatic/bloom_filter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "chromatic/hashing.hpp"

namespace chromatic {

BloomFilter::BloomFilter(std::size_t expected_items, double false_positive_rate) {
  if (!(false_positive_rate > 0.0 && false_positive_rate < 1.0)) {
    throw std::invalid_argument("bloom false-positive rate must lie in (0, 1)");
  }
  const double n = static_cast<double>(std::max<std::size_t>(expected_items, 1));
  const double ln2 = std::numbers::ln2;
  const double bits = std::ceil(-n * std::log(false_positive_rate) / (ln2 * ln2));
  bit_count_ = std::max<std::size_t>(64, static_cast<std::size_t>(bits));
  hash_count_ = std::max(1u, static_cast<unsigned>(
                                 std::lround(bits / n * ln2)));
  words_.assign((bit_count_ + 63) / 64, 0);
}

void BloomFilter::insert(std::uint64_t key) {
  const std::uint64_t h1 = mix64(key);
  const std::uint64_t h2 = mix64(h1) | 1;
  for (unsigned i = 0; i < hash_count_; ++i) {
    const std::size_t bit = (h1 + i * h2) % bit_count_;
    words_[bit / 64] |= std::uint64_t{1} << (bit % 64);
  }
}

bool BloomFilter::contains(std::uint64_t key) const {
  const std::uint64_t h1 = mix64(key);
  const std::uint64_t h2 = mix64(h1) | 1;
  for (unsigned i = 0; i < hash_count_; ++i) {
    const std::size_t bit = (h1 + i * h2) % bit_count_;
    if (!(words_[bit / 64] >> (bit % 64) & 1)) return false;
  }
  return true;
}

bool BloomFilter::test_and_insert(std::uint64_t key) {
  const bool present = contains(key);
  if (!present) insert(key);
  return present;
}

}  // namespace chromatic
