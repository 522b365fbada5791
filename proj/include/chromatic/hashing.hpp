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
#include <random>
#include <span>
#include <string_view>

namespace chromatic {

using FeatureId = std::uint64_t;

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
  return mix64(seed ^ mix64(value));
}

// FNV-1a 64 over the bytes, finalized with mix64.
std::uint64_t hash_bytes(std::span<const std::byte> bytes,
                         std::uint64_t seed = 0);

// Key used when the input carries string feature names instead of integer
// indices. 64 bits: P(collision) among 1e9 distinct strings is ~2.7%.
std::uint64_t feature_string_hash(std::string_view name);

// Hash of an example's active set: FNV-1a over the little-endian 8-byte
// encoding of each id in order, finalized with mix64. The most significant
// bit is the "first bit" used for sample splitting.
std::uint64_t example_hash(std::span<const FeatureId> active);

// Unbiased integer in [0, bound) via Lemire's multiply-shift with rejection.
// Used instead of std::uniform_int_distribution so sampled sequences do not
// depend on the standard library implementation.
template <class Rng>
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  static_assert(Rng::min() == 0 && Rng::max() == ~std::uint64_t{0});
  unsigned __int128 product =
      static_cast<unsigned __int128>(rng()) * bound;
  auto low = static_cast<std::uint64_t>(product);
  if (low < bound) {
    const std::uint64_t threshold = -bound % bound;
    while (low < threshold) {
      product = static_cast<unsigned __int128>(rng()) * bound;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::uint64_t>(product >> 64);
}

// Uniform double in [0, 1) from the top 53 bits.
template <class Rng>
double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace chromatic
