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

#include "chromatic/hashing.hpp"


namespace chromatic {
namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

}  // namespace

std::uint64_t hash_bytes(std::span<const std::byte> bytes, std::uint64_t seed) {
  std::uint64_t h = kFnvOffset ^ seed;
  for (std::byte b : bytes) {
    h ^= static_cast<std::uint64_t>(b);
    h *= kFnvPrime;
  }
  return mix64(h);
}

std::uint64_t feature_string_hash(std::string_view name) {
  return hash_bytes(std::as_bytes(std::span(name.data(), name.size())));
}

std::uint64_t example_hash(std::span<const FeatureId> active) {
  std::uint64_t h = kFnvOffset;
  for (FeatureId id : active) {
    for (int shift = 0; shift < 64; shift += 8) {
      h ^= (id >> shift) & 0xffU;
      h *= kFnvPrime;
    }
  }
  return mix64(h);
}

}  // namespace chromatic
