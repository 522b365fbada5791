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
#include <span>

namespace chromatic {

struct LabelCounts {
  std::uint64_t rows = 0;
  std::uint64_t positives = 0;

  LabelCounts& operator+=(const LabelCounts& o) {
    rows += o.rows;
    positives += o.positives;
    return *this;
  }
  friend LabelCounts operator+(LabelCounts a, const LabelCounts& b) { return a += b; }
  friend LabelCounts operator-(LabelCounts a, const LabelCounts& b) {
    return {a.rows - b.rows, a.positives - b.positives};
  }
  friend bool operator==(const LabelCounts&, const LabelCounts&) = default;
};

// Contribution of one outcome z to the plug-in I(Z;Y) in nats:
//   p(z) * sum_y p(y|z) ln(p(y|z) / p(y)),  with 0 ln 0 = 0.
// `total_rows` and `positive_rate` describe the marginal over all outcomes.
double outcome_information(const LabelCounts& outcome, double total_rows,
                           double positive_rate);

// Plug-in I(Z;Y) in nats where Z ranges over `buckets` plus the fixed extra
// outcome `absent` (rows on which the variable has no value). Zero when
// there are no rows.
double mutual_information(std::span<const LabelCounts> buckets,
                          const LabelCounts& absent = {});

}  // namespace chromatic
