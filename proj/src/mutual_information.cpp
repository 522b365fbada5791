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

#include "chromatic/mutual_information.hpp"

#include <cmath>

namespace chromatic {

double outcome_information(const LabelCounts& outcome, double total_rows,
                           double positive_rate) {
  if (outcome.rows == 0 || total_rows <= 0.0) return 0.0;
  const double rows = static_cast<double>(outcome.rows);
  const double q = static_cast<double>(outcome.positives) / rows;
  double sum = 0.0;
  if (outcome.positives > 0) sum += q * std::log(q / positive_rate);
  if (outcome.positives < outcome.rows) {
    sum += (1.0 - q) * std::log((1.0 - q) / (1.0 - positive_rate));
  }
  return rows / total_rows * sum;
}

double mutual_information(std::span<const LabelCounts> buckets, const LabelCounts& absent) {
  LabelCounts total = absent;
  for (const LabelCounts& b : buckets) total += b;
  if (total.rows == 0) return 0.0;
  const double n = static_cast<double>(total.rows);
  const double rate = static_cast<double>(total.positives) / n;
  double mi = outcome_information(absent, n, rate);
  for (const LabelCounts& b : buckets) mi += outcome_information(b, n, rate);
  return mi;
}

}  // namespace chromatic
