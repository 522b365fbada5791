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
#include <stdexcept>
#include <string>
#include <vector>

#include "chromatic/color_stats.hpp"
#include "chromatic/coloring.hpp"
#include "chromatic/cooccurrence_graph.hpp"
#include "chromatic/encoders.hpp"
#include "chromatic/linear_model.hpp"
#include "chromatic/synthetic.hpp"
#include "json.hpp"

namespace chromatic {

struct DataConfig {
  // Key used in the metrics log; defaults to the training file stem or
  // "synthetic".
  std::string name;
  std::string train_path;
  // When empty, the training file is split chronologically.
  std::string test_path;
  double train_fraction = 0.8;
  bool string_keys = false;
  // Features active in more than this share of training rows become dense
  // pass-through columns; unset disables the separation.
  std::optional<double> dense_threshold = 0.1;
  bool synthetic = false;
  SyntheticConfig synthetic_params;
};

struct GraphConfig {
  std::uint32_t k = 1;
  ThresholdMode mode = ThresholdMode::kExact;
  double bloom_false_positive_rate = 0.01;
  std::uint32_t shard_factor = 1;
  // 0 means unlimited.
  std::uint64_t max_edges = 0;
};

enum class ColoringMode { kGreedy, kUniform };
const char* to_string(ColoringMode mode);
ColoringMode coloring_mode_from_string(const std::string& name);

struct ColoringConfig {
  ColoringMode mode = ColoringMode::kGreedy;
  GreedyOrder order = GreedyOrder::kDataOrder;
  // Uniform mode: colors for the filtered graph; 0 picks 2 * delta_f + 1.
  std::uint32_t colors = 0;
  // Uniform mode: explicit Glauber step count, or 0 for
  // steps_multiplier * m * v * ln v.
  std::uint64_t steps = 0;
  double steps_multiplier = 1.0;
};

struct EncoderConfig {
  EncoderKind kind = EncoderKind::kChromaticSubmodular;
  std::uint32_t budget = 64;
  CollisionPolicy policy = CollisionPolicy::kDropMorePopular;
  double estimate_ratio = 0.5;
  bool double_dip = false;
  double target_smoothing = 20.0;
};

struct TrainConfig {
  double learning_rate = 0.5;
  std::uint32_t epochs = 1;
  double l2 = 0.0;
  bool shuffle = false;
};

struct FidelityConfig {
  std::vector<std::uint32_t> thresholds{1, 2, 3, 4};
  double confidence_delta = 0.01;
  // Threshold of the graph sampled for the uniform-coloring curve; unset
  // means graph.k.
  std::optional<std::uint32_t> uniform_k;
  // Multiples of the base color count max(delta_f + 1, ceil(2 delta_f +
  // N_f / n)) used for the uniform-coloring curve.
  std::vector<double> uniform_color_factors{1.0, 2.0, 4.0, 8.0};
};

struct ReportConfig {
  std::vector<EncoderKind> encoders{EncoderKind::kChromaticSubmodular,
                                    EncoderKind::kChromaticTarget,
                                    EncoderKind::kChromaticFrequency,
                                    EncoderKind::kFrequency, EncoderKind::kHashing};
  std::vector<std::uint32_t> budgets{64, 128, 256, 512, 1024};
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct PipelineConfig {
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::string output_dir = "chromatic_out";
  DataConfig data;
  GraphConfig graph;
  ColoringConfig coloring;
  EncoderConfig encoder;
  TrainConfig train;
  FidelityConfig fidelity;
  ReportConfig report;

  // Rejects unknown keys and out-of-range values with a ConfigError naming
  // the offending field.
  static PipelineConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;

  // Seed for one consumer of randomness, derived from `seed`.
  std::uint64_t stage_seed(std::string_view purpose) const;
};

PipelineConfig load_config(const std::filesystem::path& path);

class MissingArtifact : public std::runtime_error {
 public:
  MissingArtifact(const std::string& stage, const std::string& producer,
                  const std::filesystem::path& expected);
  const std::string& producer() const { return producer_; }

 private:
  std::string producer_;
};

struct CommandOptions {
  // Recompute even when the artifact for this digest already exists.
  bool force = false;
  std::ostream* log = nullptr;
};

struct StageResult {
  std::string stage;
  std::string digest;
  std::vector<std::filesystem::path> files;
  bool reused = false;
};

// Content digests; each covers the stage's config slice and the digests of
// everything it reads.
std::string ingest_digest(const PipelineConfig& c);
std::string graph_digest(const PipelineConfig& c);
std::string color_digest(const PipelineConfig& c);
std::string fidelity_digest(const PipelineConfig& c);
std::string encode_digest(const PipelineConfig& c);
std::string train_digest(const PipelineConfig& c);
std::string report_digest(const PipelineConfig& c);

StageResult cmd_ingest(const PipelineConfig& c, const CommandOptions& o = {});
StageResult cmd_graph(const PipelineConfig& c, const CommandOptions& o = {});
StageResult cmd_color(const PipelineConfig& c, const CommandOptions& o = {});
StageResult cmd_fidelity(const PipelineConfig& c, const CommandOptions& o = {});
StageResult cmd_encode(const PipelineConfig& c, const CommandOptions& o = {});
StageResult cmd_train(const PipelineConfig& c, const CommandOptions& o = {});
StageResult cmd_report(const PipelineConfig& c, const CommandOptions& o = {});
std::vector<StageResult> cmd_run(const PipelineConfig& c, const CommandOptions& o = {});

// Artifact access for downstream tools and tests.
struct IngestedData {
  SparseDataset train;
  SparseDataset test;
};
IngestedData load_ingested(const PipelineConfig& c);
CooccurrenceGraph load_graph(const PipelineConfig& c);
Coloring load_coloring(const PipelineConfig& c, const SparseDataset& train);
Encoder load_encoder(const PipelineConfig& c);

// Binary artifact container: "CLARTF01" | u64 length | JSON metadata |
// payload bytes. The metadata holds the stage, digest, input digests and
// the resolved config.
void write_artifact(const std::filesystem::path& path, const nlohmann::json& meta,
                    const std::string& payload);
std::pair<nlohmann::json, std::string> read_artifact(const std::filesystem::path& path);

}  // namespace chromatic
