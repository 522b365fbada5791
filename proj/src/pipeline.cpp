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

#include "chromatic/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "chromatic/binary_io.hpp"
#include "chromatic/experiment.hpp"
#include "chromatic/fidelity.hpp"
#include "chromatic/submodular.hpp"

namespace chromatic {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Config parsing.

class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + " must be a JSON object");
  }

  template <class T>
  void get(const char* key, T& out) {
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    seen_.insert(key);
    try {
      out = it->template get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(field(key) + ": " + e.what());
    }
  }

  template <class T>
  void get_optional(const char* key, std::optional<T>& out) {
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    seen_.insert(key);
    if (it->is_null()) {
      out.reset();
      return;
    }
    T value{};
    get(key, value);
    out = value;
  }

  template <class Enum, class Parse>
  void get_enum(const char* key, Enum& out, Parse parse) {
    std::string name;
    if (j_.find(key) == j_.end()) return;
    get(key, name);
    try {
      out = parse(name);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(field(key) + ": " + e.what());
    }
  }

  const json* child(const char* key) {
    const auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    seen_.insert(key);
    return &*it;
  }

  std::string field(const char* key) const { return path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) throw ConfigError("unknown config key " + path_ + "." + key);
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field + " " + what);
}

json synthetic_json(const SyntheticConfig& s) {
  json j = s.to_json();
  j.erase("seed");
  return j;
}

json data_json(const DataConfig& d) {
  return {{"name", d.name},
          {"train_path", d.train_path},
          {"test_path", d.test_path},
          {"train_fraction", d.train_fraction},
          {"string_keys", d.string_keys},
          {"dense_threshold", d.dense_threshold ? json(*d.dense_threshold) : json(nullptr)},
          {"synthetic", d.synthetic},
          {"synthetic_params", synthetic_json(d.synthetic_params)}};
}

const char* threshold_mode_name(ThresholdMode m) {
  return m == ThresholdMode::kExact ? "exact" : "bloom";
}

ThresholdMode threshold_mode_from_string(const std::string& name) {
  if (name == "exact") return ThresholdMode::kExact;
  if (name == "bloom") return ThresholdMode::kBloom;
  throw std::invalid_argument("unknown threshold mode '" + name + "' (exact, bloom)");
}

json graph_json(const GraphConfig& g) {
  return {{"k", g.k},
          {"mode", threshold_mode_name(g.mode)},
          {"bloom_false_positive_rate", g.bloom_false_positive_rate},
          {"shard_factor", g.shard_factor},
          {"max_edges", g.max_edges}};
}

json coloring_json(const ColoringConfig& c) {
  return {{"mode", to_string(c.mode)},
          {"order", to_string(c.order)},
          {"colors", c.colors},
          {"steps", c.steps},
          {"steps_multiplier", c.steps_multiplier}};
}

json encoder_json(const EncoderConfig& e) {
  return {{"kind", to_string(e.kind)},
          {"budget", e.budget},
          {"policy", to_string(e.policy)},
          {"estimate_ratio", e.estimate_ratio},
          {"double_dip", e.double_dip},
          {"target_smoothing", e.target_smoothing}};
}

json train_json(const TrainConfig& t) {
  return {{"learning_rate", t.learning_rate},
          {"epochs", t.epochs},
          {"l2", t.l2},
          {"shuffle", t.shuffle}};
}

json fidelity_json(const FidelityConfig& f) {
  return {{"thresholds", f.thresholds},
          {"confidence_delta", f.confidence_delta},
          {"uniform_k", f.uniform_k ? json(*f.uniform_k) : json(nullptr)},
          {"uniform_color_factors", f.uniform_color_factors}};
}

json report_json(const ReportConfig& r) {
  json encoders = json::array();
  for (EncoderKind k : r.encoders) encoders.push_back(to_string(k));
  return {{"encoders", encoders}, {"budgets", r.budgets}};
}

// ---------------------------------------------------------------------------
// Digests and artifact plumbing.

std::string hex64(std::uint64_t v) {
  std::array<char, 17> buf{};
  std::snprintf(buf.data(), buf.size(), "%016llx", static_cast<unsigned long long>(v));
  return buf.data();
}

std::string digest_of(const json& slice) {
  const std::string text = slice.dump();
  return hex64(hash_bytes(std::as_bytes(std::span(text.data(), text.size())), 0x636c6467ULL));
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open input file " + path);
  std::vector<char> buf(1 << 20);
  std::uint64_t h = 0;
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const auto got = static_cast<std::size_t>(in.gcount());
    if (got == 0) break;
    h = hash_bytes(std::as_bytes(std::span(buf.data(), got)), h);
  }
  return hex64(h);
}

fs::path artifact_dir(const PipelineConfig& c) { return fs::path(c.output_dir) / "artifacts"; }

fs::path artifact_file(const PipelineConfig& c, const std::string& stage,
                       const std::string& digest, const std::string& ext) {
  return artifact_dir(c) / (stage + "-" + digest + ext);
}

void log_line(const CommandOptions& o, const std::string& text) {
  if (o.log) *o.log << text << '\n' << std::flush;
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed JSON in " + path.string() + ": " + e.what());
  }
}

json artifact_meta(const PipelineConfig& c, const std::string& stage, const std::string& digest,
                   const json& inputs) {
  return {{"stage", stage},
          {"digest", digest},
          {"inputs", inputs},
          {"format_version", 1},
          {"config", c.to_json()}};
}

bool all_exist(const std::vector<fs::path>& files) {
  return std::all_of(files.begin(), files.end(), [](const fs::path& p) { return fs::exists(p); });
}

void update_manifest(const PipelineConfig& c, const StageResult& r) {
  const fs::path path = fs::path(c.output_dir) / "manifest.json";
  json manifest = fs::exists(path) ? read_json_file(path) : json::object();
  json files = json::array();
  for (const fs::path& f : r.files) files.push_back(fs::relative(f, c.output_dir).string());
  manifest[r.stage] = {{"digest", r.digest}, {"files", files}};
  write_text_atomic(path, manifest.dump(2) + "\n");
}

fs::path require_artifact(const PipelineConfig& c, const std::string& stage,
                          const std::string& digest, const std::string& ext) {
  const fs::path path = artifact_file(c, stage, digest, ext);
  if (!fs::exists(path)) throw MissingArtifact(stage, stage, path);
  return path;
}

// Runs `produce` unless every file already exists; records the stage in the
// manifest either way.
template <class Produce>
StageResult run_stage(const PipelineConfig& c, const CommandOptions& o, const std::string& stage,
                      const std::string& digest, std::vector<fs::path> files, Produce produce) {
  StageResult r{stage, digest, std::move(files), false};
  if (!o.force && all_exist(r.files)) {
    r.reused = true;
    log_line(o, stage + ": up to date (" + digest + ")");
  } else {
    log_line(o, stage + ": running (" + digest + ")");
    produce();
    log_line(o, stage + ": wrote " + r.files.front().string());
  }
  update_manifest(c, r);
  return r;
}

std::string dataset_name(const PipelineConfig& c) {
  if (!c.data.name.empty()) return c.data.name;
  if (c.data.synthetic) return "synthetic";
  return fs::path(c.data.train_path).stem().string();
}

SyntheticConfig synthetic_for(const PipelineConfig& c) {
  SyntheticConfig s = c.data.synthetic_params;
  s.seed = c.stage_seed("synthetic");
  return s;
}

ExperimentConfig experiment_config(const PipelineConfig& c, EncoderKind kind,
                                   std::uint32_t budget) {
  ExperimentConfig e;
  e.encoder = kind;
  e.budget = budget;
  e.policy = c.encoder.policy;
  e.estimate_ratio = c.encoder.estimate_ratio;
  e.double_dip = c.encoder.double_dip;
  e.target_smoothing = c.encoder.target_smoothing;
  e.hashing_seed = c.stage_seed("hashing");
  e.logistic.learning_rate = c.train.learning_rate;
  e.logistic.epochs = c.train.epochs;
  e.logistic.l2 = c.train.l2;
  e.logistic.shuffle = c.train.shuffle;
  e.logistic.seed = c.stage_seed("logistic");
  return e;
}

std::string csv_with_header(const json& meta, const std::string& body) {
  return "# " + meta.dump() + "\n" + body;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// PipelineConfig.

const char* to_string(ColoringMode mode) {
  return mode == ColoringMode::kGreedy ? "greedy" : "uniform";
}

ColoringMode coloring_mode_from_string(const std::string& name) {
  if (name == "greedy") return ColoringMode::kGreedy;
  if (name == "uniform") return ColoringMode::kUniform;
  throw std::invalid_argument("unknown coloring mode '" + name + "' (greedy, uniform)");
}

PipelineConfig PipelineConfig::from_json(const json& j) {
  PipelineConfig c;
  ObjectReader root(j, "config");
  root.get("seed", c.seed);
  root.get("workers", c.workers);
  root.get("output_dir", c.output_dir);

  if (const json* d = root.child("data")) {
    ObjectReader r(*d, "config.data");
    r.get("name", c.data.name);
    r.get("train_path", c.data.train_path);
    r.get("test_path", c.data.test_path);
    r.get("train_fraction", c.data.train_fraction);
    r.get("string_keys", c.data.string_keys);
    r.get_optional("dense_threshold", c.data.dense_threshold);
    r.get("synthetic", c.data.synthetic);
    if (const json* s = r.child("synthetic_params")) {
      ObjectReader sr(*s, "config.data.synthetic_params");
      auto& p = c.data.synthetic_params;
      sr.get("groups", p.groups);
      sr.get("features", p.features);
      sr.get("examples", p.examples);
      sr.get("min_nnz", p.min_nnz);
      sr.get("max_nnz", p.max_nnz);
      sr.get("zipf_exponent", p.zipf_exponent);
      sr.get("group_effect_scale", p.group_effect_scale);
      sr.get("feature_effect_scale", p.feature_effect_scale);
      sr.get("bias", p.bias);
      sr.get("label_noise", p.label_noise);
      sr.finish();
    }
    r.finish();
  }
  if (const json* g = root.child("graph")) {
    ObjectReader r(*g, "config.graph");
    r.get("k", c.graph.k);
    r.get_enum("mode", c.graph.mode, threshold_mode_from_string);
    r.get("bloom_false_positive_rate", c.graph.bloom_false_positive_rate);
    r.get("shard_factor", c.graph.shard_factor);
    r.get("max_edges", c.graph.max_edges);
    r.finish();
  }
  if (const json* col = root.child("coloring")) {
    ObjectReader r(*col, "config.coloring");
    r.get_enum("mode", c.coloring.mode, coloring_mode_from_string);
    r.get_enum("order", c.coloring.order, greedy_order_from_string);
    r.get("colors", c.coloring.colors);
    r.get("steps", c.coloring.steps);
    r.get("steps_multiplier", c.coloring.steps_multiplier);
    r.finish();
  }
  if (const json* e = root.child("encoder")) {
    ObjectReader r(*e, "config.encoder");
    r.get_enum("kind", c.encoder.kind, encoder_kind_from_string);
    r.get("budget", c.encoder.budget);
    r.get_enum("policy", c.encoder.policy, collision_policy_from_string);
    r.get("estimate_ratio", c.encoder.estimate_ratio);
    r.get("double_dip", c.encoder.double_dip);
    r.get("target_smoothing", c.encoder.target_smoothing);
    r.finish();
  }
  if (const json* t = root.child("train")) {
    ObjectReader r(*t, "config.train");
    r.get("learning_rate", c.train.learning_rate);
    r.get("epochs", c.train.epochs);
    r.get("l2", c.train.l2);
    r.get("shuffle", c.train.shuffle);
    r.finish();
  }
  if (const json* f = root.child("fidelity")) {
    ObjectReader r(*f, "config.fidelity");
    r.get("thresholds", c.fidelity.thresholds);
    r.get("confidence_delta", c.fidelity.confidence_delta);
    r.get_optional("uniform_k", c.fidelity.uniform_k);
    r.get("uniform_color_factors", c.fidelity.uniform_color_factors);
    r.finish();
  }
  if (const json* rep = root.child("report")) {
    ObjectReader r(*rep, "config.report");
    std::vector<std::string> names;
    if (rep->contains("encoders")) {
      r.get("encoders", names);
      c.report.encoders.clear();
      for (const std::string& n : names) {
        try {
          c.report.encoders.push_back(encoder_kind_from_string(n));
        } catch (const std::invalid_argument& e) {
          throw ConfigError(std::string("config.report.encoders: ") + e.what());
        }
      }
    }
    r.get("budgets", c.report.budgets);
    r.finish();
  }
  root.finish();
  c.validate();
  return c;
}

json PipelineConfig::to_json() const {
  return {{"seed", seed},
          {"workers", workers},
          {"output_dir", output_dir},
          {"data", data_json(data)},
          {"graph", graph_json(graph)},
          {"coloring", coloring_json(coloring)},
          {"encoder", encoder_json(encoder)},
          {"train", train_json(train)},
          {"fidelity", fidelity_json(fidelity)},
          {"report", report_json(report)}};
}

void PipelineConfig::validate() const {
  require(workers >= 1, "config.workers", "must be >= 1");
  require(!output_dir.empty(), "config.output_dir", "must not be empty");

  if (data.synthetic) {
    try {
      data.synthetic_params.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config.data.synthetic_params: ") + e.what());
    }
    require(data.train_path.empty() && data.test_path.empty(), "config.data",
            "cannot combine synthetic data with input paths");
  } else {
    require(!data.train_path.empty(), "config.data.train_path",
            "is required unless config.data.synthetic is set");
  }
  require(data.train_fraction > 0.0 && data.train_fraction < 1.0, "config.data.train_fraction",
          "must lie in (0, 1)");
  if (data.dense_threshold) {
    require(*data.dense_threshold > 0.0 && *data.dense_threshold <= 1.0,
            "config.data.dense_threshold", "must lie in (0, 1]");
  }

  require(graph.k >= 1, "config.graph.k", "must be >= 1");
  require(graph.mode == ThresholdMode::kExact || graph.k >= 2, "config.graph.mode",
          "bloom needs k >= 2");
  require(graph.bloom_false_positive_rate > 0.0 && graph.bloom_false_positive_rate < 1.0,
          "config.graph.bloom_false_positive_rate", "must lie in (0, 1)");
  require(graph.shard_factor >= 1, "config.graph.shard_factor", "must be >= 1");

  require(coloring.steps_multiplier > 0.0 && std::isfinite(coloring.steps_multiplier),
          "config.coloring.steps_multiplier", "must be positive");

  require(encoder.budget >= 1, "config.encoder.budget", "must be >= 1");
  require(encoder.estimate_ratio > 0.0 && encoder.estimate_ratio < 1.0,
          "config.encoder.estimate_ratio", "must lie in (0, 1)");
  require(encoder.target_smoothing >= 0.0, "config.encoder.target_smoothing", "must be >= 0");

  require(train.learning_rate > 0.0, "config.train.learning_rate", "must be positive");
  require(train.epochs >= 1, "config.train.epochs", "must be >= 1");
  require(train.l2 >= 0.0, "config.train.l2", "must be >= 0");

  require(!fidelity.thresholds.empty(), "config.fidelity.thresholds", "must not be empty");
  for (std::uint32_t k : fidelity.thresholds) {
    require(k >= 1, "config.fidelity.thresholds", "entries must be >= 1");
  }
  require(fidelity.confidence_delta > 0.0 && fidelity.confidence_delta < 1.0,
          "config.fidelity.confidence_delta", "must lie in (0, 1)");
  if (fidelity.uniform_k) {
    require(*fidelity.uniform_k >= 1, "config.fidelity.uniform_k", "must be >= 1");
  }
  for (double f : fidelity.uniform_color_factors) {
    require(f >= 1.0 && std::isfinite(f), "config.fidelity.uniform_color_factors",
            "entries must be >= 1");
  }

  require(!report.encoders.empty(), "config.report.encoders", "must not be empty");
  require(!report.budgets.empty(), "config.report.budgets", "must not be empty");
  for (std::uint32_t b : report.budgets) {
    require(b >= 1, "config.report.budgets", "entries must be >= 1");
  }
}

std::uint64_t PipelineConfig::stage_seed(std::string_view purpose) const {
  return hash_combine(seed, feature_string_hash(purpose));
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("malformed config " + path.string() + ": " + e.what());
  }
  return PipelineConfig::from_json(j);
}

MissingArtifact::MissingArtifact(const std::string& stage, const std::string& producer,
                                 const fs::path& expected)
    : std::runtime_error("missing " + stage + " artifact for this configuration (expected " +
                         expected.string() + "); run the '" + producer + "' command first"),
      producer_(producer) {}

// ---------------------------------------------------------------------------
// Digests.

std::string ingest_digest(const PipelineConfig& c) {
  json slice{{"stage", "ingest"}, {"data", data_json(c.data)}};
  slice["data"].erase("name");
  if (c.data.synthetic) {
    slice["seed"] = c.stage_seed("synthetic");
  } else {
    slice["data"]["synthetic_params"] = nullptr;
    slice["train_file"] = file_digest(c.data.train_path);
    if (!c.data.test_path.empty()) slice["test_file"] = file_digest(c.data.test_path);
  }
  return digest_of(slice);
}

std::string graph_digest(const PipelineConfig& c) {
  json g = graph_json(c.graph);
  // Results do not depend on how the work is sharded.
  g.erase("shard_factor");
  return digest_of({{"stage", "graph"}, {"graph", g}, {"ingest", ingest_digest(c)}});
}

std::string color_digest(const PipelineConfig& c) {
  json slice{{"stage", "color"}, {"coloring", coloring_json(c.coloring)},
             {"graph", graph_digest(c)}};
  if (c.coloring.mode == ColoringMode::kUniform) slice["seed"] = c.stage_seed("glauber");
  return digest_of(slice);
}

std::string fidelity_digest(const PipelineConfig& c) {
  return digest_of({{"stage", "fidelity"},
                    {"fidelity", fidelity_json(c.fidelity)},
                    {"graph_k", c.graph.k},
                    {"order", to_string(c.coloring.order)},
                    {"steps", c.coloring.steps},
                    {"steps_multiplier", c.coloring.steps_multiplier},
                    {"seed", c.stage_seed("fidelity")},
                    {"ingest", ingest_digest(c)}});
}

std::string encode_digest(const PipelineConfig& c) {
  json slice{{"stage", "encode"}, {"encoder", encoder_json(c.encoder)},
             {"ingest", ingest_digest(c)}};
  if (needs_coloring(c.encoder.kind)) slice["color"] = color_digest(c);
  if (c.encoder.kind == EncoderKind::kHashing) slice["seed"] = c.stage_seed("hashing");
  return digest_of(slice);
}

std::string train_digest(const PipelineConfig& c) {
  return digest_of({{"stage", "train"},
                    {"train", train_json(c.train)},
                    {"seed", c.stage_seed("logistic")},
                    {"encode", encode_digest(c)}});
}

std::string report_digest(const PipelineConfig& c) {
  json e = encoder_json(c.encoder);
  e.erase("kind");
  e.erase("budget");
  return digest_of({{"stage", "report"},
                    {"report", report_json(c.report)},
                    {"encoder", e},
                    {"train", train_json(c.train)},
                    {"seed", c.seed},
                    {"color", color_digest(c)},
                    {"fidelity", fidelity_digest(c)}});
}

// ---------------------------------------------------------------------------
// Artifact container.

void write_artifact(const fs::path& path, const json& meta, const std::string& payload) {
  std::ostringstream out(std::ios::binary);
  io::write_magic(out, "CLARTF01");
  const std::string text = meta.dump();
  io::write_le<std::uint64_t>(out, text.size());
  out << text << payload;
  write_text_atomic(path, out.str());
}

std::pair<json, std::string> read_artifact(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open artifact " + path.string());
  io::expect_magic(in, "CLARTF01");
  const auto len = io::read_le<std::uint64_t>(in);
  std::string text(len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(len))) {
    throw std::runtime_error("truncated artifact " + path.string());
  }
  std::ostringstream rest;
  rest << in.rdbuf();
  return {json::parse(text), rest.str()};
}

// ---------------------------------------------------------------------------
// Loaders.

IngestedData load_ingested(const PipelineConfig& c) {
  const fs::path path = require_artifact(c, "ingest", ingest_digest(c), ".bin");
  auto [meta, payload] = read_artifact(path);
  std::istringstream in(payload, std::ios::binary);
  IngestedData d;
  d.train = read_binary_cache(in);
  d.test = read_binary_cache(in);
  return d;
}

CooccurrenceGraph load_graph(const PipelineConfig& c) {
  const fs::path path = require_artifact(c, "graph", graph_digest(c), ".bin");
  auto [meta, payload] = read_artifact(path);
  std::istringstream in(payload, std::ios::binary);
  return read_graph(in);
}

Coloring load_coloring(const PipelineConfig& c, const SparseDataset& train) {
  const fs::path path = require_artifact(c, "color", color_digest(c), ".bin");
  auto [meta, payload] = read_artifact(path);
  std::istringstream in(payload, std::ios::binary);
  return read_coloring(in, train.feature_freq());
}

Encoder load_encoder(const PipelineConfig& c) {
  const fs::path path = require_artifact(c, "encode", encode_digest(c), ".json");
  return Encoder::from_json(read_json_file(path).at("encoder"));
}

// ---------------------------------------------------------------------------
// Commands.

StageResult cmd_ingest(const PipelineConfig& c, const CommandOptions& o) {
  c.validate();
  const std::string digest = ingest_digest(c);
  const fs::path bin = artifact_file(c, "ingest", digest, ".bin");
  const fs::path summary = artifact_file(c, "ingest", digest, ".json");
  return run_stage(c, o, "ingest", digest, {bin, summary}, [&] {
    SparseDataset train;
    SparseDataset test;
    if (c.data.synthetic) {
      const SparseDataset all = generate_planted(synthetic_for(c));
      std::tie(train, test) = chronological_split(all, c.data.train_fraction);
    } else {
      LibsvmOptions opts;
      opts.string_keys = c.data.string_keys;
      opts.workers = c.workers;
      train = read_libsvm_file(c.data.train_path, opts);
      if (c.data.test_path.empty()) {
        std::tie(train, test) = chronological_split(train, c.data.train_fraction);
      } else {
        test = read_libsvm_file(c.data.test_path, opts);
      }
    }
    if (c.data.dense_threshold) {
      const DenseDetection dd = detect_dense(train, *c.data.dense_threshold);
      if (!dd.dense_ids.empty()) {
        train = separate_dense(train, dd.dense_ids);
        test = separate_dense(test, dd.dense_ids);
      }
    }
    std::ostringstream payload(std::ios::binary);
    write_binary_cache(payload, train);
    write_binary_cache(payload, test);
    const json meta = artifact_meta(c, "ingest", digest, {});
    write_artifact(bin, meta, payload.str());
    json s = meta;
    s["train"] = dataset_summary(train);
    s["test"] = dataset_summary(test);
    write_text_atomic(summary, s.dump(2) + "\n");
  });
}

StageResult cmd_graph(const PipelineConfig& c, const CommandOptions& o) {
  c.validate();
  const std::string digest = graph_digest(c);
  const fs::path bin = artifact_file(c, "graph", digest, ".bin");
  const fs::path stats = artifact_file(c, "graph", digest, ".json");
  return run_stage(c, o, "graph", digest, {bin, stats}, [&] {
    const IngestedData data = load_ingested(c);
    GraphBuildOptions opts;
    opts.workers = c.workers;
    opts.shard_factor = c.graph.shard_factor;
    opts.max_edges = c.graph.max_edges;
    CooccurrenceGraph graph;
    json histogram = nullptr;
    if (c.graph.mode == ThresholdMode::kBloom) {
      BloomOptions bloom;
      bloom.false_positive_rate = c.graph.bloom_false_positive_rate;
      graph = build_thresholded(data.train, c.graph.k, ThresholdMode::kBloom, opts, bloom);
    } else {
      const EdgeMultiset multiset = count_edges(data.train, opts);
      graph = threshold_graph(multiset, c.graph.k, c.workers);
      histogram = json::object();
      const EdgeHistogram h = multiset.histogram();
      for (const auto& [j, f] : h.counts()) histogram[std::to_string(j)] = f;
    }
    const json meta = artifact_meta(c, "graph", digest, {{"ingest", ingest_digest(c)}});
    std::ostringstream payload(std::ios::binary);
    write_graph(payload, graph);
    write_artifact(bin, meta, payload.str());
    json s = meta;
    s["graph"] = graph_stats_json(graph);
    s["edge_histogram"] = histogram;
    write_text_atomic(stats, s.dump(2) + "\n");
  });
}

StageResult cmd_color(const PipelineConfig& c, const CommandOptions& o) {
  c.validate();
  const std::string digest = color_digest(c);
  const fs::path bin = artifact_file(c, "color", digest, ".bin");
  const fs::path stats = artifact_file(c, "color", digest, ".json");
  return run_stage(c, o, "color", digest, {bin, stats}, [&] {
    const IngestedData data = load_ingested(c);
    const CooccurrenceGraph graph = load_graph(c);
    const FeatureFrequency& freq = data.train.feature_freq();
    json info{{"mode", to_string(c.coloring.mode)}};
    Coloring coloring;
    if (c.coloring.mode == ColoringMode::kGreedy) {
      coloring = greedy_color(graph, c.coloring.order, freq, &data.train);
    } else {
      const FilterResult fr = filter_high_degree(graph);
      const std::uint32_t m = c.coloring.colors ? c.coloring.colors : 2 * fr.delta_f + 1;
      const std::size_t v = fr.filtered_graph.num_vertices();
      const std::uint64_t steps =
          c.coloring.steps ? c.coloring.steps
                           : default_glauber_steps(m, v, c.coloring.steps_multiplier);
      const GlauberResult g = glauber_sample(fr.filtered_graph, m, steps, c.stage_seed("glauber"));
      const Coloring inner = Coloring::from_graph(fr.filtered_graph, g.colors, freq);
      coloring = combine_filtered_coloring(fr, inner, freq);
      info["held_out"] = fr.held_out.size();
      info["delta_f"] = fr.delta_f;
      info["filtered_colors"] = m;
      info["steps"] = g.steps;
      info["mixing_guaranteed"] = g.mixing_guaranteed;
    }
    if (!is_proper(graph, coloring)) throw std::logic_error("coloring is not proper");
    info["colors"] = coloring.num_colors();
    info["vertices"] = coloring.size();
    info["max_degree"] = graph.max_degree();
    const json meta = artifact_meta(c, "color", digest, {{"graph", graph_digest(c)}});
    std::ostringstream payload(std::ios::binary);
    write_coloring(payload, coloring);
    write_artifact(bin, meta, payload.str());
    json s = meta;
    s["coloring"] = info;
    write_text_atomic(stats, s.dump(2) + "\n");
  });
}

namespace {

json uniform_curve(const PipelineConfig& c, const EdgeMultiset& multiset,
                   const SparseDataset& train, const SparseDataset& test) {
  const std::uint32_t k = c.fidelity.uniform_k.value_or(c.graph.k);
  const CooccurrenceGraph g = threshold_graph(multiset, k, c.workers);
  const FeatureFrequency& freq = train.feature_freq();
  const Coloring greedy = greedy_color(g, c.coloring.order, freq, &train);
  const FilterResult fr = filter_high_degree(g);
  const double n_f = static_cast<double>(good_turing(multiset.histogram_excluding(fr.held_out), k));
  const auto base = std::max<std::uint32_t>(
      fr.delta_f + 1,
      static_cast<std::uint32_t>(
          std::ceil(2.0 * fr.delta_f + n_f / static_cast<double>(train.size()))));
  json points = json::array();
  for (double factor : c.fidelity.uniform_color_factors) {
    const auto m = static_cast<std::uint32_t>(std::ceil(base * factor));
    const std::uint64_t steps =
        c.coloring.steps ? c.coloring.steps
                         : mixing_glauber_steps(m, fr.delta_f, fr.filtered_graph.num_vertices(),
                                                c.coloring.steps_multiplier);
    const GlauberResult res = glauber_sample(fr.filtered_graph, m, steps,
                                             hash_combine(c.stage_seed("fidelity"), m));
    const Coloring inner = Coloring::from_graph(fr.filtered_graph, res.colors, freq);
    const Coloring combined = combine_filtered_coloring(fr, inner, freq);
    const CollisionSummary cc = average_collisions(combined, test);
    points.push_back({{"factor", factor},
                      {"filtered_colors", m},
                      {"total_colors", combined.num_colors()},
                      {"avg_collisions", cc.avg_collisions},
                      {"steps", res.steps},
                      {"mixing_guaranteed", res.mixing_guaranteed}});
  }
  return {{"k", k},
          {"held_out", fr.held_out.size()},
          {"delta_f", fr.delta_f},
          {"greedy_colors", greedy.num_colors()},
          {"greedy_avg_collisions", average_collisions(greedy, test).avg_collisions},
          {"points", points}};
}

}  // namespace

StageResult cmd_fidelity(const PipelineConfig& c, const CommandOptions& o) {
  c.validate();
  const std::string digest = fidelity_digest(c);
  const fs::path out = artifact_file(c, "fidelity", digest, ".json");
  return run_stage(c, o, "fidelity", digest, {out}, [&] {
    const IngestedData data = load_ingested(c);
    GraphBuildOptions build;
    build.workers = c.workers;
    build.shard_factor = c.graph.shard_factor;
    build.max_edges = c.graph.max_edges;
    const EdgeMultiset multiset = count_edges(data.train, build);
    FidelityOptions opts;
    opts.thresholds = c.fidelity.thresholds;
    opts.confidence_delta = c.fidelity.confidence_delta;
    opts.greedy_order = c.coloring.order;
    opts.workers = c.workers;
    json j = artifact_meta(c, "fidelity", digest, {{"ingest", ingest_digest(c)}});
    j["fidelity"] = to_json(fidelity_report(data.train, multiset, data.test, opts));
    j["uniform"] = uniform_curve(c, multiset, data.train, data.test);
    write_text_atomic(out, j.dump(2) + "\n");
  });
}

StageResult cmd_encode(const PipelineConfig& c, const CommandOptions& o) {
  c.validate();
  const std::string digest = encode_digest(c);
  const fs::path out = artifact_file(c, "encode", digest, ".json");
  return run_stage(c, o, "encode", digest, {out}, [&] {
    const IngestedData data = load_ingested(c);
    std::shared_ptr<const Coloring> coloring;
    json inputs{{"ingest", ingest_digest(c)}};
    if (needs_coloring(c.encoder.kind)) {
      coloring = std::make_shared<const Coloring>(load_coloring(c, data.train));
      inputs["color"] = color_digest(c);
    }
    const ExperimentConfig e = experiment_config(c, c.encoder.kind, c.encoder.budget);
    Encoder encoder = [&] {
      if (uses_label_statistics(e.encoder) && !e.double_dip) {
        const HashSplit split = hash_split(data.train, e.estimate_ratio);
        return fit_encoder(e, coloring, split.estimate_half, split.fit_half);
      }
      return fit_encoder(e, coloring, data.train, data.train);
    }();
    json j = artifact_meta(c, "encode", digest, inputs);
    j["encoder"] = encoder.to_json();
    write_text_atomic(out, j.dump(2) + "\n");
  });
}

namespace {

void upsert_metrics(const PipelineConfig& c, const json& record) {
  const fs::path path = fs::path(c.output_dir) / "metrics.jsonl";
  const std::array<const char*, 4> key{"dataset", "encoder", "budget", "seed"};
  std::vector<std::string> lines;
  bool replaced = false;
  if (std::ifstream in(path); in) {
    for (std::string line; std::getline(in, line);) {
      if (line.empty()) continue;
      const json existing = json::parse(line);
      const bool same = std::all_of(key.begin(), key.end(), [&](const char* k) {
        return existing.value(k, json()) == record.at(k);
      });
      if (same) {
        lines.push_back(record.dump());
        replaced = true;
      } else {
        lines.push_back(line);
      }
    }
  }
  if (!replaced) lines.push_back(record.dump());
  std::string text;
  for (const std::string& l : lines) text += l + "\n";
  write_text_atomic(path, text);
}

}  // namespace

StageResult cmd_train(const PipelineConfig& c, const CommandOptions& o) {
  c.validate();
  const std::string digest = train_digest(c);
  const fs::path out = artifact_file(c, "train", digest, ".json");
  return run_stage(c, o, "train", digest, {out}, [&] {
    const IngestedData data = load_ingested(c);
    const Encoder encoder = load_encoder(c);
    const ExperimentConfig e = experiment_config(c, c.encoder.kind, c.encoder.budget);
    std::optional<HashSplit> split;
    if (uses_label_statistics(e.encoder) && !e.double_dip) {
      split = hash_split(data.train, e.estimate_ratio);
    }
    const SparseDataset& fit = split ? split->fit_half : data.train;
    const std::vector<EncodedRow> fit_rows = encoder.transform(fit);
    const LogisticModel model = train_logistic(fit_rows, encoder.total_dim(), e.logistic);
    const std::vector<EncodedRow> test_rows = encoder.transform(data.test);
    json metrics{{"dataset", dataset_name(c)},
                 {"encoder", to_string(c.encoder.kind)},
                 {"budget", c.encoder.budget},
                 {"seed", c.seed},
                 {"output_dim", encoder.output_dim()},
                 {"fit_rows", fit.size()},
                 {"train_loss", log_loss(model, fit_rows)},
                 {"test_loss", log_loss(model, test_rows)},
                 {"test_accuracy", accuracy(model, test_rows)},
                 {"digest", digest}};
    json j = artifact_meta(c, "train", digest, {{"encode", encode_digest(c)}});
    j["model"] = model.to_json();
    j["metrics"] = metrics;
    write_text_atomic(out, j.dump(2) + "\n");
    upsert_metrics(c, metrics);
  });
}

StageResult cmd_report(const PipelineConfig& c, const CommandOptions& o) {
  c.validate();
  const std::string digest = report_digest(c);
  const fs::path dir = artifact_dir(c) / ("report-" + digest);
  const std::vector<fs::path> files{dir / "report.json", dir / "loss_vs_budget.csv",
                                    dir / "objective_vs_budget.csv",
                                    dir / "fidelity_by_k.csv", dir / "uniform_collisions.csv"};
  return run_stage(c, o, "report", digest, files, [&] {
    const IngestedData data = load_ingested(c);
    const auto coloring = std::make_shared<const Coloring>(load_coloring(c, data.train));
    const json fidelity =
        read_json_file(require_artifact(c, "fidelity", fidelity_digest(c), ".json"));
    const json meta = artifact_meta(
        c, "report", digest,
        {{"color", color_digest(c)},
         {"fidelity", fidelity_digest(c)},
         {"ingest", ingest_digest(c)}});

    std::string loss = "encoder,budget,status,output_dim,fit_rows,train_loss,test_loss,"
                       "test_accuracy,objective\n";
    json loss_rows = json::array();
    for (EncoderKind kind : c.report.encoders) {
      for (std::uint32_t budget : c.report.budgets) {
        const ExperimentConfig e = experiment_config(c, kind, budget);
        try {
          const ExperimentResult r = run_experiment(e, coloring, data.train, data.test);
          loss += std::string(to_string(kind)) + "," + std::to_string(budget) + ",ok," +
                  std::to_string(r.output_dim) + "," + std::to_string(r.fit_rows) + "," +
                  fmt(r.train_loss) + "," + fmt(r.test_loss) + "," + fmt(r.test_accuracy) + "," +
                  (r.objective ? fmt(*r.objective) : "") + "\n";
          json row = to_json(r);
          row["status"] = "ok";
          loss_rows.push_back(row);
        } catch (const BudgetError& err) {
          loss += std::string(to_string(kind)) + "," + std::to_string(budget) +
                  ",infeasible,,,,,,\n";
          loss_rows.push_back({{"encoder", to_string(kind)},
                               {"budget", budget},
                               {"status", "infeasible"},
                               {"reason", err.what()}});
        }
        log_line(o, std::string("report: ") + to_string(kind) + " @ " + std::to_string(budget));
      }
    }

    const HashSplit split = hash_split(data.train, c.encoder.estimate_ratio);
    const ColorStats stats = collect_color_stats(*coloring, split.estimate_half, c.encoder.policy);
    std::string objective = "budget,status,global_objective,sorting_objective\n";
    json objective_rows = json::array();
    for (std::uint32_t budget : c.report.budgets) {
      if (budget < coloring->num_colors()) {
        objective += std::to_string(budget) + ",infeasible,,\n";
        objective_rows.push_back({{"budget", budget}, {"status", "infeasible"}});
        continue;
      }
      const double global = submodular_compress(stats, budget).objective;
      const double sorting = sorting_heuristic_compress(stats, budget).objective;
      objective += std::to_string(budget) + ",ok," + fmt(global) + "," + fmt(sorting) + "\n";
      objective_rows.push_back({{"budget", budget},
                                {"status", "ok"},
                                {"global_objective", global},
                                {"sorting_objective", sorting}});
    }

    std::string by_k =
        "k,edges,delta,good_turing_per_example,empirical_new_edges,greedy_colors,"
        "greedy_avg_collisions,unseen_feature_rate,held_out,delta_f,"
        "filtered_good_turing_per_example,filtered_empirical_new_edges,"
        "required_colors_unfiltered,required_colors_filtered\n";
    for (const json& r : fidelity.at("fidelity").at("rows")) {
      by_k += std::to_string(r.at("k").get<std::uint32_t>()) + "," +
              std::to_string(r.at("edges").get<std::uint64_t>()) + "," +
              std::to_string(r.at("delta").get<std::uint32_t>()) + "," +
              fmt(r.at("good_turing_per_example")) + "," + fmt(r.at("empirical_new_edges")) + "," +
              std::to_string(r.at("greedy_colors").get<std::uint32_t>()) + "," +
              fmt(r.at("greedy_avg_collisions")) + "," + fmt(r.at("unseen_feature_rate")) + "," +
              std::to_string(r.at("held_out").get<std::size_t>()) + "," +
              std::to_string(r.at("delta_f").get<std::uint32_t>()) + "," +
              fmt(r.at("filtered_good_turing_per_example")) + "," +
              fmt(r.at("filtered_empirical_new_edges")) + "," +
              fmt(r.at("required_colors_unfiltered")) + "," +
              fmt(r.at("required_colors_filtered")) + "\n";
    }

    const json& uniform = fidelity.at("uniform");
    std::string unif =
        "k,held_out,delta_f,greedy_colors,greedy_avg_collisions,filtered_colors,total_colors,"
        "avg_collisions\n";
    for (const json& p : uniform.at("points")) {
      unif += std::to_string(uniform.at("k").get<std::uint32_t>()) + "," +
              std::to_string(uniform.at("held_out").get<std::size_t>()) + "," +
              std::to_string(uniform.at("delta_f").get<std::uint32_t>()) + "," +
              std::to_string(uniform.at("greedy_colors").get<std::uint32_t>()) + "," +
              fmt(uniform.at("greedy_avg_collisions")) + "," +
              std::to_string(p.at("filtered_colors").get<std::uint32_t>()) + "," +
              std::to_string(p.at("total_colors").get<std::uint32_t>()) + "," +
              fmt(p.at("avg_collisions")) + "\n";
    }

    json report = meta;
    report["dataset"] = dataset_name(c);
    report["colors"] = coloring->num_colors();
    report["loss_vs_budget"] = loss_rows;
    report["objective_vs_budget"] = objective_rows;
    report["fidelity"] = fidelity.at("fidelity");
    report["uniform"] = uniform;
    write_text_atomic(files[1], csv_with_header(meta, loss));
    write_text_atomic(files[2], csv_with_header(meta, objective));
    write_text_atomic(files[3], csv_with_header(meta, by_k));
    write_text_atomic(files[4], csv_with_header(meta, unif));
    write_text_atomic(files[0], report.dump(2) + "\n");
  });
}

std::vector<StageResult> cmd_run(const PipelineConfig& c, const CommandOptions& o) {
  c.validate();
  return {cmd_ingest(c, o), cmd_graph(c, o),  cmd_color(c, o),  cmd_fidelity(c, o),
          cmd_encode(c, o), cmd_train(c, o), cmd_report(c, o)};
}

}  // namespace chromatic
