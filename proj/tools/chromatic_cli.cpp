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

// Command-line driver for the chromatic learning pipeline.
//
//   chromatic run --synthetic --output out
//   chromatic encode --config pipeline.json --encoder ht --budget 256

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "chromatic/pipeline.hpp"
#include "json.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<unsigned> workers;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint32_t> k;
  std::optional<std::uint32_t> budget;
  std::optional<std::string> encoder;
  std::optional<std::string> policy;
  std::optional<std::string> coloring;
  std::optional<std::string> output;
  bool synthetic = false;
  bool force = false;
  bool print_config = false;
};

nlohmann::json apply(const Overrides& o) {
  nlohmann::json j = nlohmann::json::object();
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw chromatic::ConfigError("cannot open config file " + o.config_path);
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw chromatic::ConfigError("malformed config " + o.config_path + ": " + e.what());
    }
  }
  if (o.workers) j["workers"] = *o.workers;
  if (o.seed) j["seed"] = *o.seed;
  if (o.output) j["output_dir"] = *o.output;
  if (o.k) j["graph"]["k"] = *o.k;
  if (o.budget) j["encoder"]["budget"] = *o.budget;
  if (o.encoder) j["encoder"]["kind"] = *o.encoder;
  if (o.policy) j["encoder"]["policy"] = *o.policy;
  if (o.coloring) j["coloring"]["mode"] = *o.coloring;
  if (o.synthetic) {
    j["data"]["synthetic"] = true;
    j["data"].erase("train_path");
    j["data"].erase("test_path");
  }
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chromatic learning: sparse feature compression via graph coloring"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides o;
  app.add_option("--config", o.config_path, "Pipeline config (JSON)")->check(CLI::ExistingFile);
  app.add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "Seed for all randomness");
  app.add_option("--k", o.k, "Co-occurrence threshold")->check(CLI::PositiveNumber);
  app.add_option("--budget", o.budget, "Encoder output budget")->check(CLI::PositiveNumber);
  app.add_option("--encoder", o.encoder, "Encoder")
      ->check(CLI::IsMember({"clsm", "clte", "clft", "ft", "ht"}));
  app.add_option("--policy", o.policy, "Collision policy")
      ->check(CLI::IsMember({"popular", "lowest"}));
  app.add_option("--coloring", o.coloring, "Coloring mode")
      ->check(CLI::IsMember({"greedy", "uniform"}));
  app.add_option("--output", o.output, "Output directory");
  app.add_flag("--synthetic", o.synthetic, "Use the planted-structure generator as input");
  app.add_flag("--force", o.force, "Recompute even when the artifact exists");
  app.add_flag("--print-config", o.print_config, "Print the resolved config before running");

  using Command = std::function<void(const chromatic::PipelineConfig&,
                                     const chromatic::CommandOptions&)>;
  const std::map<std::string, std::pair<std::string, Command>> commands{
      {"ingest",
       {"Parse inputs, split and cache them",
        [](auto& c, auto& opt) { chromatic::cmd_ingest(c, opt); }}},
      {"graph",
       {"Build the thresholded co-occurrence graph",
        [](auto& c, auto& opt) { chromatic::cmd_graph(c, opt); }}},
      {"color",
       {"Color the graph",
        [](auto& c, auto& opt) { chromatic::cmd_color(c, opt); }}},
      {"fidelity",
       {"Good-Turing and collision diagnostics",
        [](auto& c, auto& opt) { chromatic::cmd_fidelity(c, opt); }}},
      {"encode",
       {"Fit the configured encoder",
        [](auto& c, auto& opt) { chromatic::cmd_encode(c, opt); }}},
      {"train",
       {"Train and evaluate a logistic model",
        [](auto& c, auto& opt) { chromatic::cmd_train(c, opt); }}},
      {"report",
       {"Emit report series (CSV/JSON)",
        [](auto& c, auto& opt) { chromatic::cmd_report(c, opt); }}},
      {"run",
       {"Run every stage in order",
        [](auto& c, auto& opt) { chromatic::cmd_run(c, opt); }}},
  };
  for (const auto& [name, entry] : commands) app.add_subcommand(name, entry.first);

  CLI11_PARSE(app, argc, argv);

  try {
    const chromatic::PipelineConfig config = chromatic::PipelineConfig::from_json(apply(o));
    if (o.print_config) std::cout << config.to_json().dump(2) << '\n';
    chromatic::CommandOptions options;
    options.force = o.force;
    options.log = &std::cerr;
    const std::string name = app.get_subcommands().front()->get_name();
    commands.at(name).second(config, options);
  } catch (const chromatic::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const chromatic::MissingArtifact& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
