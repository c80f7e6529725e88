// Copyright 2026 The DISS Authors
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
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/gridworld.hpp"
#include "core/search.hpp"

namespace diss {

enum class Baseline { kNone, kEnumeration };

struct ExperimentConfig {
  std::filesystem::path map_path;
  std::vector<std::filesystem::path> demo_paths;
  bool incremental = false;
  std::filesystem::path reference_path;
  std::vector<std::string> mandatory_positives;  // comma-separated words
  bool include_start_label = false;
  DissConfig diss;
  Baseline baseline = Baseline::kNone;
  std::size_t baseline_n = 80;
  std::vector<std::uint64_t> seeds{0};
  std::filesystem::path out_dir = "runs";
};

/// Applies one key=value setting. Relative paths resolve against `base`.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value,
                   const std::filesystem::path& base = {});

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base = {});
/// Reads a key = value config, or the config stored in a run_meta.json
/// (restricted to that run's seed). Relative paths resolve against the
/// file's directory.
ExperimentConfig load_config(const std::filesystem::path& path);

/// The settings as key=value lines that parse back to the same config.
std::string config_to_text(const ExperimentConfig& cfg);

/// Loaded inputs of an experiment.
struct Experiment {
  ExperimentConfig config;
  std::unique_ptr<Gridworld> world;
  std::vector<Path> demos;
  ReprClassPtr repr;
};

Experiment load_experiment(const ExperimentConfig& cfg);

RunTrace run_seed(const Experiment& e, std::uint64_t seed);

/// Runs every seed (in parallel up to DISS_THREADS) and writes
/// out_dir/seed_<n>/{trace.jsonl,summary.csv,best_dfa.dot,best_dfa.txt,run_meta.json},
/// plus out_dir/median_summary.csv for more than one seed.
std::vector<RunTrace> run_experiment(const Experiment& e);

/// Per-iteration median of the running minimum energy.
std::vector<double> median_min_energy(const std::vector<RunTrace>& traces);

std::size_t thread_budget();

}  // namespace diss
