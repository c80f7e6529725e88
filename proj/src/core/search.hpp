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

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "core/identify.hpp"
#include "core/planner.hpp"
#include "core/prefix_tree.hpp"
#include "core/sgs.hpp"
#include "core/task.hpp"

namespace diss {

struct DissConfig {
  double theta = 1.0 / 50.0;
  SgsConfig sgs{.beta = 0.006737946999085467};  // e^-5
  double p_drop = 0.25;
  /// Reset period; 0 disables resets.
  std::size_t kappa = 15;
  double t0 = 10.0;
  double gamma = 0.95;
  /// Softmin temperature for resets; nullopt follows the cooling schedule.
  std::optional<double> reset_temp;
  std::size_t max_iters = 100;
  double competency = 0.9;
  std::uint64_t seed = 0;
  std::size_t max_candidates = 20;
  std::size_t max_states = 8;
  std::size_t node_budget = 20'000'000;
  CalibrationOptions calibration;

  double temperature(std::size_t t) const { return t0 * std::pow(gamma, static_cast<double>(t)); }
};

struct EnergyRecord {
  double energy = kInf;
  double surprisal = kInf;
  double size_term = 0.0;
  double lambda = 0.0;
  Boundary boundary = Boundary::kNone;
};

/// U = theta * size + h, memoized by canonical task.
class EnergyModel {
 public:
  EnergyModel(const Mdp& m, std::vector<Path> demos, double theta, double competency, CalibrationOptions opts = {});
  EnergyRecord evaluate(const MaybeTask& t);
  const Mdp& mdp() const { return *mdp_; }
  const std::vector<Path>& demos() const { return demos_; }
  const PrefixTree& tree() const { return tree_; }
  std::size_t unique_evaluations() const { return memo_.size(); }

 private:
  const Mdp* mdp_;
  std::vector<Path> demos_;
  PrefixTree tree_;
  double theta_;
  double competency_;
  CalibrationOptions opts_;
  std::map<std::string, EnergyRecord> memo_;
};

struct SaState {
  std::vector<LabeledExample> examples;
  MaybeTask task;
  double energy = kInf;
};

/// dU = U(current) - U(proposal).
bool sa_accept(double dU, double T, Rng& rng);

struct HistoryEntry {
  std::vector<LabeledExample> examples;
  MaybeTask task;
  double energy = kInf;
};

struct IterationRecord {
  std::size_t iter = 0;
  double temperature = 0.0;
  std::string candidate;  // DFA exchange text, empty for no task
  std::size_t candidate_states = 0;
  EnergyRecord candidate_energy;
  bool accepted = false;
  bool reset = false;
  double reset_energy = kInf;
  int pivot = -1;
  double gradient = 0.0;
  std::string sampled_word;
  bool has_sample = false;
  bool sampled_label = false;
  std::size_t num_examples = 0;
  double current_energy = kInf;
  double min_energy = kInf;
};

struct RunTrace {
  std::vector<IterationRecord> records;
  MaybeTask best;
  double best_energy = kInf;
  std::size_t unique_evaluations = 0;
};

struct StepContext {
  EnergyModel& model;
  ReprClassPtr repr;
  const DissConfig& cfg;
  Rng& sa_rng;
  Rng& sgs_rng;
  Rng& id_rng;
};

/// One proposal/accept round. Appends the proposal to `history` and fills the
/// candidate, sample and acceptance fields of `rec`.
SaState diss_step(const SaState& z, StepContext& ctx, std::vector<HistoryEntry>& history, IterationRecord& rec,
                  double temperature);

/// Softmin draw over past candidates; nullopt when no entry has finite energy.
std::optional<std::size_t> reset_index(std::span<const HistoryEntry> history, double temperature, Rng& rng);

std::optional<SaState> maybe_reset(std::size_t t, std::span<const HistoryEntry> history, StepContext& ctx,
                                   double temperature);

RunTrace run_diss(const Mdp& m, std::span<const Path> demos, ReprClassPtr repr, const DissConfig& cfg);

RunTrace run_enumeration_baseline(const Mdp& m, std::span<const Path> demos, ReprClassPtr repr, const DissConfig& cfg,
                                  std::size_t n);

void write_trace_jsonl(std::ostream& os, const RunTrace& trace);
void write_summary_csv(std::ostream& os, const RunTrace& trace);

}  // namespace diss
