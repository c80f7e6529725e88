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

#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "core/dfa.hpp"
#include "core/mdp.hpp"
#include "core/rng.hpp"

namespace diss {

/// DFA state of the product before any action: 0, or delta(0, label(s0))
/// when the MDP includes the start label in traces.
Dfa::State initial_dfa_state(const Mdp& m, const Dfa& d);

/// DFA state after entering `next`; the sink does not advance the DFA.
inline Dfa::State step_dfa(const Mdp& m, const Dfa& d, Dfa::State q, StateId next) {
  return next == m.sink() ? q : d.next(q, m.label(next));
}

/// Soft values over the MDP x DFA product, stored densely by
/// (mdp state, dfa state).
struct ValueTable {
  double lambda = 0.0;
  std::size_t n_dfa = 0;
  std::vector<double> v;  // [s * n_dfa + q]
  std::vector<double> q;  // [(action_offset(s) + i) * n_dfa + q]

  double value(StateId s, Dfa::State dq) const {
    return v[static_cast<std::size_t>(s) * n_dfa + static_cast<std::size_t>(dq)];
  }
  double qvalue(const Mdp& m, StateId s, std::size_t action_index, Dfa::State dq) const {
    return q[(m.action_offset(s) + action_index) * n_dfa + static_cast<std::size_t>(dq)];
  }
};

/// Backward induction of the smoothed Bellman backup: lambda * [accepting]
/// at the sink, log-sum-exp over actions at decision states, and the
/// expectation over successors for state-action pairs.
ValueTable soft_values(const Mdp& m, const Dfa& d, double lambda);

/// Diagnostic text dump, one product state per line.
std::string dump_values(const ValueTable& vt, const Mdp& m);

/// Maximum-causal-entropy policy: ln pi(a | s, q) = Q(s, q, a) - V(s, q).
class MaxEntPolicy {
 public:
  MaxEntPolicy(const Mdp& m, Dfa d, double lambda);

  const Mdp& mdp() const { return *mdp_; }
  const Dfa& dfa() const { return dfa_; }
  const ValueTable& values() const { return vt_; }
  double lambda() const { return vt_.lambda; }

  double log_prob(StateId s, Dfa::State dq, std::size_t action_index) const {
    return vt_.qvalue(*mdp_, s, action_index, dq) - vt_.value(s, dq);
  }
  /// Action probabilities at (s, dq) in A(s) order.
  std::vector<double> action_probs(StateId s, Dfa::State dq) const;

 private:
  const Mdp* mdp_;
  Dfa dfa_;
  ValueTable vt_;
};

/// Exact Pr(trace accepted) under the policy, by a forward pass.
double satisfaction_prob(const MaxEntPolicy& pol);
double satisfaction_prob(const Mdp& m, const Dfa& d, double lambda);

enum class Boundary { kNone, kLow, kHigh };

struct CalibrationOptions {
  double tol = 1e-6;
  double lambda_max = 100.0;
  int max_iters = 200;
};

struct Calibration {
  double lambda = 0.0;
  double satisfaction = 0.0;
  /// kLow: even lambda = 0 over-satisfies; kHigh: lambda_max under-satisfies.
  Boundary boundary = Boundary::kNone;
};

/// Bisection for the rationality whose satisfaction probability equals
/// p_target. Throws DomainError unless 0 < p_target < 1.
Calibration calibrate_rationality(const Mdp& m, const Dfa& d, double p_target, const CalibrationOptions& opts = {});

/// ln Pr(path | policy, m): action log-probabilities plus transition
/// log-probabilities. -inf for impossible paths.
double path_log_prob(const MaxEntPolicy& pol, const Path& p);

/// Negative log-likelihood of the demonstrations; +inf when one is
/// impossible.
double demo_surprisal(const MaxEntPolicy& pol, std::span<const Path> demos);

struct TaskEvaluation {
  Calibration calibration;
  double surprisal = 0.0;
};

/// Thread-safe memo of task evaluations keyed by canonical DFA.
class EvaluationCache {
 public:
  std::optional<TaskEvaluation> find(const std::string& key) const;
  void insert(const std::string& key, const TaskEvaluation& e);
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::unordered_map<std::string, TaskEvaluation> map_;
};

/// Calibrate to p_target, plan, and score the demonstrations. `d` should be
/// canonical so the cache key identifies the language.
TaskEvaluation task_surprisal(const Mdp& m, const Dfa& d, std::span<const Path> demos, double p_target,
                              EvaluationCache* cache = nullptr, const CalibrationOptions& opts = {});

/// A move forced at the start of a rollout: an action when continuing from
/// a state, a successor state when continuing from an action.
struct ForcedMove {
  enum class Kind { kNone, kAction, kState };
  Kind kind = Kind::kNone;
  std::int32_t value = -1;

  static ForcedMove none() { return {}; }
  static ForcedMove action(ActionId a) { return {Kind::kAction, a}; }
  static ForcedMove state(StateId s) { return {Kind::kState, s}; }
};

/// Extends `prefix` (default: just s0) to a complete path by alternating
/// policy and environment draws.
Path sample_rollout(const MaxEntPolicy& pol, Rng& rng, const std::optional<Path>& prefix = std::nullopt,
                    ForcedMove forced = {});

/// Probability of eventually being accepted from each product state (and
/// state-action pair) under the policy.
struct SatisfactionToGo {
  std::vector<double> w;         // [s * n_dfa + q]
  std::vector<double> w_action;  // [(action_offset(s) + i) * n_dfa + q]
  std::size_t n_dfa = 0;

  double state(StateId s, Dfa::State dq) const { return w[static_cast<std::size_t>(s) * n_dfa + static_cast<std::size_t>(dq)]; }
  double action(const Mdp& m, StateId s, std::size_t i, Dfa::State dq) const {
    return w_action[(m.action_offset(s) + i) * n_dfa + static_cast<std::size_t>(dq)];
  }
};

SatisfactionToGo satisfaction_to_go(const MaxEntPolicy& pol);

/// Like sample_rollout, but draws from the policy conditioned on the
/// completed trace being accepted (`accept` = true) or rejected, using
/// Bayes' rule on the satisfaction-to-go table. Returns nullopt when the
/// conditioning event has probability zero.
std::optional<Path> sample_conditioned_rollout(const MaxEntPolicy& pol, const SatisfactionToGo& sat, bool accept,
                                               Rng& rng, const std::optional<Path>& prefix = std::nullopt,
                                               ForcedMove forced = {});

}  // namespace diss
