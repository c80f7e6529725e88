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

#include "core/planner.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace diss {

Dfa::State initial_dfa_state(const Mdp& m, const Dfa& d) {
  return m.include_start_label() ? d.next(0, m.label(m.start())) : 0;
}

ValueTable soft_values(const Mdp& m, const Dfa& d, double lambda) {
  if (!(lambda >= 0.0)) throw DomainError("rationality must be nonnegative");
  if (d.num_symbols() != m.alphabet().size()) throw DomainError("DFA and MDP alphabets differ");
  const auto nq = d.num_states();
  ValueTable vt;
  vt.lambda = lambda;
  vt.n_dfa = nq;
  vt.v.assign(m.num_states() * nq, 0.0);
  vt.q.assign(m.total_actions() * nq, 0.0);

  const StateId sink = m.sink();
  for (std::size_t dq = 0; dq < nq; ++dq) {
    const double terminal = d.is_accepting(static_cast<Dfa::State>(dq)) ? lambda : 0.0;
    vt.v[static_cast<std::size_t>(sink) * nq + dq] = terminal;
    for (std::size_t i = 0; i < m.num_actions(sink); ++i) vt.q[(m.action_offset(sink) + i) * nq + dq] = terminal;
  }

  const auto& order = m.topological_order();
  std::vector<double> qs;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const StateId s = *it;
    const auto rows = m.rows(s);
    const auto off = m.action_offset(s);
    for (std::size_t dq = 0; dq < nq; ++dq) {
      qs.clear();
      for (std::size_t i = 0; i < rows.size(); ++i) {
        double acc = 0.0;
        for (const auto& o : rows[i].outcomes) {
          const auto next_q = step_dfa(m, d, static_cast<Dfa::State>(dq), o.next);
          acc += o.prob * vt.v[static_cast<std::size_t>(o.next) * nq + static_cast<std::size_t>(next_q)];
        }
        vt.q[(off + i) * nq + dq] = acc;
        qs.push_back(acc);
      }
      vt.v[static_cast<std::size_t>(s) * nq + dq] = log_sum_exp(qs);
    }
  }
  return vt;
}

std::string dump_values(const ValueTable& vt, const Mdp& m) {
  std::ostringstream out;
  out.precision(17);
  out << "# lambda=" << vt.lambda << " dfa_states=" << vt.n_dfa << "\n# state dfa_state v q...\n";
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    for (std::size_t dq = 0; dq < vt.n_dfa; ++dq) {
      out << s << ' ' << dq << ' ' << vt.v[s * vt.n_dfa + dq];
      for (std::size_t i = 0; i < m.num_actions(static_cast<StateId>(s)); ++i)
        out << ' ' << vt.q[(m.action_offset(static_cast<StateId>(s)) + i) * vt.n_dfa + dq];
      out << '\n';
    }
  }
  return out.str();
}

MaxEntPolicy::MaxEntPolicy(const Mdp& m, Dfa d, double lambda)
    : mdp_(&m), dfa_(std::move(d)), vt_(soft_values(m, dfa_, lambda)) {}

std::vector<double> MaxEntPolicy::action_probs(StateId s, Dfa::State dq) const {
  std::vector<double> p(mdp_->num_actions(s));
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::exp(log_prob(s, dq, i));
  return p;
}

double satisfaction_prob(const MaxEntPolicy& pol) {
  const Mdp& m = pol.mdp();
  const Dfa& d = pol.dfa();
  const auto nq = d.num_states();
  std::vector<double> mass(m.num_states() * nq, 0.0);
  mass[static_cast<std::size_t>(m.start()) * nq + static_cast<std::size_t>(initial_dfa_state(m, d))] = 1.0;
  for (StateId s : m.topological_order()) {
    const auto rows = m.rows(s);
    for (std::size_t dq = 0; dq < nq; ++dq) {
      const double here = mass[static_cast<std::size_t>(s) * nq + dq];
      if (here == 0.0) continue;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const double pa = here * std::exp(pol.log_prob(s, static_cast<Dfa::State>(dq), i));
        for (const auto& o : rows[i].outcomes) {
          const auto nq2 = step_dfa(m, d, static_cast<Dfa::State>(dq), o.next);
          mass[static_cast<std::size_t>(o.next) * nq + static_cast<std::size_t>(nq2)] += pa * o.prob;
        }
      }
    }
  }
  double sat = 0.0;
  for (std::size_t dq = 0; dq < nq; ++dq)
    if (d.is_accepting(static_cast<Dfa::State>(dq))) sat += mass[static_cast<std::size_t>(m.sink()) * nq + dq];
  return sat;
}

double satisfaction_prob(const Mdp& m, const Dfa& d, double lambda) {
  return satisfaction_prob(MaxEntPolicy(m, d, lambda));
}

Calibration calibrate_rationality(const Mdp& m, const Dfa& d, double p_target, const CalibrationOptions& opts) {
  if (!(p_target > 0.0 && p_target < 1.0)) throw DomainError("competency must lie strictly between 0 and 1");
  const double f0 = satisfaction_prob(m, d, 0.0);
  if (f0 >= p_target - opts.tol) {
    return {0.0, f0, f0 > p_target + opts.tol ? Boundary::kLow : Boundary::kNone};
  }
  const double fmax = satisfaction_prob(m, d, opts.lambda_max);
  if (fmax < p_target - opts.tol) return {opts.lambda_max, fmax, Boundary::kHigh};

  // Satisfaction is nondecreasing in lambda; bisect to a tight bracket.
  double lo = 0.0, hi = opts.lambda_max;
  for (int it = 0; it < opts.max_iters && hi - lo > 1e-10; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (satisfaction_prob(m, d, mid) < p_target)
      lo = mid;
    else
      hi = mid;
  }
  const double lambda = 0.5 * (lo + hi);
  return {lambda, satisfaction_prob(m, d, lambda), Boundary::kNone};
}

double path_log_prob(const MaxEntPolicy& pol, const Path& p) {
  const Mdp& m = pol.mdp();
  const Dfa& d = pol.dfa();
  if (p.states.empty() || p.states[0] != m.start()) return -kInf;
  Dfa::State dq = initial_dfa_state(m, d);
  double lp = 0.0;
  for (std::size_t i = 0; i < p.actions.size(); ++i) {
    const StateId s = p.states[i];
    if (s == m.sink()) return -kInf;
    const auto idx = m.action_index(s, p.actions[i]);
    if (!idx) return -kInf;
    lp += pol.log_prob(s, dq, *idx);
    if (i + 1 < p.states.size()) {
      const StateId next = p.states[i + 1];
      double prob = 0.0;
      for (const auto& o : m.rows(s)[*idx].outcomes)
        if (o.next == next) prob = o.prob;
      if (prob <= 0.0) return -kInf;
      lp += std::log(prob);
      dq = step_dfa(m, d, dq, next);
    }
  }
  return lp;
}

double demo_surprisal(const MaxEntPolicy& pol, std::span<const Path> demos) {
  double h = 0.0;
  for (const auto& demo : demos) {
    const double lp = path_log_prob(pol, demo);
    if (lp == -kInf) return kInf;
    h -= lp;
  }
  return h;
}

std::optional<TaskEvaluation> EvaluationCache::find(const std::string& key) const {
  std::lock_guard lock(mu_);
  if (auto it = map_.find(key); it != map_.end()) return it->second;
  return std::nullopt;
}

void EvaluationCache::insert(const std::string& key, const TaskEvaluation& e) {
  std::lock_guard lock(mu_);
  map_.try_emplace(key, e);
}

std::size_t EvaluationCache::size() const {
  std::lock_guard lock(mu_);
  return map_.size();
}

TaskEvaluation task_surprisal(const Mdp& m, const Dfa& d, std::span<const Path> demos, double p_target,
                              EvaluationCache* cache, const CalibrationOptions& opts) {
  std::string key;
  if (cache) {
    key = d.key();
    if (auto hit = cache->find(key)) return *hit;
  }
  TaskEvaluation e;
  e.calibration = calibrate_rationality(m, d, p_target, opts);
  e.surprisal = demo_surprisal(MaxEntPolicy(m, d, e.calibration.lambda), demos);
  if (cache) cache->insert(key, e);
  return e;
}

namespace {

struct RolloutCursor {
  Path path;
  Dfa::State dq;
};

RolloutCursor start_cursor(const MaxEntPolicy& pol, const std::optional<Path>& prefix) {
  const Mdp& m = pol.mdp();
  RolloutCursor c{prefix ? *prefix : Path{{m.start()}, {}}, initial_dfa_state(m, pol.dfa())};
  if (c.path.states.empty() || c.path.states[0] != m.start()) throw DomainError("rollout prefix must start at s0");
  const auto report = validate_path(m, c.path);
  if (!report.ok) throw DomainError("invalid rollout prefix: " + report.message);
  for (std::size_t i = 1; i < c.path.states.size(); ++i) c.dq = step_dfa(m, pol.dfa(), c.dq, c.path.states[i]);
  return c;
}

std::size_t outcome_index(std::span<const Outcome> outs, StateId s) {
  for (std::size_t j = 0; j < outs.size(); ++j)
    if (outs[j].next == s) return j;
  throw DomainError("forced state has zero probability");
}

}  // namespace

Path sample_rollout(const MaxEntPolicy& pol, Rng& rng, const std::optional<Path>& prefix, ForcedMove forced) {
  const Mdp& m = pol.mdp();
  auto c = start_cursor(pol, prefix);
  auto& p = c.path;
  if (forced.kind == ForcedMove::Kind::kState && !p.ends_in_action())
    throw DomainError("a forced state needs a prefix ending in an action");
  if (forced.kind == ForcedMove::Kind::kAction && p.ends_in_action())
    throw DomainError("a forced action needs a prefix ending in a state");
  if (forced.kind != ForcedMove::Kind::kNone && !p.ends_in_action() && p.last_state() == m.sink())
    throw DomainError("cannot force a move after the sink");

  auto env_step = [&](bool force) {
    const StateId s = p.states.back();
    const auto outs = m.transition_dist(s, p.actions.back());
    std::size_t j;
    if (force) {
      j = outcome_index(outs, forced.value);
    } else {
      std::vector<double> w(outs.size());
      for (std::size_t k = 0; k < outs.size(); ++k) w[k] = outs[k].prob;
      j = rng.categorical(w);
    }
    p.states.push_back(outs[j].next);
    c.dq = step_dfa(m, pol.dfa(), c.dq, outs[j].next);
  };

  bool first = true;
  if (p.ends_in_action()) {
    env_step(forced.kind == ForcedMove::Kind::kState);
    first = false;
  }
  while (p.states.back() != m.sink()) {
    const StateId s = p.states.back();
    std::size_t idx;
    if (first && forced.kind == ForcedMove::Kind::kAction) {
      const auto found = m.action_index(s, forced.value);
      if (!found) throw DomainError("forced action is not available");
      idx = *found;
    } else {
      idx = rng.categorical(pol.action_probs(s, c.dq));
    }
    first = false;
    p.actions.push_back(m.rows(s)[idx].action);
    env_step(false);
  }
  return p;
}

SatisfactionToGo satisfaction_to_go(const MaxEntPolicy& pol) {
  const Mdp& m = pol.mdp();
  const Dfa& d = pol.dfa();
  const auto nq = d.num_states();
  SatisfactionToGo sat;
  sat.n_dfa = nq;
  sat.w.assign(m.num_states() * nq, 0.0);
  sat.w_action.assign(m.total_actions() * nq, 0.0);
  const StateId sink = m.sink();
  for (std::size_t dq = 0; dq < nq; ++dq) {
    const double a = d.is_accepting(static_cast<Dfa::State>(dq)) ? 1.0 : 0.0;
    sat.w[static_cast<std::size_t>(sink) * nq + dq] = a;
    for (std::size_t i = 0; i < m.num_actions(sink); ++i) sat.w_action[(m.action_offset(sink) + i) * nq + dq] = a;
  }
  const auto& order = m.topological_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const StateId s = *it;
    const auto rows = m.rows(s);
    for (std::size_t dq = 0; dq < nq; ++dq) {
      double total = 0.0;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        double acc = 0.0;
        for (const auto& o : rows[i].outcomes)
          acc += o.prob * sat.state(o.next, step_dfa(m, d, static_cast<Dfa::State>(dq), o.next));
        sat.w_action[(m.action_offset(s) + i) * nq + dq] = acc;
        total += std::exp(pol.log_prob(s, static_cast<Dfa::State>(dq), i)) * acc;
      }
      sat.w[static_cast<std::size_t>(s) * nq + dq] = total;
    }
  }
  return sat;
}

std::optional<Path> sample_conditioned_rollout(const MaxEntPolicy& pol, const SatisfactionToGo& sat, bool accept,
                                               Rng& rng, const std::optional<Path>& prefix, ForcedMove forced) {
  const Mdp& m = pol.mdp();
  auto c = start_cursor(pol, prefix);
  auto& p = c.path;
  auto cond = [accept](double w) { return accept ? w : std::max(0.0, 1.0 - w); };

  auto env_step = [&](bool force) -> bool {
    const StateId s = p.states.back();
    const auto outs = m.transition_dist(s, p.actions.back());
    std::vector<double> w(outs.size());
    for (std::size_t k = 0; k < outs.size(); ++k)
      w[k] = outs[k].prob * cond(sat.state(outs[k].next, step_dfa(m, pol.dfa(), c.dq, outs[k].next)));
    std::size_t j;
    if (force) {
      j = outcome_index(outs, forced.value);
      if (w[j] <= 0.0) return false;
    } else {
      double total = 0.0;
      for (double x : w) total += x;
      if (!(total > 0.0)) return false;
      j = rng.categorical(w);
    }
    p.states.push_back(outs[j].next);
    c.dq = step_dfa(m, pol.dfa(), c.dq, outs[j].next);
    return true;
  };

  bool first = true;
  if (p.ends_in_action()) {
    if (!env_step(forced.kind == ForcedMove::Kind::kState)) return std::nullopt;
    first = false;
  }
  while (p.states.back() != m.sink()) {
    const StateId s = p.states.back();
    const auto probs = pol.action_probs(s, c.dq);
    std::vector<double> w(probs.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = probs[i] * cond(sat.action(m, s, i, c.dq));
    std::size_t idx;
    if (first && forced.kind == ForcedMove::Kind::kAction) {
      const auto found = m.action_index(s, forced.value);
      if (!found) throw DomainError("forced action is not available");
      idx = *found;
      if (w[idx] <= 0.0) return std::nullopt;
    } else {
      double total = 0.0;
      for (double x : w) total += x;
      if (!(total > 0.0)) return std::nullopt;
      idx = rng.categorical(w);
    }
    first = false;
    p.actions.push_back(m.rows(s)[idx].action);
    if (!env_step(false)) return std::nullopt;
  }
  return p;
}

}  // namespace diss
