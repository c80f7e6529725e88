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

#include "core/sgs.hpp"

#include <algorithm>
#include <cmath>

namespace diss {

std::vector<double> pivot_distribution(std::span<const double> grads, double beta, bool small_first) {
  if (grads.empty()) throw DomainError("no pivot nodes");
  if (!(beta > 0.0)) throw DomainError("beta must be positive");
  std::vector<double> out(grads.size(), 1.0 / static_cast<double>(grads.size()));
  if (std::isinf(beta)) return out;
  const double sign = small_first ? -1.0 : 1.0;
  std::vector<double> logits(grads.size());
  for (std::size_t i = 0; i < grads.size(); ++i) logits[i] = sign * std::abs(grads[i]) / beta;
  // Normalizing after the max shift keeps ties exactly uniform.
  const double hi = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (std::size_t i = 0; i < grads.size(); ++i) z += out[i] = std::exp(logits[i] - hi);
  for (auto& p : out) p /= z;
  return out;
}

bool feasibility_check(const std::vector<LabeledExample>& xs, const LabeledExample& added, const ReprClass& repr) {
  std::vector<LabeledExample> all = xs;
  all.push_back(added);
  if (has_conflict(all)) return false;
  if (!repr.is_incremental()) return true;
  for (const auto& x : all) {
    if (x.label && !repr.reference().accepts(x.word)) return false;
    if (!x.label) {
      for (const auto& w : repr.mandatory_positives())
        if (w == x.word) return false;
    }
  }
  return true;
}

namespace {

// First move out of the pivot, drawn from the policy (ego) or dynamics (env)
// restricted to the off-tree moves. `weight` rescales each move.
template <class Weight>
std::optional<ForcedMove> draw_first_move(const PrefixTree& tree, int pivot, const MaxEntPolicy& pol, Dfa::State dq,
                                          Rng& rng, Weight weight) {
  const auto& n = tree.node(pivot);
  const Mdp& m = tree.mdp();
  std::vector<double> w(n.pivot_moves.size(), 0.0);
  if (n.kind == PrefixTree::Kind::kEgo) {
    const auto probs = pol.action_probs(n.state, dq);
    for (std::size_t i = 0; i < w.size(); ++i) {
      const auto idx = *m.action_index(n.state, n.pivot_moves[i]);
      w[i] = probs[idx] * weight(n.pivot_moves[i]);
    }
  } else {
    for (std::size_t i = 0; i < w.size(); ++i)
      w[i] = m.transition_prob(n.state, n.action, n.pivot_moves[i]) * weight(n.pivot_moves[i]);
  }
  double total = 0.0;
  for (double x : w) total += x;
  if (!(total > 0.0)) return std::nullopt;
  const auto move = n.pivot_moves[rng.categorical(w)];
  return n.kind == PrefixTree::Kind::kEgo ? ForcedMove::action(move) : ForcedMove::state(move);
}

}  // namespace

std::optional<SgsResult> sgs_sample(const TaskSpec& t, const MaxEntPolicy& pol, const std::vector<LabeledExample>& xs,
                                    const PrefixTree& tree, const SgsConfig& cfg, Rng& rng) {
  const Mdp& m = tree.mdp();
  const auto pivots = tree.pivot_nodes();
  if (pivots.empty()) return std::nullopt;
  const auto pv = pivot_values_of_task(tree, pol);
  const auto grad_all = surprisal_gradient(tree, pv);
  std::vector<double> grads(pivots.size());
  for (std::size_t i = 0; i < pivots.size(); ++i) grads[i] = grad_all[static_cast<std::size_t>(pivots[i])];
  auto dist = pivot_distribution(grads, cfg.beta, cfg.small_gradient_pivots);
  const auto dq_of = node_dfa_states(tree, pol.dfa());
  const SatisfactionToGo sat = satisfaction_to_go(pol);

  // Chance that leaving the tree at a pivot ends with the wanted label.
  auto label_weight = [&](const PrefixTree::Node& node, Dfa::State dq, bool want_in) {
    return [&, dq, want_in](std::int32_t move) {
      double w;
      if (node.kind == PrefixTree::Kind::kEgo) {
        w = sat.action(m, node.state, *m.action_index(node.state, move), dq);
      } else {
        w = sat.state(move, step_dfa(m, pol.dfa(), dq, move));
      }
      return want_in ? w : std::max(0.0, 1.0 - w);
    };
  };
  // Pivots where no continuation can carry the wanted label are dropped.
  for (std::size_t i = 0; i < pivots.size(); ++i) {
    const auto& node = tree.node(pivots[i]);
    const auto dq = dq_of[static_cast<std::size_t>(pivots[i])];
    const auto weight = label_weight(node, dq, grads[i] > 0.0);
    double mass = 0.0;
    for (auto move : node.pivot_moves) mass += weight(move);
    if (!(mass > 0.0)) dist[i] = 0.0;
  }

  std::size_t tried = 0;
  for (std::size_t draw = 0; draw < cfg.pivot_redraws; ++draw) {
    double total = 0.0;
    for (double x : dist) total += x;
    if (!(total > 0.0)) break;
    const auto k = rng.categorical(dist);
    dist[k] = 0.0;  // not redrawn once exhausted
    const int rho = pivots[k];
    const double g = grads[k];
    const bool want_in = g > 0.0;
    const auto& node = tree.node(rho);
    const Path prefix = tree.prefix(rho);
    const Dfa::State dq = dq_of[static_cast<std::size_t>(rho)];

    for (std::size_t attempt = 0; attempt < cfg.retry_limit; ++attempt) {
      ++tried;
      std::optional<Path> path;
      if (cfg.bayes_suffix) {
        const auto first = draw_first_move(tree, rho, pol, dq, rng, label_weight(node, dq, want_in));
        if (!first) break;
        path = sample_conditioned_rollout(pol, sat, want_in, rng, prefix, *first);
        if (!path) continue;
      } else {
        const auto first = draw_first_move(tree, rho, pol, dq, rng, [](std::int32_t) { return 1.0; });
        if (!first) break;
        path = sample_rollout(pol, rng, prefix, *first);
      }
      const bool in_task = path_in_task(t, *path, m);
      if (in_task != want_in) continue;
      LabeledExample x{trace_of(m, *path), !in_task, *path};
      if (!feasibility_check(xs, x, t.repr())) continue;
      return SgsResult{rho, g, std::move(x), tried};
    }
  }
  return std::nullopt;
}

}  // namespace diss
