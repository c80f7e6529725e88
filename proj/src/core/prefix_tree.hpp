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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/mdp.hpp"
#include "core/planner.hpp"

namespace diss {

/// Prefix tree of a multiset of demonstrations. Node 0 is the root (s0).
/// Ego nodes end in a state, env nodes end in an action. Nodes are stored
/// so that every parent precedes its children.
class PrefixTree {
 public:
  enum class Kind { kEgo, kEnv };

  struct Node {
    int parent = -1;
    Kind kind = Kind::kEgo;
    /// Ego: the node's last state. Env: the state the action was taken in.
    StateId state = -1;
    /// Env: the node's last action. Ego: -1.
    ActionId action = -1;
    /// Number of demonstrations passing through this node; the traversal
    /// count of the edge from the parent.
    int count = 0;
    /// Demonstrations ending exactly here.
    int terminal_count = 0;
    std::vector<int> children;
    /// Off-tree moves: actions (ego) or successor states (env).
    std::vector<std::int32_t> pivot_moves;
    /// Dynamics mass of the off-tree successors (env nodes only).
    double pivot_mass = 0.0;
    std::size_t depth = 0;
  };

  PrefixTree(std::span<const Path> demos, const Mdp& m);

  const Mdp& mdp() const { return *mdp_; }
  std::size_t size() const { return nodes_.size(); }
  const Node& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  const std::vector<Node>& nodes() const { return nodes_; }

  bool is_sink_node(int i) const {
    const auto& n = node(i);
    return n.kind == Kind::kEgo && n.state == mdp_->sink();
  }
  bool is_pivot(int i) const { return !node(i).pivot_moves.empty(); }
  std::vector<int> pivot_nodes() const;

  /// Root-to-node path (the node's prefix).
  Path prefix(int i) const;

  /// Deepest node that is a prefix of p.
  int pivot_of(const Path& p) const;

  /// Child of i reached by `move`, or -1.
  int child(int i, std::int32_t move) const;

 private:
  const Mdp* mdp_;
  std::vector<Node> nodes_;
};

/// Node-indexed pivot values and the constants of sink leaves. Entries of
/// nodes with no off-tree moves are NaN.
struct PivotValues {
  std::vector<double> pivot;
  std::vector<double> leaf;
};

/// DFA state of each tree node under d.
std::vector<Dfa::State> node_dfa_states(const PrefixTree& tree, const Dfa& d);

/// Pivot values induced by a task's policy: log-sum-exp of Q over the
/// off-tree actions at ego nodes, the dynamics-renormalized expectation of
/// V over off-tree successors at env nodes, lambda * [accepted] at sink
/// leaves.
PivotValues pivot_values_of_task(const PrefixTree& tree, const MaxEntPolicy& pol);

/// Bottom-up values determined by the pivot values.
std::vector<double> derived_values(const PrefixTree& tree, const PivotValues& pv);

/// Probability of the edge into `child` under the local policy.
double edge_prob(const PrefixTree& tree, std::span<const double> derived, int child);

/// Count-weighted negative log-likelihood of all tree edges.
double pivot_surprisal(const PrefixTree& tree, const PivotValues& pv);

/// Closed-form gradient of pivot_surprisal with respect to each pivot
/// value; NaN for nodes that are not pivots.
std::vector<double> surprisal_gradient(const PrefixTree& tree, const PivotValues& pv);

/// Diagnostic graphviz rendering annotated with pivot values, derived
/// values and the gradient.
std::string tree_to_dot(const PrefixTree& tree, const PivotValues& pv);

}  // namespace diss
