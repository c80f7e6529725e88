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

#include "core/prefix_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace diss {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

PrefixTree::PrefixTree(std::span<const Path> demos, const Mdp& m) : mdp_(&m) {
  Node root;
  root.state = m.start();
  nodes_.push_back(root);

  auto descend = [this](int at, Kind kind, StateId state, ActionId action, std::int32_t move) {
    const int found = child(at, move);
    if (found >= 0) return found;
    Node n;
    n.parent = at;
    n.kind = kind;
    n.state = state;
    n.action = action;
    n.depth = nodes_[static_cast<std::size_t>(at)].depth + 1;
    nodes_.push_back(n);
    const int id = static_cast<int>(nodes_.size()) - 1;
    nodes_[static_cast<std::size_t>(at)].children.push_back(id);
    return id;
  };

  for (const auto& demo : demos) {
    const auto report = validate_path(m, demo);
    if (!report.ok) throw DomainError("invalid demonstration: " + report.message);
    int cur = 0;
    ++nodes_[0].count;
    for (std::size_t i = 0; i < demo.actions.size(); ++i) {
      cur = descend(cur, Kind::kEnv, demo.states[i], demo.actions[i], demo.actions[i]);
      ++nodes_[static_cast<std::size_t>(cur)].count;
      if (i + 1 < demo.states.size()) {
        cur = descend(cur, Kind::kEgo, demo.states[i + 1], -1, demo.states[i + 1]);
        ++nodes_[static_cast<std::size_t>(cur)].count;
      }
    }
    ++nodes_[static_cast<std::size_t>(cur)].terminal_count;
  }

  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    auto& n = nodes_[i];
    if (n.kind == Kind::kEgo) {
      if (n.state == m.sink()) continue;
      for (const auto& row : m.rows(n.state))
        if (child(static_cast<int>(i), row.action) < 0) n.pivot_moves.push_back(row.action);
    } else {
      for (const auto& o : m.transition_dist(n.state, n.action)) {
        if (child(static_cast<int>(i), o.next) < 0) {
          n.pivot_moves.push_back(o.next);
          n.pivot_mass += o.prob;
        }
      }
    }
  }
}

int PrefixTree::child(int i, std::int32_t move) const {
  const auto& n = nodes_[static_cast<std::size_t>(i)];
  for (int c : n.children) {
    const auto& cn = nodes_[static_cast<std::size_t>(c)];
    const std::int32_t m = cn.kind == Kind::kEnv ? cn.action : cn.state;
    if (m == move) return c;
  }
  return -1;
}

std::vector<int> PrefixTree::pivot_nodes() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (!nodes_[i].pivot_moves.empty()) out.push_back(static_cast<int>(i));
  return out;
}

Path PrefixTree::prefix(int i) const {
  std::vector<int> chain;
  for (int cur = i; cur >= 0; cur = nodes_[static_cast<std::size_t>(cur)].parent) chain.push_back(cur);
  std::reverse(chain.begin(), chain.end());
  Path p;
  for (int c : chain) {
    const auto& n = nodes_[static_cast<std::size_t>(c)];
    if (n.kind == Kind::kEgo)
      p.states.push_back(n.state);
    else
      p.actions.push_back(n.action);
  }
  return p;
}

int PrefixTree::pivot_of(const Path& p) const {
  if (p.states.empty() || p.states[0] != mdp_->start()) throw DomainError("path does not start at s0");
  int cur = 0;
  for (std::size_t i = 0; i < p.actions.size(); ++i) {
    const int env = child(cur, p.actions[i]);
    if (env < 0) return cur;
    cur = env;
    if (i + 1 >= p.states.size()) break;
    const int ego = child(cur, p.states[i + 1]);
    if (ego < 0) return cur;
    cur = ego;
  }
  return cur;
}

std::vector<Dfa::State> node_dfa_states(const PrefixTree& tree, const Dfa& d) {
  const Mdp& m = tree.mdp();
  std::vector<Dfa::State> dq(tree.size());
  dq[0] = initial_dfa_state(m, d);
  for (std::size_t i = 1; i < tree.size(); ++i) {
    const auto& n = tree.node(static_cast<int>(i));
    const auto parent = dq[static_cast<std::size_t>(n.parent)];
    dq[i] = n.kind == PrefixTree::Kind::kEnv ? parent : step_dfa(m, d, parent, n.state);
  }
  return dq;
}

PivotValues pivot_values_of_task(const PrefixTree& tree, const MaxEntPolicy& pol) {
  const Mdp& m = tree.mdp();
  if (&m != &pol.mdp()) throw DomainError("tree and policy are over different MDPs");
  const auto& vt = pol.values();
  const auto dq = node_dfa_states(tree, pol.dfa());
  PivotValues pv;
  pv.pivot.assign(tree.size(), kNaN);
  pv.leaf.assign(tree.size(), kNaN);
  std::vector<double> qs;
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const auto& n = tree.node(static_cast<int>(i));
    if (tree.is_sink_node(static_cast<int>(i))) {
      pv.leaf[i] = vt.value(m.sink(), dq[i]);
      continue;
    }
    if (n.pivot_moves.empty()) continue;
    if (n.kind == PrefixTree::Kind::kEgo) {
      qs.clear();
      for (ActionId a : n.pivot_moves) qs.push_back(vt.qvalue(m, n.state, *m.action_index(n.state, a), dq[i]));
      pv.pivot[i] = log_sum_exp(qs);
    } else {
      double acc = 0.0;
      for (StateId s : n.pivot_moves)
        acc += m.transition_prob(n.state, n.action, s) * vt.value(s, step_dfa(m, pol.dfa(), dq[i], s));
      pv.pivot[i] = acc / n.pivot_mass;
    }
  }
  return pv;
}

std::vector<double> derived_values(const PrefixTree& tree, const PivotValues& pv) {
  const Mdp& m = tree.mdp();
  std::vector<double> v(tree.size(), kNaN);
  std::vector<double> terms;
  for (std::size_t r = tree.size(); r-- > 0;) {
    const auto& n = tree.node(static_cast<int>(r));
    if (tree.is_sink_node(static_cast<int>(r))) {
      v[r] = pv.leaf[r];
      continue;
    }
    const bool pivot = !n.pivot_moves.empty();
    if (n.kind == PrefixTree::Kind::kEgo) {
      terms.clear();
      for (int c : n.children) terms.push_back(v[static_cast<std::size_t>(c)]);
      if (pivot) terms.push_back(pv.pivot[r]);
      v[r] = log_sum_exp(terms);
    } else {
      double acc = pivot ? n.pivot_mass * pv.pivot[r] : 0.0;
      for (int c : n.children)
        acc += m.transition_prob(n.state, n.action, tree.node(c).state) * v[static_cast<std::size_t>(c)];
      v[r] = acc;
    }
  }
  return v;
}

double edge_prob(const PrefixTree& tree, std::span<const double> derived, int child) {
  const auto& c = tree.node(child);
  if (c.parent < 0) throw DomainError("the root has no incoming edge");
  const auto& p = tree.node(c.parent);
  if (p.kind == PrefixTree::Kind::kEgo)
    return std::exp(derived[static_cast<std::size_t>(child)] - derived[static_cast<std::size_t>(c.parent)]);
  return tree.mdp().transition_prob(p.state, p.action, c.state);
}

double pivot_surprisal(const PrefixTree& tree, const PivotValues& pv) {
  const auto v = derived_values(tree, pv);
  double h = 0.0;
  for (std::size_t i = 1; i < tree.size(); ++i) {
    const auto& c = tree.node(static_cast<int>(i));
    const auto& p = tree.node(c.parent);
    double lp;
    if (p.kind == PrefixTree::Kind::kEgo) {
      lp = v[i] - v[static_cast<std::size_t>(c.parent)];
    } else {
      const double prob = tree.mdp().transition_prob(p.state, p.action, c.state);
      if (prob <= 0.0) return kInf;
      lp = std::log(prob);
    }
    if (std::isnan(lp) || lp == -kInf) return kInf;
    h -= c.count * lp;
  }
  return h;
}

std::vector<double> surprisal_gradient(const PrefixTree& tree, const PivotValues& pv) {
  const auto v = derived_values(tree, pv);
  std::vector<double> edge(tree.size(), 1.0);
  for (std::size_t i = 1; i < tree.size(); ++i) edge[i] = edge_prob(tree, v, static_cast<int>(i));

  // Traversal counts of the ego edges leaving / entering each node.
  std::vector<double> out_ego(tree.size(), 0.0), in_ego(tree.size(), 0.0);
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const auto& n = tree.node(static_cast<int>(i));
    if (n.kind == PrefixTree::Kind::kEgo)
      for (int c : n.children) out_ego[i] += tree.node(c).count;
    if (n.parent >= 0 && tree.node(n.parent).kind == PrefixTree::Kind::kEgo) in_ego[i] = n.count;
  }

  std::vector<double> grad(tree.size(), kNaN);
  for (std::size_t k = 0; k < tree.size(); ++k) {
    const auto& nk = tree.node(static_cast<int>(k));
    if (nk.pivot_moves.empty()) continue;
    // Probability of pivoting once at k.
    const double mass = nk.kind == PrefixTree::Kind::kEgo ? std::exp(pv.pivot[k] - v[k]) : nk.pivot_mass;
    double reach = 1.0;
    double g = 0.0;
    for (int x = static_cast<int>(k); x >= 0; x = tree.node(x).parent) {
      const auto xi = static_cast<std::size_t>(x);
      g += reach * mass * (out_ego[xi] - in_ego[xi]);
      reach *= edge[xi];
    }
    grad[k] = g;
  }
  return grad;
}

std::string tree_to_dot(const PrefixTree& tree, const PivotValues& pv) {
  const auto v = derived_values(tree, pv);
  const auto g = surprisal_gradient(tree, pv);
  std::ostringstream out;
  out.precision(6);
  out << "digraph prefix_tree {\n";
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const auto& n = tree.node(static_cast<int>(i));
    out << "  n" << i << " [shape=" << (n.kind == PrefixTree::Kind::kEgo ? "circle" : "box") << ", label=\"" << i
        << "\\nV=" << v[i];
    if (!n.pivot_moves.empty()) out << "\\npivot=" << pv.pivot[i] << "\\ngrad=" << g[i];
    out << "\"];\n";
  }
  for (std::size_t i = 1; i < tree.size(); ++i) {
    const auto& n = tree.node(static_cast<int>(i));
    out << "  n" << n.parent << " -> n" << i << " [label=\""
        << (n.kind == PrefixTree::Kind::kEnv ? tree.mdp().action_name(n.action) : std::to_string(n.state)) << " #"
        << n.count << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace diss
