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

#include <gtest/gtest.h>

#include <cmath>

#include "core/gridworld.hpp"
#include "core/planner.hpp"
#include "core/prefix_tree.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace diss {
namespace {

using testing::two_arm;

const double kLn3 = std::log(3.0);

// s0 -a-> {s1, s2} (coin flip), s0 -b-> s1. From s1 and s2 actions u, v
// move to x or y, slipping with probability 0.2; x and y exit to the sink
// through two actions.
Mdp coin_mdp() {
  constexpr StateId s0 = 0, s1 = 1, s2 = 2, x = 3, y = 4, sink = 5;
  std::vector<Mdp::State> st(6);
  st[s0].rows = {{0, {{s1, 0.5}, {s2, 0.5}}}, {1, {{s1, 1.0}}}};
  for (StateId s : {s1, s2}) st[static_cast<std::size_t>(s)].rows = {{0, {{x, 0.8}, {y, 0.2}}}, {1, {{y, 0.8}, {x, 0.2}}}};
  for (StateId s : {x, y}) st[static_cast<std::size_t>(s)].rows = {{0, {{sink, 1.0}}}, {1, {{sink, 1.0}}}};
  st[sink].rows = {{0, {{sink, 1.0}}}};
  st[s1].label = 1;
  st[s2].label = 2;
  st[x].label = 1;
  st[y].label = 2;
  return Mdp(std::move(st), s0, sink, Alphabet({"_", "g", "r"}), {"a", "b"});
}

std::vector<Path> coin_demos() {
  return {Path{{0, 1, 3, 5}, {0, 0, 0}}, Path{{0, 2, 4, 5}, {0, 1, 1}}};
}

TEST(PrefixTree, CountsAndKinds) {
  const auto m = coin_mdp();
  const auto demos = coin_demos();
  const PrefixTree t(demos, m);
  // root, (s0,a), s1, s2, two env, x, y, two env, two sinks.
  EXPECT_EQ(t.size(), 12u);
  for (int i = 0; i < static_cast<int>(t.size()); ++i) {
    const auto& n = t.node(i);
    int sum = n.terminal_count;
    for (int c : n.children) {
      sum += t.node(c).count;
      EXPECT_EQ(t.node(c).parent, i);
      EXPECT_NE(t.node(c).kind, n.kind);
    }
    EXPECT_EQ(sum, n.count);
  }
  EXPECT_EQ(t.node(0).count, 2);
  // The coin flip at (s0, a) is fully demonstrated: no pivot states.
  const int flip = t.child(0, 0);
  ASSERT_GE(flip, 0);
  EXPECT_EQ(t.node(flip).kind, PrefixTree::Kind::kEnv);
  EXPECT_FALSE(t.is_pivot(flip));
  // Every ego node before the sink has a spare action, and the two
  // slippery env nodes have an undemonstrated outcome. Exits to the sink
  // are deterministic.
  int pivots = 0;
  for (int i = 0; i < static_cast<int>(t.size()); ++i) {
    const auto& n = t.node(i);
    const bool expect = n.kind == PrefixTree::Kind::kEgo ? !t.is_sink_node(i) : (i != flip && n.state <= 2);
    EXPECT_EQ(t.is_pivot(i), expect) << i;
    pivots += t.is_pivot(i);
  }
  EXPECT_EQ(pivots, 7);
}

TEST(PrefixTree, IdenticalDemosShareNodes) {
  const auto f = two_arm();
  const std::vector<Path> one{f.a_arm}, two{f.a_arm, f.a_arm};
  const PrefixTree a(one, f.mdp), b(two, f.mdp);
  ASSERT_EQ(a.size(), b.size());
  for (int i = 1; i < static_cast<int>(b.size()); ++i) EXPECT_EQ(b.node(i).count, 2);
  // Chain, deterministic: only the root has an alternative.
  EXPECT_EQ(a.pivot_nodes(), std::vector<int>{0});
  EXPECT_EQ(a.node(0).pivot_moves, std::vector<std::int32_t>{f.b});
}

TEST(PrefixTree, PivotOfFindsTheDeepestPrefix) {
  const auto m = coin_mdp();
  const auto demos = coin_demos();
  const PrefixTree t(demos, m);
  EXPECT_EQ(t.pivot_of(Path{{0, 1, 5}, {1, 0}}), 0);
  const auto p = Path{{0, 1, 4, 5}, {0, 0, 0}};
  const int n = t.pivot_of(p);
  EXPECT_EQ(t.prefix(n), (Path{{0, 1}, {0, 0}}));
  EXPECT_EQ(t.node(n).kind, PrefixTree::Kind::kEnv);
  for (const auto& d : demos) EXPECT_TRUE(t.is_sink_node(t.pivot_of(d)));
}

TEST(PrefixTree, EnvProbabilitiesSumToOne) {
  const auto m = coin_mdp();
  const auto demos = coin_demos();
  const PrefixTree t(demos, m);
  const MaxEntPolicy pol(m, Dfa::constant(m.alphabet(), true), 1.0);
  const auto pv = pivot_values_of_task(t, pol);
  const auto dv = derived_values(t, pv);
  for (int i = 0; i < static_cast<int>(t.size()); ++i) {
    const auto& n = t.node(i);
    if (n.kind != PrefixTree::Kind::kEnv) continue;
    double total = n.pivot_mass;
    for (int c : n.children) total += edge_prob(t, dv, c);
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(PivotValues, TwoArmRoot) {
  const auto f = two_arm();
  const std::vector<Path> demos{f.a_arm};
  const PrefixTree t(demos, f.mdp);
  const MaxEntPolicy pol(f.mdp, f.accept_g, kLn3);
  const auto pv = pivot_values_of_task(t, pol);
  EXPECT_EQ(pv.pivot[0], 0.0);  // q(s0, b): the reject arm
  const auto dv = derived_values(t, pv);
  EXPECT_NEAR(dv[0], std::log(4.0), 1e-12);
  const int a = t.child(0, f.a);
  EXPECT_NEAR(edge_prob(t, dv, a), 0.75, 1e-12);
  EXPECT_NEAR(pivot_surprisal(t, pv), -std::log(0.75), 1e-12);
  const auto g = surprisal_gradient(t, pv);
  EXPECT_NEAR(g[0], 0.25, 1e-12);
  for (int i = 1; i < static_cast<int>(t.size()); ++i) EXPECT_TRUE(std::isnan(g[static_cast<std::size_t>(i)]));
}

TEST(PivotValues, SingletonMoveSetsAreExact) {
  const auto m = coin_mdp();
  const auto demos = coin_demos();
  const PrefixTree t(demos, m);
  Rng rng(1);
  const auto d = testing::random_dfa(rng, m.alphabet(), 3);
  const MaxEntPolicy pol(m, d, 2.0);
  const auto pv = pivot_values_of_task(t, pol);
  const auto dq = node_dfa_states(t, d);
  // Root: off-tree action b only.
  EXPECT_NEAR(pv.pivot[0], pol.values().qvalue(m, 0, 1, dq[0]), 1e-15);
  // Env node (s1, a): off-tree successor y with conditional probability 1.
  const int s1 = t.child(t.child(0, 0), 1);
  const int s1a = t.child(s1, 0);
  ASSERT_GE(s1a, 0);
  EXPECT_EQ(t.node(s1a).pivot_moves, std::vector<std::int32_t>{4});
  EXPECT_NEAR(pv.pivot[static_cast<std::size_t>(s1a)], pol.values().value(4, step_dfa(m, d, dq[static_cast<std::size_t>(s1)], 4)), 1e-15);
}

TEST(PivotValues, DerivedValuesReproducePlannerValues) {
  Rng rng(9);
  for (int i = 0; i < 20; ++i) {
    GridSpec g = testing::random_grid(rng, 3, 3, 3, 0.2, 3);
    Gridworld w(g);
    const auto& m = w.mdp();
    std::vector<Path> demos{testing::random_walk(m, rng), testing::random_walk(m, rng, 2)};
    const PrefixTree t(demos, m);
    const auto d = testing::random_dfa(rng, m.alphabet(), 3);
    const MaxEntPolicy pol(m, d, 3 * rng.uniform());
    const auto pv = pivot_values_of_task(t, pol);
    const auto dv = derived_values(t, pv);
    const auto dq = node_dfa_states(t, d);
    for (int k = 0; k < static_cast<int>(t.size()); ++k) {
      const auto& n = t.node(k);
      double expect;
      if (n.kind == PrefixTree::Kind::kEgo) {
        expect = pol.values().value(n.state, dq[static_cast<std::size_t>(k)]);
      } else {
        const auto idx = *m.action_index(n.state, n.action);
        expect = pol.values().qvalue(m, n.state, idx, dq[static_cast<std::size_t>(k)]);
      }
      EXPECT_NEAR(dv[static_cast<std::size_t>(k)], expect, 1e-9);
    }
  }
}

TEST(PivotSurprisal, UniformPolicyCountsContinuations) {
  const auto m = coin_mdp();
  const auto demos = coin_demos();
  const PrefixTree t(demos, m);
  const MaxEntPolicy pol(m, Dfa::constant(m.alphabet(), false), 0.0);
  const auto pv = pivot_values_of_task(t, pol);
  // Ego edges: 2 demos through s0 (2 actions), one each through s1, s2, x, y (2 actions each).
  // Env edges contribute the dynamics: 0.5, 0.8 twice.
  const double expect = 2 * std::log(2.0) + 4 * std::log(2.0) - 2 * std::log(0.5) - 2 * std::log(0.8);
  EXPECT_NEAR(pivot_surprisal(t, pv), expect, 1e-12);
  EXPECT_NEAR(pivot_surprisal(t, pv), demo_surprisal(pol, demos), 1e-12);
}

TEST(Gradient, EmptyWhenNothingPivots) {
  const auto f = two_arm();
  const std::vector<Path> demos{f.a_arm, f.b_arm};
  const PrefixTree t(demos, f.mdp);
  EXPECT_TRUE(t.pivot_nodes().empty());
  const MaxEntPolicy pol(f.mdp, f.accept_g, 1.0);
  for (double g : surprisal_gradient(t, pivot_values_of_task(t, pol))) EXPECT_TRUE(std::isnan(g));
}

TEST(Gradient, MatchesCentralDifferences) {
  Rng rng(19);
  for (int i = 0; i < 10; ++i) {
    GridSpec g = testing::random_grid(rng, 3, 3, 3, 0.25, 3);
    Gridworld w(g);
    const auto& m = w.mdp();
    std::vector<Path> demos{testing::random_walk(m, rng), testing::random_walk(m, rng)};
    const PrefixTree t(demos, m);
    const MaxEntPolicy pol(m, testing::random_dfa(rng, m.alphabet(), 3), 2.0);
    auto pv = pivot_values_of_task(t, pol);
    const auto grad = surprisal_gradient(t, pv);
    double scale = 0, worst = 0;
    for (int k : t.pivot_nodes()) {
      const auto K = static_cast<std::size_t>(k);
      const double x = pv.pivot[K];
      pv.pivot[K] = x + 1e-5;
      const double up = pivot_surprisal(t, pv);
      pv.pivot[K] = x - 1e-5;
      const double dn = pivot_surprisal(t, pv);
      pv.pivot[K] = x;
      const double fd = (up - dn) / 2e-5;
      scale = std::max(scale, std::abs(fd));
      worst = std::max(worst, std::abs(fd - grad[K]));
    }
    EXPECT_LT(worst, 1e-4 * scale);
  }
}

TEST(PrefixTree, DotExportMentionsEveryNode) {
  const auto f = two_arm();
  const std::vector<Path> demos{f.a_arm};
  const PrefixTree t(demos, f.mdp);
  const MaxEntPolicy pol(f.mdp, f.accept_g, 1.0);
  const auto dot = tree_to_dot(t, pivot_values_of_task(t, pol));
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NE(dot.find("n" + std::to_string(i)), std::string::npos);
}

}  // namespace
}  // namespace diss
