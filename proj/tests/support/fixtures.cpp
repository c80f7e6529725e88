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

#include "support/fixtures.hpp"

#include <algorithm>

namespace diss::testing {

std::filesystem::path data_path(std::string_view name) {
  return std::filesystem::path(DISS_TEST_DATA_DIR) / std::string(name);
}

TwoArm two_arm(double slip) {
  const Alphabet sigma({"_", "g", "r"});
  constexpr StateId s0 = 0, g = 1, r = 2, sink = 3;
  constexpr ActionId a = 0, b = 1, go = 2;
  std::vector<Mdp::State> st(4);
  st[s0].label = 0;
  if (slip > 0.0) st[s0].rows.push_back({a, {{g, 1.0 - slip}, {r, slip}}});
  else st[s0].rows.push_back({a, {{g, 1.0}}});
  st[s0].rows.push_back({b, {{r, 1.0}}});
  st[g].label = 1;
  st[g].rows.push_back({go, {{sink, 1.0}}});
  st[r].label = 2;
  st[r].rows.push_back({go, {{sink, 1.0}}});
  st[sink].label = 0;
  st[sink].rows.push_back({go, {{sink, 1.0}}});
  Mdp m(std::move(st), s0, sink, sigma, {"a", "b", "go"});

  // States: 0 start, 1 after <g> (accept), 2 dead.
  Dfa d(sigma, {0, 1, 2, 2, 2, 2, 2, 2, 2}, {false, true, false});
  Path pa{{s0, g, sink}, {a, go}};
  Path pb{{s0, r, sink}, {b, go}};
  return TwoArm{std::move(m), std::move(d), pa, pb, s0, g, r, a, b};
}

Mdp random_layered_mdp(Rng& rng, int depth, int width, int max_actions, int max_outcomes, bool deterministic) {
  const auto& sigma = color_alphabet();
  // Layer 0 holds only the start state.
  std::vector<std::vector<StateId>> layers;
  StateId next_id = 0;
  layers.push_back({next_id++});
  for (int l = 1; l <= depth; ++l) {
    std::vector<StateId> layer;
    const int w = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(width)));
    for (int i = 0; i < w; ++i) layer.push_back(next_id++);
    layers.push_back(layer);
  }
  const StateId sink = next_id++;
  std::vector<Mdp::State> st(static_cast<std::size_t>(next_id));
  for (auto& s : st) s.label = static_cast<Symbol>(rng.below(3));
  st[static_cast<std::size_t>(sink)].rows.push_back({0, {{sink, 1.0}}});
  for (std::size_t l = 0; l < layers.size(); ++l) {
    for (StateId s : layers[l]) {
      auto& rows = st[static_cast<std::size_t>(s)].rows;
      if (l + 1 == layers.size()) {
        rows.push_back({0, {{sink, 1.0}}});
        continue;
      }
      const auto& nxt = layers[l + 1];
      const int na = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(max_actions)));
      for (int a = 0; a < na; ++a) {
        std::vector<StateId> succ = nxt;
        // Partial Fisher-Yates for a random subset of successors.
        const int k = deterministic ? 1
                                    : std::min<int>(static_cast<int>(nxt.size()),
                                                    1 + static_cast<int>(rng.below(static_cast<std::size_t>(max_outcomes))));
        for (int i = 0; i < k; ++i) std::swap(succ[static_cast<std::size_t>(i)], succ[i + rng.below(succ.size() - static_cast<std::size_t>(i))]);
        std::vector<double> w(static_cast<std::size_t>(k));
        double total = 0;
        for (auto& x : w) total += (x = 0.2 + rng.uniform());
        ActionRow row{a, {}};
        double acc = 0;
        for (int i = 0; i < k; ++i) {
          double p = w[static_cast<std::size_t>(i)] / total;
          if (i + 1 == k) p = 1.0 - acc;
          acc += p;
          row.outcomes.push_back({succ[static_cast<std::size_t>(i)], p});
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return Mdp(std::move(st), 0, sink, sigma, {"a0", "a1", "a2", "a3"});
}

GridSpec random_grid(Rng& rng, int width, int height, int horizon, double slip, int n_colors) {
  GridSpec g;
  g.width = width;
  g.height = height;
  g.horizon = horizon;
  g.slip_prob = slip;
  g.start_x = static_cast<int>(rng.below(static_cast<std::size_t>(width)));
  g.start_y = static_cast<int>(rng.below(static_cast<std::size_t>(height)));
  g.tiles.resize(static_cast<std::size_t>(width * height));
  // Blank is the last colour symbol; mix it in so traces are not all colour.
  const auto blank = static_cast<Symbol>(color_alphabet().size() - 1);
  for (auto& t : g.tiles)
    t = rng.bernoulli(0.4) ? blank : static_cast<Symbol>(rng.below(static_cast<std::size_t>(n_colors)));
  return g;
}

Dfa random_dfa(Rng& rng, const Alphabet& sigma, std::size_t n_states) {
  std::vector<Dfa::State> delta(n_states * sigma.size());
  for (auto& x : delta) x = static_cast<Dfa::State>(rng.below(n_states));
  std::vector<bool> acc(n_states);
  for (std::size_t i = 0; i < n_states; ++i) acc[i] = rng.bernoulli(0.5);
  return Dfa(sigma, std::move(delta), std::move(acc));
}

Path random_walk(const Mdp& m, Rng& rng, std::optional<std::size_t> stop_after) {
  Path p;
  p.states.push_back(m.start());
  while (p.last_state() != m.sink()) {
    if (stop_after && p.actions.size() == *stop_after) break;
    const auto rows = m.rows(p.last_state());
    const auto& row = rows[rng.below(rows.size())];
    std::vector<double> w;
    for (const auto& o : row.outcomes) w.push_back(o.prob);
    p.actions.push_back(row.action);
    p.states.push_back(row.outcomes[rng.categorical(w)].next);
  }
  return p;
}

Bundled bundled() {
  Gridworld w(load_map(data_path("gridworld8x8.map")));
  auto demos = load_demos(w, data_path("demo_green.txt"));
  auto black = load_demos(w, data_path("demo_black.txt"));
  demos.insert(demos.end(), black.begin(), black.end());
  auto diag = load_demos(w, data_path("diagnostics.txt"));
  auto gt = parse_dfa(read_text_file(data_path("ground_truth.dfa")));
  return Bundled{std::move(w), std::move(demos), std::move(gt), std::move(diag)};
}

}  // namespace diss::testing
