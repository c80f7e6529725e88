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

// Small hand-checkable models and random instance generators shared by the
// unit and acceptance tests.

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "core/dfa.hpp"
#include "core/gridworld.hpp"
#include "core/mdp.hpp"
#include "core/rng.hpp"
#include "core/task.hpp"

namespace diss::testing {

std::filesystem::path data_path(std::string_view name);

// s0 --a--> g --> $, s0 --b--> r --> $. With slip, a reaches r instead
// with probability `slip`. Alphabet {_, g, r}; s0 is labelled _.
struct TwoArm {
  Mdp mdp;
  Dfa accept_g;  // accepts exactly <g>
  Path a_arm;
  Path b_arm;
  StateId s0, g, r;
  ActionId a, b;
};
TwoArm two_arm(double slip = 0.0);

// Layered random MDP: `depth` decision layers, every state has 1..max_actions
// actions with 1..max_outcomes successors in the next layer; the last layer
// moves to the sink. Labels are drawn from the first n_symbols colours.
Mdp random_layered_mdp(Rng& rng, int depth, int width, int max_actions, int max_outcomes, bool deterministic);

// Small gridworld with random tiles over the first n_colors symbols of the
// colour alphabet.
GridSpec random_grid(Rng& rng, int width, int height, int horizon, double slip, int n_colors);

// Uniformly random DFA (not necessarily minimal) over sigma.
Dfa random_dfa(Rng& rng, const Alphabet& sigma, std::size_t n_states);

// Random walk under the uniform policy. When stop_after is set the walk is
// cut after that many actions, giving an incomplete path.
Path random_walk(const Mdp& m, Rng& rng, std::optional<std::size_t> stop_after = std::nullopt);

// The bundled 8x8 experiment.
struct Bundled {
  Gridworld world;
  std::vector<Path> demos;
  Dfa ground_truth;
  std::vector<Path> diagnostics;  // positive, negative, negative
};
Bundled bundled();

}  // namespace diss::testing
