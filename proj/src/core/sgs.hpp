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

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "core/planner.hpp"
#include "core/prefix_tree.hpp"
#include "core/rng.hpp"
#include "core/task.hpp"

namespace diss {

struct SgsConfig {
  /// Pivot temperature; infinity gives uniform pivots.
  double beta = 1.0;
  std::size_t retry_limit = 32;
  std::size_t pivot_redraws = 8;
  /// Use exp(-|g|/beta) instead of exp(+|g|/beta).
  bool small_gradient_pivots = false;
  /// Sample suffixes from the acceptance-conditioned policy instead of
  /// rejection sampling.
  bool bayes_suffix = false;
};

/// Probabilities over the given gradient entries.
std::vector<double> pivot_distribution(std::span<const double> grads, double beta, bool small_first = false);

struct SgsResult {
  int pivot = -1;
  double gradient = 0.0;
  LabeledExample example;
  std::size_t paths_tried = 0;
};

bool feasibility_check(const std::vector<LabeledExample>& xs, const LabeledExample& added, const ReprClass& repr);

/// nullopt when every pivot draw exhausted its retries.
std::optional<SgsResult> sgs_sample(const TaskSpec& t, const MaxEntPolicy& pol, const std::vector<LabeledExample>& xs,
                                    const PrefixTree& tree, const SgsConfig& cfg, Rng& rng);

}  // namespace diss
