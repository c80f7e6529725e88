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
#include <vector>

#include "core/dfa.hpp"
#include "core/rng.hpp"
#include "core/task.hpp"

namespace diss {

struct IdentifyQuery {
  std::vector<LabeledExample> examples;
  ReprClassPtr repr;
  std::size_t max_candidates = 20;
  std::size_t max_states = 8;
  /// Cap on search nodes across the whole enumeration.
  std::size_t node_budget = 20'000'000;
};

struct IdentifyResult {
  std::vector<Dfa> dfas;
  /// The examples label some word both ways; no task exists.
  bool conflict = false;
  /// Enumeration stopped at max_states or at the node budget before
  /// max_candidates DFAs were found.
  bool truncated = false;
};

/// The first max_candidates minimal DFAs consistent with the examples and
/// admitted by the representation class, ordered by state count, then by
/// the number of non-self-loop edges, then by accepting mask (bit q =
/// state q), then lexicographically by the row-major transition table. Every DFA is in breadth-first canonical
/// numbering, so no two outputs are isomorphic. Per state count the
/// enumeration is exhaustive.
IdentifyResult enumerate_consistent(const IdentifyQuery& q);

/// Description-length change, in bits, of `to` given `from`: the change in
/// state count times the bits per state id, plus one edge encoding for
/// every non-stuttering (state, symbol, target) triple present in exactly
/// one of the two automata.
double transition_distance_bits(const Dfa& from, const Dfa& to);

/// Unnormalized log-weights of candidates: -distance * ln 2 relative to a
/// reference, or -size_nats (the pure size prior) without one.
std::vector<double> candidate_log_weights(const std::vector<Dfa>& candidates, const ReprClass& repr,
                                          const Dfa* reference);

/// Draws one of the enumerated candidates with probability proportional to
/// exp(log-weight). nullopt when no consistent candidate exists.
MaybeTask sample_candidate(const IdentifyQuery& q, const MaybeTask& reference, Rng& rng);

}  // namespace diss
