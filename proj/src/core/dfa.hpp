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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/mdp.hpp"

namespace diss {

/// Complete deterministic automaton over an ordered alphabet. State 0 is
/// the start state.
class Dfa {
 public:
  using State = std::int32_t;

  Dfa() = default;
  /// `delta` is row-major: delta[q * |sigma| + a].
  Dfa(Alphabet sigma, std::vector<State> delta, std::vector<bool> accepting);

  std::size_t num_states() const { return accepting_.size(); }
  std::size_t num_symbols() const { return sigma_.size(); }
  const Alphabet& alphabet() const { return sigma_; }

  State next(State q, Symbol a) const {
    return delta_[static_cast<std::size_t>(q) * sigma_.size() + static_cast<std::size_t>(a)];
  }
  bool is_accepting(State q) const { return accepting_[static_cast<std::size_t>(q)]; }
  const std::vector<State>& table() const { return delta_; }
  const std::vector<bool>& accepting() const { return accepting_; }

  /// State reached from `from` after reading w; throws on foreign symbols.
  State run(const Word& w, State from = 0) const;
  bool accepts(const Word& w) const { return is_accepting(run(w)); }

  /// Number of (q, a) with delta(q, a) != q.
  std::size_t num_edges() const;

  /// Accepting states as an integer, bit q set when q accepts (q < 64).
  std::uint64_t accept_mask() const;

  /// Stable textual key; equal for equal tables.
  std::string key() const;

  bool operator==(const Dfa&) const = default;

  /// Accepts every word / no word over sigma.
  static Dfa constant(const Alphabet& sigma, bool accept);

 private:
  Alphabet sigma_;
  std::vector<State> delta_;
  std::vector<bool> accepting_;
};

/// Language-equivalent minimal DFA with states numbered breadth-first from
/// the start over the ordered alphabet.
Dfa minimize(const Dfa& d);

/// Renumbers reachable states breadth-first; drops unreachable ones. Does
/// not merge equivalent states.
Dfa canonical_numbering(const Dfa& d);

/// True when the reachable part of d has no two equivalent states.
bool is_minimal(const Dfa& d);

/// Shortest word accepted by a and rejected by b, if any.
std::optional<Word> subset_counterexample(const Dfa& a, const Dfa& b);

/// L(a) subset of L(b); throws DomainError on alphabet mismatch.
bool language_subset(const Dfa& a, const Dfa& b);

bool language_equal(const Dfa& a, const Dfa& b);

/// Description length in bits of a canonical minimal DFA under the
/// stuttering encoding: self loops are free, every other edge pays for its
/// source, symbol and target.
double size_bits(const Dfa& d);
double size_nats_of(const Dfa& d);

/// Bits to encode one non-stuttering edge in an n-state automaton.
int edge_bits(std::size_t n_states, std::size_t n_symbols);

/// `n=<int>; sigma=r,b,y,n,_; accept=<mask>; edges=q,a->q' ...` with only
/// non-self-loop edges listed.
std::string to_text(const Dfa& d);
Dfa parse_dfa(std::string_view text);

/// Graphviz rendering; accepting states are doublecircles, self loops are
/// omitted and parallel edges are merged into one label.
std::string to_dot(const Dfa& d, std::string_view name = "dfa");

/// Parses `a,b,c` into symbols of sigma. An empty string is the empty word.
Word parse_word(const Alphabet& sigma, std::string_view text);
std::string format_word(const Alphabet& sigma, const Word& w);

}  // namespace diss
