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
#include <string>
#include <vector>

#include "core/common.hpp"

namespace diss {

/// Ordered set of symbol names. Symbols are referred to by index.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::string& name(Symbol s) const { return names_.at(static_cast<std::size_t>(s)); }
  const std::vector<std::string>& names() const { return names_; }

  /// Index of `name`, or nullopt.
  std::optional<Symbol> find(std::string_view name) const;
  /// Index of `name`; throws DomainError for a foreign symbol.
  Symbol index(std::string_view name) const;

  bool operator==(const Alphabet&) const = default;

 private:
  std::vector<std::string> names_;
};

/// The colour alphabet of the gridworld experiments: red, blue, yellow,
/// brown, blank, in that order.
const Alphabet& color_alphabet();

struct Outcome {
  StateId next;
  double prob;
};

/// One row of the transition relation: the action and its successor
/// distribution.
struct ActionRow {
  ActionId action;
  std::vector<Outcome> outcomes;
};

/// Finite MDP with an absorbing end-of-episode sink. States other than the
/// sink must form a DAG; the finite horizon is part of the state space.
class Mdp {
 public:
  struct State {
    std::vector<ActionRow> rows;  // A(s) in order
    Symbol label = 0;
  };

  Mdp(std::vector<State> states, StateId start, StateId sink, Alphabet alphabet,
      std::vector<std::string> action_names);

  std::size_t num_states() const { return states_.size(); }
  StateId start() const { return start_; }
  StateId sink() const { return sink_; }
  const Alphabet& alphabet() const { return alphabet_; }

  std::span<const ActionRow> rows(StateId s) const { return states_.at(static_cast<std::size_t>(s)).rows; }
  std::size_t num_actions(StateId s) const { return rows(s).size(); }
  Symbol label(StateId s) const { return states_[static_cast<std::size_t>(s)].label; }

  /// Position of `a` within A(s), or nullopt.
  std::optional<std::size_t> action_index(StateId s, ActionId a) const;

  /// Successor distribution of (s, a); throws DomainError if a is not in A(s).
  std::span<const Outcome> transition_dist(StateId s, ActionId a) const;

  /// P(next | s, a), zero when unreachable; throws for unknown actions.
  double transition_prob(StateId s, ActionId a, StateId next) const;

  /// Non-sink states ordered so that every successor comes later.
  const std::vector<StateId>& topological_order() const { return topo_; }

  /// Offset of state s's first action in a flat (state, action) array.
  std::size_t action_offset(StateId s) const { return action_offset_[static_cast<std::size_t>(s)]; }
  std::size_t total_actions() const { return action_offset_.back(); }

  const std::string& action_name(ActionId a) const { return action_names_.at(static_cast<std::size_t>(a)); }
  std::optional<ActionId> find_action(std::string_view name) const;

  /// When set, the start state's colour is the first letter of every trace.
  bool include_start_label() const { return include_start_label_; }
  void set_include_start_label(bool on) { include_start_label_ = on; }

  bool valid_state(StateId s) const { return s >= 0 && static_cast<std::size_t>(s) < states_.size(); }

 private:
  std::vector<State> states_;
  StateId start_;
  StateId sink_;
  Alphabet alphabet_;
  std::vector<std::string> action_names_;
  std::vector<StateId> topo_;
  std::vector<std::size_t> action_offset_;
  bool include_start_label_ = false;
};

/// Alternating sequence s0 a0 s1 a1 ... . A path may end with either a
/// state or an action; `actions.size()` is `states.size() - 1` or equal to
/// `states.size()`.
struct Path {
  std::vector<StateId> states;
  std::vector<ActionId> actions;

  bool ends_in_action() const { return !states.empty() && actions.size() == states.size(); }
  StateId last_state() const { return states.back(); }
  bool operator==(const Path&) const = default;
};

bool is_complete(const Mdp& m, const Path& p);

struct PathReport {
  bool ok = true;
  /// Index into the alternating sequence of the first offending element.
  std::size_t index = 0;
  std::string message;
};

/// Checks the path invariants against m; never throws.
PathReport validate_path(const Mdp& m, const Path& p);

/// Colour sequence of the states visited after s0 (s0 included when the
/// MDP's include_start_label flag is set); the sink contributes nothing.
Word trace_of(const Mdp& m, const Path& p);

/// Probability of the environment transitions along p (policy excluded).
double dynamics_prob(const Mdp& m, const Path& p);

/// Every complete path with at most max_len actions. Throws LimitError when
/// more than `cap` paths exist (or cap == 0).
std::vector<Path> enumerate_complete_paths(const Mdp& m, std::size_t max_len, std::size_t cap = 100000);

}  // namespace diss
