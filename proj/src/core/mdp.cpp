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

#include "core/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace diss {

Alphabet::Alphabet(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw DomainError("alphabet must be nonempty");
  for (std::size_t i = 0; i < names_.size(); ++i)
    for (std::size_t j = i + 1; j < names_.size(); ++j)
      if (names_[i] == names_[j]) throw DomainError("duplicate alphabet symbol '" + names_[i] + "'");
}

std::optional<Symbol> Alphabet::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<Symbol>(i);
  return std::nullopt;
}

Symbol Alphabet::index(std::string_view name) const {
  if (auto s = find(name)) return *s;
  throw DomainError("symbol '" + std::string(name) + "' is not in the alphabet");
}

const Alphabet& color_alphabet() {
  static const Alphabet sigma({"r", "b", "y", "n", "_"});
  return sigma;
}

Mdp::Mdp(std::vector<State> states, StateId start, StateId sink, Alphabet alphabet,
         std::vector<std::string> action_names)
    : states_(std::move(states)),
      start_(start),
      sink_(sink),
      alphabet_(std::move(alphabet)),
      action_names_(std::move(action_names)) {
  const auto n = states_.size();
  if (!valid_state(start_) || !valid_state(sink_)) throw DomainError("start or sink out of range");

  action_offset_.assign(n + 1, 0);
  for (std::size_t s = 0; s < n; ++s) {
    const auto& st = states_[s];
    if (st.rows.empty()) throw DomainError("state " + std::to_string(s) + " has no actions");
    if (st.label < 0 || static_cast<std::size_t>(st.label) >= alphabet_.size())
      throw DomainError("state " + std::to_string(s) + " has a label outside the alphabet");
    for (std::size_t i = 0; i < st.rows.size(); ++i) {
      const auto& row = st.rows[i];
      if (row.action < 0 || static_cast<std::size_t>(row.action) >= action_names_.size())
        throw DomainError("unknown action id in state " + std::to_string(s));
      for (std::size_t j = 0; j < i; ++j)
        if (st.rows[j].action == row.action)
          throw DomainError("duplicate action in state " + std::to_string(s));
      double total = 0.0;
      for (const auto& o : row.outcomes) {
        if (!valid_state(o.next)) throw DomainError("successor out of range");
        if (!(o.prob > 0.0)) throw DomainError("outcome probabilities must be positive");
        total += o.prob;
      }
      if (std::abs(total - 1.0) > 1e-12)
        throw DomainError("transition distribution of state " + std::to_string(s) + " does not sum to 1");
      if (static_cast<StateId>(s) == sink_) {
        if (row.outcomes.size() != 1 || row.outcomes[0].next != sink_)
          throw DomainError("the sink must be absorbing");
      }
    }
    action_offset_[s + 1] = action_offset_[s] + st.rows.size();
  }

  // Kahn's algorithm over the non-sink states; any leftover is a cycle.
  std::vector<int> indeg(n, 0);
  for (std::size_t s = 0; s < n; ++s) {
    if (static_cast<StateId>(s) == sink_) continue;
    for (const auto& row : states_[s].rows)
      for (const auto& o : row.outcomes)
        if (o.next != sink_) ++indeg[static_cast<std::size_t>(o.next)];
  }
  std::vector<StateId> queue;
  for (std::size_t s = 0; s < n; ++s)
    if (static_cast<StateId>(s) != sink_ && indeg[s] == 0) queue.push_back(static_cast<StateId>(s));
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const StateId s = queue[head];
    topo_.push_back(s);
    for (const auto& row : states_[static_cast<std::size_t>(s)].rows)
      for (const auto& o : row.outcomes)
        if (o.next != sink_ && --indeg[static_cast<std::size_t>(o.next)] == 0) queue.push_back(o.next);
  }
  if (topo_.size() + 1 != n)
    throw DomainError("MDP has a cycle outside the sink; the horizon must be part of the state");
}

std::optional<std::size_t> Mdp::action_index(StateId s, ActionId a) const {
  const auto r = rows(s);
  for (std::size_t i = 0; i < r.size(); ++i)
    if (r[i].action == a) return i;
  return std::nullopt;
}

std::span<const Outcome> Mdp::transition_dist(StateId s, ActionId a) const {
  if (!valid_state(s)) throw DomainError("unknown state " + std::to_string(s));
  const auto i = action_index(s, a);
  if (!i) throw DomainError("action " + std::to_string(a) + " is not available in state " + std::to_string(s));
  return rows(s)[*i].outcomes;
}

double Mdp::transition_prob(StateId s, ActionId a, StateId next) const {
  for (const auto& o : transition_dist(s, a))
    if (o.next == next) return o.prob;
  return 0.0;
}

std::optional<ActionId> Mdp::find_action(std::string_view name) const {
  for (std::size_t i = 0; i < action_names_.size(); ++i)
    if (action_names_[i] == name) return static_cast<ActionId>(i);
  return std::nullopt;
}

bool is_complete(const Mdp& m, const Path& p) {
  return !p.states.empty() && !p.ends_in_action() && p.states.back() == m.sink();
}

PathReport validate_path(const Mdp& m, const Path& p) {
  auto fail = [](std::size_t idx, std::string msg) { return PathReport{false, idx, std::move(msg)}; };
  if (p.states.empty()) return fail(0, "path is empty");
  if (p.actions.size() + 1 != p.states.size() && p.actions.size() != p.states.size())
    return fail(0, "states and actions do not alternate");
  if (p.states[0] != m.start()) return fail(0, "path does not start at s0");
  for (std::size_t i = 0; i < p.actions.size(); ++i) {
    const StateId s = p.states[i];
    if (!m.valid_state(s)) return fail(2 * i, "unknown state");
    if (s == m.sink()) return fail(2 * i + 1, "path continues past the sink");
    const auto idx = m.action_index(s, p.actions[i]);
    if (!idx) return fail(2 * i + 1, "action not available in state");
    if (i + 1 < p.states.size()) {
      const StateId next = p.states[i + 1];
      if (!m.valid_state(next)) return fail(2 * i + 2, "unknown state");
      double prob = 0.0;
      for (const auto& o : m.rows(s)[*idx].outcomes)
        if (o.next == next) prob = o.prob;
      if (prob <= 0.0) return fail(2 * i + 2, "zero-probability transition");
    }
  }
  return {};
}

Word trace_of(const Mdp& m, const Path& p) {
  Word w;
  for (std::size_t i = 0; i < p.states.size(); ++i) {
    if (i == 0 && !m.include_start_label()) continue;
    if (p.states[i] == m.sink()) continue;
    w.push_back(m.label(p.states[i]));
  }
  return w;
}

double dynamics_prob(const Mdp& m, const Path& p) {
  double prob = 1.0;
  for (std::size_t i = 0; i + 1 < p.states.size(); ++i)
    prob *= m.transition_prob(p.states[i], p.actions[i], p.states[i + 1]);
  return prob;
}

namespace {

void enumerate_from(const Mdp& m, Path& cur, std::size_t max_len, std::size_t cap, std::vector<Path>& out) {
  const StateId s = cur.states.back();
  if (s == m.sink()) {
    if (out.size() >= cap) throw LimitError("path enumeration exceeds the cap of " + std::to_string(cap));
    out.push_back(cur);
    return;
  }
  if (cur.actions.size() >= max_len) return;
  for (const auto& row : m.rows(s)) {
    cur.actions.push_back(row.action);
    for (const auto& o : row.outcomes) {
      cur.states.push_back(o.next);
      enumerate_from(m, cur, max_len, cap, out);
      cur.states.pop_back();
    }
    cur.actions.pop_back();
  }
}

}  // namespace

std::vector<Path> enumerate_complete_paths(const Mdp& m, std::size_t max_len, std::size_t cap) {
  if (cap == 0) throw LimitError("path enumeration cap is zero");
  std::vector<Path> out;
  Path cur;
  cur.states.push_back(m.start());
  enumerate_from(m, cur, max_len, cap, out);
  return out;
}

}  // namespace diss
