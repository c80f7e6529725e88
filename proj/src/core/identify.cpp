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

#include "core/identify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <tuple>

namespace diss {

namespace {

// Prefix trie of the labeled words (augmented prefix tree acceptor).
struct Trie {
  std::size_t k = 0;
  std::vector<int> child;            // [node * k + a]
  std::vector<std::int8_t> label;    // -1 unlabeled, 0 or 1

  explicit Trie(std::size_t symbols) : k(symbols) { add_node(); }

  int add_node() {
    child.insert(child.end(), k, -1);
    label.push_back(-1);
    return static_cast<int>(label.size()) - 1;
  }

  // False on a conflicting label.
  bool insert(const Word& w, bool l) {
    int cur = 0;
    for (Symbol a : w) {
      if (a < 0 || static_cast<std::size_t>(a) >= k) throw DomainError("example uses a symbol outside the alphabet");
      const auto idx = static_cast<std::size_t>(cur) * k + static_cast<std::size_t>(a);
      if (child[idx] < 0) {
        const int n = add_node();
        child[idx] = n;
      }
      cur = child[idx];
    }
    auto& slot = label[static_cast<std::size_t>(cur)];
    if (slot >= 0 && slot != static_cast<std::int8_t>(l)) return false;
    slot = static_cast<std::int8_t>(l);
    return true;
  }

  std::size_t size() const { return label.size(); }
};

struct BudgetExhausted {};

class Enumerator {
 public:
  Enumerator(const IdentifyQuery& q, const Trie& trie)
      : q_(q), trie_(trie), sigma_(q.repr->alphabet()), k_(sigma_.size()) {}

  IdentifyResult run() {
    IdentifyResult res;
    try {
      for (std::size_t n = 1; n <= q_.max_states && res.dfas.size() < q_.max_candidates; ++n) {
        if (n > 64) break;
        n_ = n;
        const std::uint64_t masks = n >= 64 ? 0 : (std::uint64_t{1} << n);
        // Within a state count: fewer non-self-loop edges first.
        for (std::size_t e = n - 1; e <= n * k_ && res.dfas.size() < q_.max_candidates; ++e) {
          edges_ = e;
          for (std::uint64_t mask = 0; mask < masks && res.dfas.size() < q_.max_candidates; ++mask) {
            // An automaton whose states all agree on acceptance collapses to one state.
            if (n > 1 && (mask == 0 || mask == masks - 1)) continue;
            acc_.assign(n, false);
            for (std::size_t s = 0; s < n; ++s) acc_[s] = (mask >> s) & 1U;
            std::vector<int> table(n * k_, -1);
            std::vector<int> witness = table;
            if (!feasible(witness)) continue;
            outer(table, 0, 0, 0, witness, res);
          }
        }
      }
      if (res.dfas.size() < q_.max_candidates) res.truncated = true;
    } catch (const BudgetExhausted&) {
      res.truncated = true;
    }
    return res;
  }

 private:
  void tick() {
    if (++nodes_ > q_.node_budget) throw BudgetExhausted{};
  }

  // Runs every trie node through the partial table. Returns -1 on a label
  // conflict, otherwise the table index of the first undefined transition
  // met in breadth-first order (or table size when none).
  long simulate(const std::vector<int>& table) {
    stack_.clear();
    stack_.emplace_back(0, 0);
    long first_undefined = static_cast<long>(table.size());
    std::size_t first_depth_rank = SIZE_MAX;
    for (std::size_t head = 0; head < stack_.size(); ++head) {
      const auto [node, state] = stack_[head];
      const auto l = trie_.label[static_cast<std::size_t>(node)];
      if (l >= 0 && static_cast<bool>(l) != acc_[static_cast<std::size_t>(state)]) return -1;
      for (std::size_t a = 0; a < k_; ++a) {
        const int c = trie_.child[static_cast<std::size_t>(node) * k_ + a];
        if (c < 0) continue;
        const auto idx = static_cast<std::size_t>(state) * k_ + a;
        const int t = table[idx];
        if (t < 0) {
          if (head < first_depth_rank) {
            first_depth_rank = head;
            first_undefined = static_cast<long>(idx);
          }
          continue;
        }
        stack_.emplace_back(c, t);
      }
    }
    return first_undefined;
  }

  // Completes `table` on the transitions the examples exercise, ignoring
  // canonical numbering. On success the completion is left in `table`.
  bool feasible(std::vector<int>& table) {
    tick();
    const long idx = simulate(table);
    if (idx < 0) return false;
    if (static_cast<std::size_t>(idx) == table.size()) return true;

    std::vector<bool> used(n_, false);
    used[0] = true;
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (table[i] >= 0) {
        used[i / k_] = true;
        used[static_cast<std::size_t>(table[i])] = true;
      }
    }
    used[static_cast<std::size_t>(idx) / k_] = true;
    // Unused states with the same acceptance are interchangeable.
    bool fresh_tried[2] = {false, false};
    for (std::size_t t = 0; t < n_; ++t) {
      if (!used[t]) {
        if (fresh_tried[acc_[t]]) continue;
        fresh_tried[acc_[t]] = true;
      }
      table[static_cast<std::size_t>(idx)] = static_cast<int>(t);
      if (feasible(table)) return true;
    }
    table[static_cast<std::size_t>(idx)] = -1;
    return false;
  }

  void outer(std::vector<int>& table, std::size_t pos, int max_used, std::size_t edges,
             const std::vector<int>& witness, IdentifyResult& res) {
    if (res.dfas.size() >= q_.max_candidates) return;
    tick();
    if (edges > edges_ || edges + (table.size() - pos) < edges_) return;
    if (pos == table.size()) {
      if (max_used != static_cast<int>(n_) - 1) return;
      emit(table, res);
      return;
    }
    const auto row = pos / k_;
    if (static_cast<int>(row) > max_used) return;  // state `row` can never be reached
    const int hi = std::min(max_used + 1, static_cast<int>(n_) - 1);
    for (int t = 0; t <= hi && res.dfas.size() < q_.max_candidates; ++t) {
      table[pos] = t;
      std::vector<int> next_witness;
      if (witness[pos] == t || witness[pos] < 0) {
        next_witness = witness;
        next_witness[pos] = t;
      } else {
        next_witness = table;
        if (!feasible(next_witness)) continue;
      }
      const bool loop = t == static_cast<int>(row);
      outer(table, pos + 1, std::max(max_used, t), edges + (loop ? 0 : 1), next_witness, res);
    }
    table[pos] = -1;
  }

  void emit(const std::vector<int>& table, IdentifyResult& res) {
    std::vector<Dfa::State> delta(table.begin(), table.end());
    Dfa d(sigma_, std::move(delta), acc_);
    if (!is_minimal(d)) return;
    if (!consistent(d, q_.examples)) return;
    if (!q_.repr->admits(d)) return;
    res.dfas.push_back(std::move(d));
  }

  const IdentifyQuery& q_;
  const Trie& trie_;
  Alphabet sigma_;
  std::size_t k_;
  std::size_t n_ = 0;
  std::size_t edges_ = 0;
  std::vector<bool> acc_;
  std::size_t nodes_ = 0;
  std::vector<std::pair<int, int>> stack_;
};

}  // namespace

IdentifyResult enumerate_consistent(const IdentifyQuery& q) {
  if (!q.repr) throw DomainError("identification needs a representation class");
  Trie trie(q.repr->alphabet().size());
  for (const auto& x : q.examples) {
    if (!trie.insert(x.word, x.label)) {
      IdentifyResult r;
      r.conflict = true;
      return r;
    }
  }
  for (const auto& w : q.repr->mandatory_positives()) {
    if (!trie.insert(w, true)) {
      IdentifyResult r;
      r.conflict = true;
      return r;
    }
  }
  Enumerator e(q, trie);
  return e.run();
}

double transition_distance_bits(const Dfa& from, const Dfa& to) {
  if (!(from.alphabet() == to.alphabet())) throw DomainError("DFAs are over different alphabets");
  const auto n = from.num_states(), m = to.num_states();
  const auto big = std::max(n, m);
  using Edge = std::tuple<std::size_t, std::size_t, int>;
  auto edges = [](const Dfa& d) {
    std::set<Edge> out;
    for (std::size_t q = 0; q < d.num_states(); ++q)
      for (std::size_t a = 0; a < d.num_symbols(); ++a) {
        const auto t = d.next(static_cast<Dfa::State>(q), static_cast<Symbol>(a));
        if (static_cast<std::size_t>(t) != q) out.emplace(q, a, t);
      }
    return out;
  };
  const auto ea = edges(from), eb = edges(to);
  std::size_t diff = 0;
  for (const auto& e : ea) diff += eb.count(e) ? 0 : 1;
  for (const auto& e : eb) diff += ea.count(e) ? 0 : 1;
  const double node_bits = static_cast<double>(n > m ? n - m : m - n) * ceil_log2(big);
  return node_bits + static_cast<double>(diff) * edge_bits(big, from.num_symbols());
}

std::vector<double> candidate_log_weights(const std::vector<Dfa>& candidates, const ReprClass& repr,
                                          const Dfa* reference) {
  std::vector<double> w;
  w.reserve(candidates.size());
  for (const auto& d : candidates) {
    const Dfa c = minimize(d);
    if (reference)
      w.push_back(-transition_distance_bits(*reference, c) * std::numbers::ln2);
    else
      w.push_back(-(size_nats_of(c) - repr.reference_size_nats()));
  }
  return w;
}

MaybeTask sample_candidate(const IdentifyQuery& q, const MaybeTask& reference, Rng& rng) {
  const auto res = enumerate_consistent(q);
  if (res.dfas.empty()) return std::nullopt;
  const auto logw = candidate_log_weights(res.dfas, *q.repr, reference ? &reference->dfa() : nullptr);
  const double hi = *std::max_element(logw.begin(), logw.end());
  std::vector<double> w(logw.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(logw[i] - hi);
  return TaskSpec(res.dfas[rng.categorical(w)], q.repr);
}

}  // namespace diss
