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

#include "core/dfa.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <map>
#include <numbers>
#include <sstream>

namespace diss {

Dfa::Dfa(Alphabet sigma, std::vector<State> delta, std::vector<bool> accepting)
    : sigma_(std::move(sigma)), delta_(std::move(delta)), accepting_(std::move(accepting)) {
  const auto n = accepting_.size();
  if (n == 0) throw DomainError("a DFA needs at least one state");
  if (delta_.size() != n * sigma_.size()) throw DomainError("transition table has the wrong size");
  for (State t : delta_)
    if (t < 0 || static_cast<std::size_t>(t) >= n) throw DomainError("transition target out of range");
}

Dfa::State Dfa::run(const Word& w, State from) const {
  State q = from;
  for (Symbol a : w) {
    if (a < 0 || static_cast<std::size_t>(a) >= sigma_.size())
      throw DomainError("symbol " + std::to_string(a) + " is not in the alphabet");
    q = next(q, a);
  }
  return q;
}

std::size_t Dfa::num_edges() const {
  std::size_t e = 0;
  const auto k = sigma_.size();
  for (std::size_t i = 0; i < delta_.size(); ++i)
    if (static_cast<std::size_t>(delta_[i]) != i / k) ++e;
  return e;
}

std::uint64_t Dfa::accept_mask() const {
  if (num_states() > 64) throw DomainError("accepting mask needs at most 64 states");
  std::uint64_t m = 0;
  for (std::size_t q = 0; q < num_states(); ++q)
    if (accepting_[q]) m |= (std::uint64_t{1} << q);
  return m;
}

std::string Dfa::key() const {
  std::string k = std::to_string(num_states()) + ":";
  for (bool b : accepting_) k += b ? '1' : '0';
  k += ':';
  for (State t : delta_) {
    k += std::to_string(t);
    k += ',';
  }
  return k;
}

Dfa Dfa::constant(const Alphabet& sigma, bool accept) {
  return Dfa(sigma, std::vector<State>(sigma.size(), 0), {accept});
}

Dfa canonical_numbering(const Dfa& d) {
  const auto k = d.num_symbols();
  std::vector<Dfa::State> order{0};
  std::vector<Dfa::State> rename(d.num_states(), -1);
  rename[0] = 0;
  for (std::size_t head = 0; head < order.size(); ++head) {
    const auto q = order[head];
    for (std::size_t a = 0; a < k; ++a) {
      const auto t = d.next(q, static_cast<Symbol>(a));
      if (rename[static_cast<std::size_t>(t)] < 0) {
        rename[static_cast<std::size_t>(t)] = static_cast<Dfa::State>(order.size());
        order.push_back(t);
      }
    }
  }
  std::vector<Dfa::State> delta(order.size() * k);
  std::vector<bool> acc(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    acc[i] = d.is_accepting(order[i]);
    for (std::size_t a = 0; a < k; ++a)
      delta[i * k + a] = rename[static_cast<std::size_t>(d.next(order[i], static_cast<Symbol>(a)))];
  }
  return Dfa(d.alphabet(), std::move(delta), std::move(acc));
}

namespace {

// Moore refinement; returns the class of each state and the class count.
std::pair<std::vector<int>, int> equivalence_classes(const Dfa& d) {
  const auto n = d.num_states();
  const auto k = d.num_symbols();
  std::vector<int> cls(n);
  int count = 0;
  {
    bool seen[2] = {false, false};
    for (std::size_t q = 0; q < n; ++q) seen[d.is_accepting(static_cast<Dfa::State>(q))] = true;
    count = seen[0] + seen[1];
    const bool two = count == 2;
    for (std::size_t q = 0; q < n; ++q) cls[q] = two ? (d.is_accepting(static_cast<Dfa::State>(q)) ? 1 : 0) : 0;
  }
  while (true) {
    std::map<std::vector<int>, int> ids;
    std::vector<int> next(n);
    std::vector<int> sig(k + 1);
    for (std::size_t q = 0; q < n; ++q) {
      sig[0] = cls[q];
      for (std::size_t a = 0; a < k; ++a)
        sig[a + 1] = cls[static_cast<std::size_t>(d.next(static_cast<Dfa::State>(q), static_cast<Symbol>(a)))];
      auto [it, inserted] = ids.try_emplace(sig, static_cast<int>(ids.size()));
      next[q] = it->second;
    }
    const int new_count = static_cast<int>(ids.size());
    cls = std::move(next);
    if (new_count == count) break;
    count = new_count;
  }
  return {cls, count};
}

}  // namespace

Dfa minimize(const Dfa& d) {
  const Dfa reach = canonical_numbering(d);
  const auto [cls, count] = equivalence_classes(reach);
  const auto k = reach.num_symbols();
  std::vector<Dfa::State> delta(static_cast<std::size_t>(count) * k);
  std::vector<bool> acc(static_cast<std::size_t>(count));
  for (std::size_t q = 0; q < reach.num_states(); ++q) {
    const auto c = static_cast<std::size_t>(cls[q]);
    acc[c] = reach.is_accepting(static_cast<Dfa::State>(q));
    for (std::size_t a = 0; a < k; ++a)
      delta[c * k + a] = cls[static_cast<std::size_t>(reach.next(static_cast<Dfa::State>(q), static_cast<Symbol>(a)))];
  }
  // Class ids are not rooted at the start state; renumber.
  std::vector<Dfa::State> rooted(delta.size());
  Dfa quotient(reach.alphabet(), std::move(delta), std::move(acc));
  if (cls[0] != 0) {
    // Swap class 0 and the start class so state 0 is the start.
    const auto s = cls[0];
    std::vector<Dfa::State> perm(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) perm[static_cast<std::size_t>(i)] = i;
    std::swap(perm[0], perm[static_cast<std::size_t>(s)]);
    std::vector<bool> acc2(static_cast<std::size_t>(count));
    for (int c = 0; c < count; ++c) {
      acc2[static_cast<std::size_t>(perm[static_cast<std::size_t>(c)])] = quotient.is_accepting(c);
      for (std::size_t a = 0; a < k; ++a)
        rooted[static_cast<std::size_t>(perm[static_cast<std::size_t>(c)]) * k + a] =
            perm[static_cast<std::size_t>(quotient.next(c, static_cast<Symbol>(a)))];
    }
    quotient = Dfa(reach.alphabet(), std::move(rooted), std::move(acc2));
  }
  return canonical_numbering(quotient);
}

bool is_minimal(const Dfa& d) {
  const Dfa reach = canonical_numbering(d);
  return equivalence_classes(reach).second == static_cast<int>(reach.num_states());
}

std::optional<Word> subset_counterexample(const Dfa& a, const Dfa& b) {
  if (!(a.alphabet() == b.alphabet())) throw DomainError("DFAs are over different alphabets");
  const auto nb = b.num_states();
  const auto k = a.num_symbols();
  auto id = [nb](Dfa::State x, Dfa::State y) { return static_cast<std::size_t>(x) * nb + static_cast<std::size_t>(y); };
  std::vector<std::int64_t> parent(a.num_states() * nb, -2);
  std::vector<Symbol> via(parent.size(), -1);
  std::deque<std::pair<Dfa::State, Dfa::State>> queue{{0, 0}};
  parent[id(0, 0)] = -1;
  while (!queue.empty()) {
    const auto [x, y] = queue.front();
    queue.pop_front();
    if (a.is_accepting(x) && !b.is_accepting(y)) {
      Word w;
      for (std::int64_t cur = static_cast<std::int64_t>(id(x, y)); parent[static_cast<std::size_t>(cur)] >= 0;
           cur = parent[static_cast<std::size_t>(cur)])
        w.push_back(via[static_cast<std::size_t>(cur)]);
      std::reverse(w.begin(), w.end());
      return w;
    }
    for (std::size_t s = 0; s < k; ++s) {
      const auto nx = a.next(x, static_cast<Symbol>(s));
      const auto ny = b.next(y, static_cast<Symbol>(s));
      const auto nid = id(nx, ny);
      if (parent[nid] != -2) continue;
      parent[nid] = static_cast<std::int64_t>(id(x, y));
      via[nid] = static_cast<Symbol>(s);
      queue.emplace_back(nx, ny);
    }
  }
  return std::nullopt;
}

bool language_subset(const Dfa& a, const Dfa& b) { return !subset_counterexample(a, b).has_value(); }

bool language_equal(const Dfa& a, const Dfa& b) { return language_subset(a, b) && language_subset(b, a); }

int edge_bits(std::size_t n_states, std::size_t n_symbols) {
  const int state_bits = ceil_log2(n_states);
  return 2 * state_bits + ceil_log2(n_symbols);
}

double size_bits(const Dfa& d) {
  const auto n = d.num_states();
  if (n == 0) throw DomainError("size of an empty DFA");
  const double e = static_cast<double>(d.num_edges());
  return ceil_log2(n + 1) + static_cast<double>(n) + ceil_log2(n) + e * edge_bits(n, d.num_symbols());
}

double size_nats_of(const Dfa& d) { return size_bits(d) * std::numbers::ln2; }

std::string to_text(const Dfa& d) {
  std::ostringstream out;
  out << "n=" << d.num_states() << "; sigma=";
  for (std::size_t a = 0; a < d.num_symbols(); ++a) out << (a ? "," : "") << d.alphabet().name(static_cast<Symbol>(a));
  out << "; accept=" << d.accept_mask() << "; edges=";
  bool first = true;
  for (std::size_t q = 0; q < d.num_states(); ++q) {
    for (std::size_t a = 0; a < d.num_symbols(); ++a) {
      const auto t = d.next(static_cast<Dfa::State>(q), static_cast<Symbol>(a));
      if (static_cast<std::size_t>(t) == q) continue;
      out << (first ? "" : " ") << q << "," << d.alphabet().name(static_cast<Symbol>(a)) << "->" << t;
      first = false;
    }
  }
  return out.str();
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_number(std::string_view s, std::string_view what) {
  s = trim(s);
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError("bad " + std::string(what) + " '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

Dfa parse_dfa(std::string_view text) {
  std::optional<std::size_t> n;
  std::optional<Alphabet> sigma;
  std::optional<std::uint64_t> mask;
  std::string_view edges;
  // Fields are ';' or newline separated; '#' starts a comment line.
  std::string flat;
  for (auto line : split(text, '\n')) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    flat += std::string(line) + ";";
  }
  std::vector<std::string> fields;
  for (auto f : split(flat, ';')) {
    f = trim(f);
    if (!f.empty()) fields.emplace_back(f);
  }
  std::string edges_buf;
  for (const auto& f : fields) {
    const auto eq = f.find('=');
    if (eq == std::string::npos) throw ParseError("DFA field without '=': '" + f + "'");
    const auto key = trim(std::string_view(f).substr(0, eq));
    const auto value = trim(std::string_view(f).substr(eq + 1));
    if (key == "n") {
      n = parse_number<std::size_t>(value, "state count");
    } else if (key == "sigma") {
      std::vector<std::string> names;
      for (auto s : split(value, ',')) names.emplace_back(trim(s));
      try {
        sigma = Alphabet(std::move(names));
      } catch (const DomainError& e) {
        throw ParseError(e.what());
      }
    } else if (key == "accept") {
      mask = parse_number<std::uint64_t>(value, "accept mask");
    } else if (key == "edges") {
      edges_buf += std::string(value) + " ";
    } else {
      throw ParseError("unknown DFA field '" + std::string(key) + "'");
    }
  }
  edges = edges_buf;
  if (!n || !sigma || !mask) throw ParseError("DFA text needs n, sigma and accept");
  if (*n == 0 || *n > 64) throw ParseError("state count must be in [1, 64]");
  if (*n < 64 && (*mask >> *n) != 0) throw ParseError("accept mask names states beyond n");
  const auto k = sigma->size();
  std::vector<Dfa::State> delta(*n * k);
  for (std::size_t q = 0; q < *n; ++q)
    for (std::size_t a = 0; a < k; ++a) delta[q * k + a] = static_cast<Dfa::State>(q);
  std::vector<bool> seen(delta.size(), false);
  std::istringstream in{std::string(edges)};
  std::string tok;
  while (in >> tok) {
    const auto arrow = tok.find("->");
    const auto comma = tok.find(',');
    if (arrow == std::string::npos || comma == std::string::npos || comma > arrow)
      throw ParseError("bad edge '" + tok + "', expected q,a->q'");
    const auto q = parse_number<std::size_t>(std::string_view(tok).substr(0, comma), "edge source");
    const auto sym = std::string_view(tok).substr(comma + 1, arrow - comma - 1);
    const auto t = parse_number<std::size_t>(std::string_view(tok).substr(arrow + 2), "edge target");
    if (q >= *n || t >= *n) throw ParseError("edge '" + tok + "' names a state beyond n");
    const auto a = sigma->find(sym);
    if (!a) throw ParseError("edge '" + tok + "' uses a symbol outside sigma");
    const auto idx = q * k + static_cast<std::size_t>(*a);
    if (seen[idx]) throw ParseError("duplicate edge for state " + std::to_string(q));
    seen[idx] = true;
    delta[idx] = static_cast<Dfa::State>(t);
  }
  std::vector<bool> acc(*n);
  for (std::size_t q = 0; q < *n; ++q) acc[q] = (*mask >> q) & 1U;
  return Dfa(std::move(*sigma), std::move(delta), std::move(acc));
}

std::string to_dot(const Dfa& d, std::string_view name) {
  std::ostringstream out;
  out << "digraph " << name << " {\n  rankdir=LR;\n  __start [shape=point];\n";
  for (std::size_t q = 0; q < d.num_states(); ++q)
    out << "  q" << q << " [shape=" << (d.is_accepting(static_cast<Dfa::State>(q)) ? "doublecircle" : "circle")
        << ", label=\"" << q << "\"];\n";
  out << "  __start -> q0;\n";
  std::map<std::pair<std::size_t, Dfa::State>, std::string> labels;
  for (std::size_t q = 0; q < d.num_states(); ++q) {
    for (std::size_t a = 0; a < d.num_symbols(); ++a) {
      const auto t = d.next(static_cast<Dfa::State>(q), static_cast<Symbol>(a));
      if (static_cast<std::size_t>(t) == q) continue;
      auto& l = labels[{q, t}];
      if (!l.empty()) l += ",";
      l += d.alphabet().name(static_cast<Symbol>(a));
    }
  }
  for (const auto& [edge, label] : labels)
    out << "  q" << edge.first << " -> q" << edge.second << " [label=\"" << label << "\"];\n";
  out << "}\n";
  return out.str();
}

Word parse_word(const Alphabet& sigma, std::string_view text) {
  Word w;
  text = trim(text);
  if (text.empty()) return w;
  for (auto s : split(text, ',')) w.push_back(sigma.index(trim(s)));
  return w;
}

std::string format_word(const Alphabet& sigma, const Word& w) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ',';
    out += sigma.name(w[i]);
  }
  return out;
}

}  // namespace diss
