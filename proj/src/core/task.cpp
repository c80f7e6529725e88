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

#include "core/task.hpp"

#include <map>

namespace diss {

std::shared_ptr<const ReprClass> ReprClass::monolithic(Alphabet sigma) {
  auto c = std::shared_ptr<ReprClass>(new ReprClass());
  c->sigma_ = std::move(sigma);
  return c;
}

std::shared_ptr<const ReprClass> ReprClass::incremental(Dfa reference, std::vector<Word> mandatory_positives) {
  auto c = std::shared_ptr<ReprClass>(new ReprClass());
  c->sigma_ = reference.alphabet();
  c->reference_ = minimize(reference);
  for (const auto& w : mandatory_positives)
    if (!c->reference_->accepts(w)) throw DomainError("a mandatory positive is rejected by the reference task");
  c->mandatory_ = std::move(mandatory_positives);
  c->reference_size_nats_ = size_nats_of(*c->reference_);
  return c;
}

bool ReprClass::admits(const Dfa& d) const {
  if (!(d.alphabet() == sigma_)) return false;
  if (!reference_) return true;
  for (const auto& w : mandatory_)
    if (!d.accepts(w)) return false;
  return language_subset(d, *reference_);
}

TaskSpec::TaskSpec(const Dfa& d, ReprClassPtr cls) : dfa_(minimize(d)), cls_(std::move(cls)) {
  if (!cls_) throw DomainError("task needs a representation class");
  if (!cls_->admits(dfa_)) throw DomainError("DFA is not admitted by the representation class");
  size_nats_ = size_nats_of(dfa_) - cls_->reference_size_nats();
  key_ = dfa_.key();
}

bool path_in_task(const TaskSpec& t, const Path& p, const Mdp& m) {
  if (!is_complete(m, p)) throw DomainError("membership is only defined for complete paths");
  return t.dfa().accepts(trace_of(m, p));
}

bool consistent(const Dfa& d, const std::vector<LabeledExample>& xs) {
  for (const auto& x : xs)
    if (d.accepts(x.word) != x.label) return false;
  return true;
}

bool consistent(const TaskSpec& t, const std::vector<LabeledExample>& xs) {
  return consistent(t.dfa(), xs) && t.repr().admits(t.dfa());
}

bool has_conflict(const std::vector<LabeledExample>& xs) {
  std::map<Word, bool> seen;
  for (const auto& x : xs) {
    auto [it, inserted] = seen.try_emplace(x.word, x.label);
    if (!inserted && it->second != x.label) return true;
  }
  return false;
}

}  // namespace diss
