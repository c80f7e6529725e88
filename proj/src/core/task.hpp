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

#include <memory>
#include <optional>
#include <vector>

#include "core/dfa.hpp"
#include "core/mdp.hpp"

namespace diss {

/// Representation class of candidate tasks. Monolithic admits every
/// minimal DFA; Incremental admits only DFAs whose language contains the
/// mandatory positives and is contained in the reference language.
class ReprClass {
 public:
  static std::shared_ptr<const ReprClass> monolithic(Alphabet sigma);
  static std::shared_ptr<const ReprClass> incremental(Dfa reference, std::vector<Word> mandatory_positives);

  bool is_incremental() const { return reference_.has_value(); }
  const Alphabet& alphabet() const { return sigma_; }
  /// Only valid for the incremental class.
  const Dfa& reference() const { return *reference_; }
  const std::vector<Word>& mandatory_positives() const { return mandatory_; }
  /// size' of the reference (0 for the monolithic class).
  double reference_size_nats() const { return reference_size_nats_; }

  /// Whether a DFA (any form) belongs to the class.
  bool admits(const Dfa& d) const;

 private:
  ReprClass() = default;

  Alphabet sigma_;
  std::optional<Dfa> reference_;
  std::vector<Word> mandatory_;
  double reference_size_nats_ = 0.0;
};

using ReprClassPtr = std::shared_ptr<const ReprClass>;

/// A task specification: a canonical minimal DFA in some representation
/// class.
class TaskSpec {
 public:
  /// Minimizes d. Throws DomainError when d is not admitted by the class.
  TaskSpec(const Dfa& d, ReprClassPtr cls);

  const Dfa& dfa() const { return dfa_; }
  const ReprClass& repr() const { return *cls_; }
  const ReprClassPtr& repr_ptr() const { return cls_; }

  /// size'(dfa) in nats, minus size'(reference) for the incremental class.
  double size_nats() const { return size_nats_; }
  /// Canonical key: equal keys mean equal languages.
  const std::string& key() const { return key_; }

 private:
  Dfa dfa_;
  ReprClassPtr cls_;
  double size_nats_;
  std::string key_;
};

/// nullopt is the distinguished "no task" value.
using MaybeTask = std::optional<TaskSpec>;

struct LabeledExample {
  Word word;
  bool label = false;
  std::optional<Path> provenance;
};

/// Membership of a complete path; throws DomainError for incomplete paths.
bool path_in_task(const TaskSpec& t, const Path& p, const Mdp& m);

bool consistent(const TaskSpec& t, const std::vector<LabeledExample>& xs);
bool consistent(const Dfa& d, const std::vector<LabeledExample>& xs);

/// True when some word carries both labels.
bool has_conflict(const std::vector<LabeledExample>& xs);

}  // namespace diss
