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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "core/gridworld.hpp"
#include "core/search.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace diss {
namespace {

using testing::two_arm;

std::string jsonl(const RunTrace& t) {
  std::ostringstream os;
  write_trace_jsonl(os, t);
  return os.str();
}

TEST(Energy, BottomIsInfinite) {
  const auto f = two_arm();
  EnergyModel em(f.mdp, {f.a_arm}, 0.02, 0.75);
  EXPECT_EQ(em.evaluate(std::nullopt).energy, kInf);
}

TEST(Energy, ZeroThetaIsSurprisal) {
  const auto f = two_arm();
  EnergyModel em(f.mdp, {f.a_arm}, 0.0, 0.75);
  const TaskSpec t(f.accept_g, ReprClass::monolithic(f.mdp.alphabet()));
  const auto e = em.evaluate(t);
  const std::vector<Path> demos{f.a_arm};
  EXPECT_NEAR(e.energy, task_surprisal(f.mdp, t.dfa(), demos, 0.75).surprisal, 1e-9);
}

TEST(Energy, TwoArmByHand) {
  const auto f = two_arm();
  EnergyModel em(f.mdp, {f.a_arm}, 1.0 / 50, 0.75);
  const TaskSpec t(f.accept_g, ReprClass::monolithic(f.mdp.alphabet()));
  // 3 states, 5 non-loop edges: ceil(log2 4) + 3 + 2 + 5 * (2 + 2 + 2) = 37 bits.
  const double size = 37 * std::log(2.0);
  const auto e = em.evaluate(t);
  EXPECT_NEAR(e.size_term, size / 50, 1e-12);
  EXPECT_NEAR(e.surprisal, -std::log(0.75), 1e-6);
  EXPECT_NEAR(e.energy, size / 50 - std::log(0.75), 1e-6);
  EXPECT_NEAR(e.lambda, std::log(3.0), 1e-6);
  EXPECT_EQ(em.unique_evaluations(), 1u);
  em.evaluate(t);
  EXPECT_EQ(em.unique_evaluations(), 1u);
}

TEST(Energy, SoftminOverEnergiesIsThePosterior) {
  const auto b = testing::bundled();
  const double theta = 0.02;
  EnergyModel em(b.world.mdp(), b.demos, theta, 0.9);
  const auto repr = ReprClass::monolithic(color_alphabet());
  const std::vector<Dfa> pool{b.ground_truth, Dfa::constant(color_alphabet(), true),
                              parse_dfa(read_text_file(testing::data_path("reference.dfa")))};
  std::vector<double> u, prior, like;
  for (const auto& d : pool) {
    const TaskSpec t(d, repr);
    const auto e = em.evaluate(t);
    u.push_back(e.energy);
    prior.push_back(std::exp(-theta * t.size_nats()));
    like.push_back(std::exp(-e.surprisal));
  }
  const double lz = testing::oracle_lse([&] {
    std::vector<double> v;
    for (double x : u) v.push_back(-x);
    return v;
  }());
  double z = 0;
  for (std::size_t i = 0; i < pool.size(); ++i) z += prior[i] * like[i];
  for (std::size_t i = 0; i < pool.size(); ++i) EXPECT_NEAR(std::exp(-u[i] - lz), prior[i] * like[i] / z, 1e-9);
}

TEST(SaAccept, Extremes) {
  Rng rng(0);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_TRUE(sa_accept(1.0, 0.01, rng));
    EXPECT_FALSE(sa_accept(-kInf, 100.0, rng));
    EXPECT_TRUE(sa_accept(kInf, 1.0, rng));
  }
  EXPECT_THROW(sa_accept(1.0, 0.0, rng), DomainError);
}

TEST(SaAccept, HalfAtMinusTLn2) {
  Rng rng(42);
  const double T = 3.7;
  const int n = 10000;
  int acc = 0;
  for (int i = 0; i < n; ++i) acc += sa_accept(-T * std::log(2.0), T, rng);
  // Chi-square with one degree of freedom against p = 1/2.
  const double e = n / 2.0;
  const double chi2 = (acc - e) * (acc - e) / e + ((n - acc) - e) * ((n - acc) - e) / e;
  EXPECT_LT(chi2, 10.83);  // p = 0.001
  EXPECT_NEAR(acc / static_cast<double>(n), 0.5, 0.02);
}

TEST(Reset, SingleFiniteEntryIsCertain) {
  std::vector<HistoryEntry> h(3);
  h[1].energy = 12.0;
  Rng rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(reset_index(h, 2.0, rng), 1u);
  std::vector<HistoryEntry> none(2);
  EXPECT_FALSE(reset_index(none, 2.0, rng).has_value());
}

TEST(Reset, SoftminFrequencies) {
  const double T = 1.5;
  std::vector<HistoryEntry> h(2);
  h[0].energy = 10.0;
  h[1].energy = 10.0 + T * std::log(9.0);
  Rng rng(7);
  const int n = 10000;
  int first = 0;
  for (int i = 0; i < n; ++i) first += *reset_index(h, T, rng) == 0;
  const double sd = std::sqrt(0.9 * 0.1 / n);
  EXPECT_NEAR(first / static_cast<double>(n), 0.9, 3 * sd);
}

TEST(Reset, OnlyEveryKappaIterations) {
  const auto f = two_arm();
  EnergyModel em(f.mdp, {f.a_arm}, 0.02, 0.75);
  DissConfig cfg;
  cfg.kappa = 4;
  Rng a(1), b(2), c(3);
  StepContext ctx{em, ReprClass::monolithic(f.mdp.alphabet()), cfg, a, b, c};
  std::vector<HistoryEntry> h(1);
  h[0].energy = 1.0;
  for (std::size_t t = 0; t < 13; ++t) EXPECT_EQ(maybe_reset(t, h, ctx, 1.0).has_value(), t > 0 && t % 4 == 0) << t;
  cfg.kappa = 0;  // never
  for (std::size_t t = 0; t < 13; ++t) EXPECT_FALSE(maybe_reset(t, h, ctx, 1.0).has_value());
}

TEST(DissStep, ExhaustedSgsWithoutDropsKeepsExamples) {
  // Both arms are demonstrated, so nothing pivots and SGS always exhausts.
  const auto f = two_arm();
  EnergyModel em(f.mdp, {f.a_arm, f.b_arm}, 0.02, 0.75);
  DissConfig cfg;
  cfg.p_drop = 0.0;
  Rng a(1), b(2), c(3);
  StepContext ctx{em, ReprClass::monolithic(f.mdp.alphabet()), cfg, a, b, c};
  SaState z;
  z.examples = {{{1}, true, {}}, {{2}, false, {}}};
  std::vector<HistoryEntry> h;
  for (int i = 0; i < 5; ++i) {
    IterationRecord rec;
    const auto next = diss_step(z, ctx, h, rec, 1.0);
    EXPECT_FALSE(rec.has_sample);
    EXPECT_EQ(h.size(), static_cast<std::size_t>(i + 1));
    EXPECT_EQ(h.back().examples.size(), 2u);
    EXPECT_EQ(next.examples.size(), 2u);
    z = next;
  }
}

TEST(DissStep, DropAllEmptiesTheProposal) {
  const auto f = two_arm();
  EnergyModel em(f.mdp, {f.a_arm}, 0.02, 0.75);
  DissConfig cfg;
  cfg.p_drop = 1.0;
  Rng a(1), b(2), c(3);
  StepContext ctx{em, ReprClass::monolithic(f.mdp.alphabet()), cfg, a, b, c};
  SaState z;
  z.examples = {{{1}, true, {}}};
  std::vector<HistoryEntry> h;
  IterationRecord rec;
  const auto next = diss_step(z, ctx, h, rec, 1.0);
  EXPECT_TRUE(rec.accepted);  // anything beats no task
  EXPECT_TRUE(next.examples.empty());
  EXPECT_TRUE(h.back().examples.empty());
}

TEST(DissStep, CandidatesExplainTheBufferTheyCameFrom) {
  Rng rng(5);
  GridSpec g = testing::random_grid(rng, 3, 3, 3, 0.2, 3);
  Gridworld w(g);
  std::vector<Path> demos{testing::random_walk(w.mdp(), rng), testing::random_walk(w.mdp(), rng)};
  EnergyModel em(w.mdp(), demos, 0.02, 0.9);
  DissConfig cfg;
  cfg.p_drop = 0.1;
  cfg.max_candidates = 5;
  cfg.max_states = 4;
  Rng a(1), b(2), c(3);
  StepContext ctx{em, ReprClass::monolithic(color_alphabet()), cfg, a, b, c};
  SaState z;
  std::vector<HistoryEntry> h;
  int samples = 0;
  for (std::size_t t = 0; t < 25; ++t) {
    IterationRecord rec;
    const auto next = diss_step(z, ctx, h, rec, cfg.temperature(t));
    const auto& proposed = h.back();
    if (proposed.task) {
      EXPECT_TRUE(consistent(*proposed.task, z.examples));
      // Everything kept except the fresh sample agrees with the candidate;
      // the fresh sample contradicts it on purpose.
      for (const auto& x : proposed.examples) {
        const bool fresh = rec.has_sample && format_word(color_alphabet(), x.word) == rec.sampled_word;
        EXPECT_EQ(proposed.task->dfa().accepts(x.word) == x.label, !fresh);
      }
    }
    samples += rec.has_sample;
    EXPECT_EQ(next.energy, rec.accepted ? proposed.energy : z.energy);
    z = next;
  }
  EXPECT_GT(samples, 0);
}

TEST(RunDiss, DeterministicAndMonotone) {
  Rng rng(11);
  GridSpec g = testing::random_grid(rng, 3, 3, 3, 0.1, 3);
  Gridworld w(g);
  std::vector<Path> demos{testing::random_walk(w.mdp(), rng)};
  DissConfig cfg;
  cfg.max_iters = 20;
  cfg.kappa = 5;
  cfg.max_states = 4;
  cfg.seed = 3;
  const auto repr = ReprClass::monolithic(color_alphabet());
  const auto a = run_diss(w.mdp(), demos, repr, cfg);
  const auto b = run_diss(w.mdp(), demos, repr, cfg);
  EXPECT_EQ(jsonl(a), jsonl(b));
  ASSERT_EQ(a.records.size(), 20u);
  for (std::size_t i = 1; i < a.records.size(); ++i) EXPECT_LE(a.records[i].min_energy, a.records[i - 1].min_energy);
  EXPECT_EQ(a.records.back().min_energy, a.best_energy);
  for (std::size_t i = 0; i < a.records.size(); ++i)
    if (a.records[i].reset) {
      EXPECT_TRUE(i > 0 && i % 5 == 0) << i;
    }
  cfg.seed = 4;
  EXPECT_NE(jsonl(run_diss(w.mdp(), demos, repr, cfg)), jsonl(a));
}

TEST(RunDiss, GoldenTwoArmTrace) {
  const auto f = two_arm(0.1);
  DissConfig cfg;
  cfg.max_iters = 3;
  cfg.seed = 0;
  cfg.competency = 0.75;
  const std::vector<Path> demos{f.a_arm};
  const auto text = jsonl(run_diss(f.mdp, demos, ReprClass::monolithic(f.mdp.alphabet()), cfg));
  const auto golden = testing::data_path("../tests/golden/two_arm_seed0.jsonl");
  if (std::getenv("DISS_WRITE_GOLDEN")) std::ofstream(golden) << text;
  EXPECT_EQ(text, read_text_file(golden));
}

TEST(Baseline, SortedBySizeAndAcceptsDemos) {
  const auto b = testing::bundled();
  DissConfig cfg;
  const auto repr = ReprClass::monolithic(color_alphabet());
  const auto t = run_enumeration_baseline(b.world.mdp(), b.demos, repr, cfg, 12);
  ASSERT_EQ(t.records.size(), 12u);
  double prev_size = -1;
  for (std::size_t i = 0; i < t.records.size(); ++i) {
    const auto d = parse_dfa(t.records[i].candidate);
    for (const auto& demo : b.demos) EXPECT_TRUE(d.accepts(trace_of(b.world.mdp(), demo)));
    EXPECT_GE(size_nats_of(d), prev_size);
    prev_size = size_nats_of(d);
    if (i > 0) {
      EXPECT_LE(t.records[i].min_energy, t.records[i - 1].min_energy);
    }
  }
  const auto one = run_enumeration_baseline(b.world.mdp(), b.demos, repr, cfg, 1);
  ASSERT_EQ(one.records.size(), 1u);
  EXPECT_EQ(parse_dfa(one.records[0].candidate), Dfa::constant(color_alphabet(), true));
}

TEST(Trace, SummaryCsv) {
  const auto f = two_arm(0.1);
  DissConfig cfg;
  cfg.max_iters = 4;
  const std::vector<Path> demos{f.a_arm};
  const auto t = run_diss(f.mdp, demos, ReprClass::monolithic(f.mdp.alphabet()), cfg);
  std::ostringstream os;
  write_summary_csv(os, t);
  const auto s = os.str();
  EXPECT_EQ(s.rfind("iteration,energy,min_energy\n", 0), 0u);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 5);
}

}  // namespace
}  // namespace diss
