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

#include "core/search.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

namespace diss {

EnergyModel::EnergyModel(const Mdp& m, std::vector<Path> demos, double theta, double competency,
                         CalibrationOptions opts)
    : mdp_(&m), demos_(std::move(demos)), tree_(demos_, m), theta_(theta), competency_(competency), opts_(opts) {}

EnergyRecord EnergyModel::evaluate(const MaybeTask& t) {
  if (!t) return {};
  if (auto it = memo_.find(t->key()); it != memo_.end()) return it->second;
  const auto ev = task_surprisal(*mdp_, t->dfa(), demos_, competency_, nullptr, opts_);
  EnergyRecord r;
  r.surprisal = ev.surprisal;
  r.size_term = theta_ * t->size_nats();
  r.energy = r.size_term + r.surprisal;
  r.lambda = ev.calibration.lambda;
  r.boundary = ev.calibration.boundary;
  memo_.emplace(t->key(), r);
  return r;
}

bool sa_accept(double dU, double T, Rng& rng) {
  if (!(T > 0.0)) throw DomainError("temperature must be positive");
  if (std::isnan(dU)) return true;  // both energies infinite
  if (dU > 0.0) return true;
  if (dU == -kInf) return false;
  return rng.uniform() < std::exp(dU / T);
}

namespace {

IdentifyQuery make_query(const std::vector<LabeledExample>& xs, const ReprClassPtr& repr, const DissConfig& cfg) {
  IdentifyQuery q;
  q.examples = xs;
  q.repr = repr;
  q.max_candidates = cfg.max_candidates;
  q.max_states = cfg.max_states;
  q.node_budget = cfg.node_budget;
  return q;
}

}  // namespace

SaState diss_step(const SaState& z, StepContext& ctx, std::vector<HistoryEntry>& history, IterationRecord& rec,
                  double temperature) {
  const auto& cfg = ctx.cfg;
  rec.temperature = temperature;
  MaybeTask phi = sample_candidate(make_query(z.examples, ctx.repr, cfg), z.task, ctx.id_rng);
  const EnergyRecord er = ctx.model.evaluate(phi);
  rec.candidate_energy = er;
  if (phi) {
    rec.candidate = to_text(phi->dfa());
    rec.candidate_states = phi->dfa().num_states();
  }

  auto xs = z.examples;
  if (phi) {
    const MaxEntPolicy pol(ctx.model.mdp(), phi->dfa(), er.lambda);
    if (auto r = sgs_sample(*phi, pol, z.examples, ctx.model.tree(), cfg.sgs, ctx.sgs_rng)) {
      std::erase_if(xs, [&](const LabeledExample& x) { return x.word == r->example.word; });
      rec.pivot = r->pivot;
      rec.gradient = r->gradient;
      rec.has_sample = true;
      rec.sampled_word = format_word(ctx.repr->alphabet(), r->example.word);
      rec.sampled_label = r->example.label;
      xs.push_back(std::move(r->example));
    }
  }
  std::vector<LabeledExample> kept;
  kept.reserve(xs.size());
  for (auto& x : xs)
    if (!ctx.sa_rng.bernoulli(cfg.p_drop)) kept.push_back(std::move(x));

  history.push_back({kept, phi, er.energy});
  rec.accepted = sa_accept(z.energy - er.energy, temperature, ctx.sa_rng);
  if (!rec.accepted) return z;
  return SaState{std::move(kept), std::move(phi), er.energy};
}

std::optional<std::size_t> reset_index(std::span<const HistoryEntry> history, double temperature, Rng& rng) {
  double lo = kInf;
  for (const auto& h : history) lo = std::min(lo, h.energy);
  if (!std::isfinite(lo)) return std::nullopt;
  std::vector<double> w(history.size(), 0.0);
  for (std::size_t i = 0; i < history.size(); ++i)
    if (std::isfinite(history[i].energy)) w[i] = std::exp(-(history[i].energy - lo) / temperature);
  return rng.categorical(w);
}

std::optional<SaState> maybe_reset(std::size_t t, std::span<const HistoryEntry> history, StepContext& ctx,
                                   double temperature) {
  const auto& cfg = ctx.cfg;
  if (cfg.kappa == 0 || t == 0 || t % cfg.kappa != 0) return std::nullopt;
  const auto i = reset_index(history, cfg.reset_temp.value_or(temperature), ctx.sa_rng);
  if (!i) return std::nullopt;
  SaState z;
  z.examples = history[*i].examples;
  z.task = sample_candidate(make_query(z.examples, ctx.repr, cfg), std::nullopt, ctx.id_rng);
  z.energy = ctx.model.evaluate(z.task).energy;
  return z;
}

RunTrace run_diss(const Mdp& m, std::span<const Path> demos, ReprClassPtr repr, const DissConfig& cfg) {
  EnergyModel model(m, {demos.begin(), demos.end()}, cfg.theta, cfg.competency, cfg.calibration);
  Rng sa = Rng::stream(cfg.seed, "sa");
  Rng sgs = Rng::stream(cfg.seed, "sgs");
  Rng id = Rng::stream(cfg.seed, "identify");
  StepContext ctx{model, std::move(repr), cfg, sa, sgs, id};

  RunTrace trace;
  auto note = [&](const MaybeTask& t, double u) {
    if (t && u < trace.best_energy) {
      trace.best_energy = u;
      trace.best = t;
    }
  };
  SaState z;
  std::vector<HistoryEntry> history;
  for (std::size_t t = 0; t < cfg.max_iters; ++t) {
    IterationRecord rec;
    rec.iter = t;
    const double T = cfg.temperature(t);
    if (auto r = maybe_reset(t, history, ctx, T)) {
      z = std::move(*r);
      rec.reset = true;
      rec.reset_energy = z.energy;
      note(z.task, z.energy);
    }
    z = diss_step(z, ctx, history, rec, T);
    if (rec.candidate_energy.energy < trace.best_energy) {
      trace.best_energy = rec.candidate_energy.energy;
      trace.best = history.back().task;
    }
    rec.num_examples = z.examples.size();
    rec.current_energy = z.energy;
    rec.min_energy = trace.best_energy;
    trace.records.push_back(std::move(rec));
  }
  trace.unique_evaluations = model.unique_evaluations();
  return trace;
}

RunTrace run_enumeration_baseline(const Mdp& m, std::span<const Path> demos, ReprClassPtr repr, const DissConfig& cfg,
                                  std::size_t n) {
  EnergyModel model(m, {demos.begin(), demos.end()}, cfg.theta, cfg.competency, cfg.calibration);
  // Restrict to tasks accepting the complete demonstrations.
  std::vector<LabeledExample> xs;
  for (const auto& d : demos)
    if (is_complete(m, d)) xs.push_back({trace_of(m, d), true, d});
  DissConfig c = cfg;
  c.max_candidates = n;
  const auto res = enumerate_consistent(make_query(xs, repr, c));
  std::vector<TaskSpec> tasks;
  for (const auto& d : res.dfas) tasks.emplace_back(d, repr);
  std::stable_sort(tasks.begin(), tasks.end(),
                   [](const TaskSpec& a, const TaskSpec& b) { return a.size_nats() < b.size_nats(); });

  RunTrace trace;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    IterationRecord rec;
    rec.iter = i;
    rec.candidate = to_text(tasks[i].dfa());
    rec.candidate_states = tasks[i].dfa().num_states();
    rec.candidate_energy = model.evaluate(tasks[i]);
    rec.accepted = true;
    rec.num_examples = xs.size();
    rec.current_energy = rec.candidate_energy.energy;
    if (rec.candidate_energy.energy < trace.best_energy) {
      trace.best_energy = rec.candidate_energy.energy;
      trace.best = tasks[i];
    }
    rec.min_energy = trace.best_energy;
    trace.records.push_back(std::move(rec));
  }
  trace.unique_evaluations = model.unique_evaluations();
  return trace;
}

namespace {

nlohmann::json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

const char* boundary_name(Boundary b) {
  switch (b) {
    case Boundary::kLow:
      return "low";
    case Boundary::kHigh:
      return "high";
    default:
      return "none";
  }
}

}  // namespace

void write_trace_jsonl(std::ostream& os, const RunTrace& trace) {
  for (const auto& r : trace.records) {
    nlohmann::ordered_json j;
    j["iter"] = r.iter;
    j["temperature"] = r.temperature;
    j["candidate"] = r.candidate.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(r.candidate);
    j["candidate_states"] = r.candidate_states;
    j["energy"] = num(r.candidate_energy.energy);
    j["surprisal"] = num(r.candidate_energy.surprisal);
    j["size_term"] = num(r.candidate_energy.size_term);
    j["lambda"] = r.candidate_energy.lambda;
    j["boundary"] = boundary_name(r.candidate_energy.boundary);
    j["accepted"] = r.accepted;
    j["reset"] = r.reset;
    if (r.reset) j["reset_energy"] = num(r.reset_energy);
    if (r.has_sample) {
      j["sgs"] = {{"pivot", r.pivot}, {"gradient", r.gradient}, {"word", r.sampled_word}, {"label", r.sampled_label}};
    } else {
      j["sgs"] = nullptr;
    }
    j["num_examples"] = r.num_examples;
    j["current_energy"] = num(r.current_energy);
    j["min_energy"] = num(r.min_energy);
    os << j.dump() << '\n';
  }
}

void write_summary_csv(std::ostream& os, const RunTrace& trace) {
  os << "iteration,energy,min_energy\n";
  auto cell = [](double x) { return std::isfinite(x) ? nlohmann::json(x).dump() : std::string("inf"); };
  for (const auto& r : trace.records)
    os << r.iter << ',' << cell(r.candidate_energy.energy) << ',' << cell(r.min_energy) << '\n';
}

}  // namespace diss
