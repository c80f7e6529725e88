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

#include "core/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <thread>

namespace diss {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    const auto piece = trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (!piece.empty()) out.emplace_back(piece);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_double(std::string_view key, std::string_view v) {
  if (v == "inf" || v == "infinity") return kInf;
  const std::string s(v);
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw ParseError("setting '" + std::string(key) + "' expects a number, got '" + s + "'");
  return x;
}

std::uint64_t to_uint(std::string_view key, std::string_view v) {
  std::uint64_t x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ParseError("setting '" + std::string(key) + "' expects a nonnegative integer, got '" + std::string(v) + "'");
  return x;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ParseError("setting '" + std::string(key) + "' expects true or false, got '" + std::string(v) + "'");
}

double probability(std::string_view key, std::string_view v) {
  const double x = to_double(key, v);
  if (!(x >= 0.0 && x <= 1.0)) throw ParseError("setting '" + std::string(key) + "' must lie in [0, 1]");
  return x;
}

fs::path resolve(const fs::path& base, std::string_view v) {
  fs::path p{std::string(v)};
  if (p.is_relative() && !base.empty()) p = base / p;
  return p.lexically_normal();
}

std::string fmt(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value, const fs::path& base) {
  key = trim(key);
  value = trim(value);
  auto& d = cfg.diss;
  if (key == "map") {
    cfg.map_path = resolve(base, value);
  } else if (key == "demos") {
    cfg.demo_paths.clear();
    for (const auto& p : split(value, ',')) cfg.demo_paths.push_back(resolve(base, p));
  } else if (key == "repr") {
    if (value == "monolithic") cfg.incremental = false;
    else if (value == "incremental") cfg.incremental = true;
    else throw ParseError("repr must be monolithic or incremental");
  } else if (key == "reference") {
    cfg.reference_path = resolve(base, value);
  } else if (key == "mandatory") {
    cfg.mandatory_positives = split(value, ';');
  } else if (key == "include_start_label") {
    cfg.include_start_label = to_bool(key, value);
  } else if (key == "theta") {
    d.theta = to_double(key, value);
  } else if (key == "beta") {
    d.sgs.beta = to_double(key, value);
    if (!(d.sgs.beta > 0.0)) throw ParseError("beta must be positive");
  } else if (key == "ln_beta") {
    d.sgs.beta = std::exp(to_double(key, value));
  } else if (key == "p_drop") {
    d.p_drop = probability(key, value);
  } else if (key == "kappa") {
    d.kappa = to_uint(key, value);
  } else if (key == "t0") {
    d.t0 = to_double(key, value);
    if (!(d.t0 > 0.0)) throw ParseError("t0 must be positive");
  } else if (key == "gamma") {
    d.gamma = to_double(key, value);
    if (!(d.gamma > 0.0 && d.gamma <= 1.0)) throw ParseError("gamma must lie in (0, 1]");
  } else if (key == "reset_temp") {
    if (value == "track_cooling") d.reset_temp.reset();
    else d.reset_temp = to_double(key, value);
  } else if (key == "max_iters") {
    d.max_iters = to_uint(key, value);
  } else if (key == "competency") {
    d.competency = to_double(key, value);
    if (!(d.competency > 0.0 && d.competency < 1.0)) throw ParseError("competency must lie in (0, 1)");
  } else if (key == "max_candidates") {
    d.max_candidates = to_uint(key, value);
  } else if (key == "max_states") {
    d.max_states = to_uint(key, value);
  } else if (key == "node_budget") {
    d.node_budget = to_uint(key, value);
  } else if (key == "retry_limit") {
    d.sgs.retry_limit = to_uint(key, value);
  } else if (key == "pivot_redraws") {
    d.sgs.pivot_redraws = to_uint(key, value);
  } else if (key == "small_gradient_pivots") {
    d.sgs.small_gradient_pivots = to_bool(key, value);
  } else if (key == "bayes_suffix") {
    d.sgs.bayes_suffix = to_bool(key, value);
  } else if (key == "baseline") {
    if (value == "none") cfg.baseline = Baseline::kNone;
    else if (value == "enum") cfg.baseline = Baseline::kEnumeration;
    else throw ParseError("baseline must be none or enum");
  } else if (key == "baseline_n") {
    cfg.baseline_n = to_uint(key, value);
  } else if (key == "seeds") {
    cfg.seeds.clear();
    for (const auto& part : split(value, ',')) {
      const auto dots = part.find("..");
      if (dots == std::string::npos) {
        cfg.seeds.push_back(to_uint(key, part));
      } else {
        const auto lo = to_uint(key, trim(std::string_view(part).substr(0, dots)));
        const auto hi = to_uint(key, trim(std::string_view(part).substr(dots + 2)));
        if (hi < lo) throw ParseError("empty seed range");
        for (auto s = lo; s <= hi; ++s) cfg.seeds.push_back(s);
      }
    }
    if (cfg.seeds.empty()) throw ParseError("seeds is empty");
  } else if (key == "out") {
    cfg.out_dir = resolve(base, value);
  } else {
    throw ParseError("unknown setting '" + std::string(key) + "'");
  }
}

ExperimentConfig parse_config(std::string_view text, const fs::path& base) {
  ExperimentConfig cfg;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("line " + std::to_string(lineno) + ": expected key = value");
    try {
      apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1), base);
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  const fs::path base = fs::absolute(path).parent_path();
  if (path.extension() != ".json") return parse_config(read_text_file(path), base);
  // A run_meta.json replays the seed it was written for.
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  if (!meta.is_object() || !meta.contains("config") || !meta["config"].is_string() || !meta.contains("seed") ||
      !meta["seed"].is_number_unsigned())
    throw ParseError(path.string() + ": not a run_meta file");
  auto cfg = parse_config(meta["config"].get<std::string>(), base);
  cfg.seeds = {meta["seed"].get<std::uint64_t>()};
  return cfg;
}

std::string config_to_text(const ExperimentConfig& cfg) {
  const auto& d = cfg.diss;
  std::ostringstream os;
  os << "map = " << cfg.map_path.string() << '\n';
  os << "demos = ";
  for (std::size_t i = 0; i < cfg.demo_paths.size(); ++i) os << (i ? ", " : "") << cfg.demo_paths[i].string();
  os << '\n';
  os << "repr = " << (cfg.incremental ? "incremental" : "monolithic") << '\n';
  if (!cfg.reference_path.empty()) os << "reference = " << cfg.reference_path.string() << '\n';
  if (!cfg.mandatory_positives.empty()) {
    os << "mandatory = ";
    for (std::size_t i = 0; i < cfg.mandatory_positives.size(); ++i) os << (i ? "; " : "") << cfg.mandatory_positives[i];
    os << '\n';
  }
  os << "include_start_label = " << (cfg.include_start_label ? "true" : "false") << '\n';
  os << "theta = " << fmt(d.theta) << '\n';
  os << "beta = " << fmt(d.sgs.beta) << '\n';
  os << "p_drop = " << fmt(d.p_drop) << '\n';
  os << "kappa = " << d.kappa << '\n';
  os << "t0 = " << fmt(d.t0) << '\n';
  os << "gamma = " << fmt(d.gamma) << '\n';
  os << "reset_temp = " << (d.reset_temp ? fmt(*d.reset_temp) : std::string("track_cooling")) << '\n';
  os << "max_iters = " << d.max_iters << '\n';
  os << "competency = " << fmt(d.competency) << '\n';
  os << "max_candidates = " << d.max_candidates << '\n';
  os << "max_states = " << d.max_states << '\n';
  os << "node_budget = " << d.node_budget << '\n';
  os << "retry_limit = " << d.sgs.retry_limit << '\n';
  os << "pivot_redraws = " << d.sgs.pivot_redraws << '\n';
  os << "small_gradient_pivots = " << (d.sgs.small_gradient_pivots ? "true" : "false") << '\n';
  os << "bayes_suffix = " << (d.sgs.bayes_suffix ? "true" : "false") << '\n';
  os << "baseline = " << (cfg.baseline == Baseline::kEnumeration ? "enum" : "none") << '\n';
  os << "baseline_n = " << cfg.baseline_n << '\n';
  os << "seeds = ";
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) os << (i ? "," : "") << cfg.seeds[i];
  os << '\n';
  os << "out = " << cfg.out_dir.string() << '\n';
  return os.str();
}

Experiment load_experiment(const ExperimentConfig& cfg) {
  if (cfg.map_path.empty()) throw ParseError("config has no map");
  if (cfg.demo_paths.empty()) throw ParseError("config has no demos");
  Experiment e;
  e.config = cfg;
  e.world = std::make_unique<Gridworld>(load_map(cfg.map_path));
  e.world->set_include_start_label(cfg.include_start_label);
  for (const auto& p : cfg.demo_paths) {
    auto ds = load_demos(*e.world, p);
    for (auto& d : ds) {
      const auto rep = validate_path(e.world->mdp(), d);
      if (!rep.ok) throw DomainError(p.string() + ": " + rep.message);
      e.demos.push_back(std::move(d));
    }
  }
  const auto& sigma = color_alphabet();
  if (cfg.incremental) {
    if (cfg.reference_path.empty()) throw ParseError("the incremental class needs a reference DFA");
    const Dfa ref = parse_dfa(read_text_file(cfg.reference_path));
    if (!(ref.alphabet() == sigma)) throw DomainError("reference DFA must use the colour alphabet r,b,y,n,_");
    std::vector<Word> mandatory;
    for (const auto& w : cfg.mandatory_positives) mandatory.push_back(parse_word(sigma, w));
    e.repr = ReprClass::incremental(ref, std::move(mandatory));
  } else {
    e.repr = ReprClass::monolithic(sigma);
  }
  return e;
}

RunTrace run_seed(const Experiment& e, std::uint64_t seed) {
  DissConfig c = e.config.diss;
  c.seed = seed;
  if (e.config.baseline == Baseline::kEnumeration)
    return run_enumeration_baseline(e.world->mdp(), e.demos, e.repr, c, e.config.baseline_n);
  return run_diss(e.world->mdp(), e.demos, e.repr, c);
}

std::size_t thread_budget() {
  std::size_t n = std::max(1U, std::thread::hardware_concurrency());
  if (const char* v = std::getenv("DISS_THREADS")) {
    std::size_t x = 0;
    const std::string_view s(v);
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec == std::errc{} && p == s.data() + s.size() && x > 0) n = x;
  }
  return n;
}

std::vector<double> median_min_energy(const std::vector<RunTrace>& traces) {
  std::size_t len = SIZE_MAX;
  for (const auto& t : traces) len = std::min(len, t.records.size());
  if (traces.empty()) len = 0;
  std::vector<double> out(len);
  std::vector<double> col(traces.size());
  for (std::size_t i = 0; i < len; ++i) {
    for (std::size_t s = 0; s < traces.size(); ++s) col[s] = traces[s].records[i].min_energy;
    std::sort(col.begin(), col.end());
    const auto n = col.size();
    out[i] = n % 2 ? col[n / 2] : 0.5 * (col[n / 2 - 1] + col[n / 2]);
  }
  return out;
}

namespace {

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write '" + p.string() + "'");
  out << content;
  if (!out) throw IoError("failed writing '" + p.string() + "'");
}

void write_seed_artifacts(const Experiment& e, std::uint64_t seed, const RunTrace& t) {
  const fs::path dir = e.config.out_dir / ("seed_" + std::to_string(seed));
  fs::create_directories(dir);
  std::ostringstream trace, summary;
  write_trace_jsonl(trace, t);
  write_summary_csv(summary, t);
  write_file(dir / "trace.jsonl", trace.str());
  write_file(dir / "summary.csv", summary.str());
  if (t.best) {
    write_file(dir / "best_dfa.txt", to_text(t.best->dfa()) + "\n");
    write_file(dir / "best_dfa.dot", to_dot(t.best->dfa(), "best"));
  } else {
    write_file(dir / "best_dfa.txt", "# no task found\n");
    write_file(dir / "best_dfa.dot", "digraph best {\n}\n");
  }
  nlohmann::ordered_json meta;
  meta["version"] = "0.1.0";
  meta["seed"] = seed;
  meta["config"] = config_to_text(e.config);
  meta["best_energy"] = std::isfinite(t.best_energy) ? nlohmann::ordered_json(t.best_energy) : nullptr;
  meta["unique_evaluations"] = t.unique_evaluations;
  write_file(dir / "run_meta.json", meta.dump(2) + "\n");
}

}  // namespace

std::vector<RunTrace> run_experiment(const Experiment& e) {
  const auto& seeds = e.config.seeds;
  std::vector<RunTrace> traces(seeds.size());
  std::vector<std::string> errors(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        traces[i] = run_seed(e, seeds[i]);
      } catch (const std::exception& ex) {
        errors[i] = ex.what();
      }
    }
  };
  const auto n_threads = std::min(thread_budget(), seeds.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < seeds.size(); ++i)
    if (!errors[i].empty()) throw Error("seed " + std::to_string(seeds[i]) + ": " + errors[i]);

  fs::create_directories(e.config.out_dir);
  for (std::size_t i = 0; i < seeds.size(); ++i) write_seed_artifacts(e, seeds[i], traces[i]);
  if (seeds.size() > 1) {
    std::ostringstream os;
    os << "iteration,median_min_energy\n";
    const auto med = median_min_energy(traces);
    for (std::size_t i = 0; i < med.size(); ++i)
      os << i << ',' << (std::isfinite(med[i]) ? fmt(med[i]) : std::string("inf")) << '\n';
    write_file(e.config.out_dir / "median_summary.csv", os.str());
  }
  return traces;
}

}  // namespace diss
