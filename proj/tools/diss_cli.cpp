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

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <iostream>
#include <string>
#include <vector>

#include "diss/diss.h"

namespace {

// Exit codes: 0 ok, 1 usage, 2 bad input, 3 run failure.
int report(diss_status s) {
  std::cerr << "diss: " << diss_status_name(s) << ": " << diss_last_error() << '\n';
  switch (s) {
    case DISS_ERR_PARSE:
    case DISS_ERR_DOMAIN:
    case DISS_ERR_IO:
    case DISS_ERR_INVALID_ARGUMENT: return 2;
    default: return 3;
  }
}

std::string take(char* s) {
  std::string out = s ? s : "";
  diss_string_free(s);
  return out;
}

std::filesystem::path data_dir() {
  if (const char* v = std::getenv("DISS_DATA_DIR")) return v;
  return DISS_DEFAULT_DATA_DIR;
}

struct RunOptions {
  std::string config;
  std::string preset;
  std::string baseline;
  std::string n;
  std::string seeds;
  std::string out;
  std::vector<std::string> sets;
  bool print_config = false;
};

int cmd_run(const RunOptions& o) {
  std::filesystem::path cfg_path;
  if (!o.config.empty()) cfg_path = o.config;
  else cfg_path = data_dir() / (o.preset.empty() ? "monolithic.cfg" : o.preset + ".cfg");

  diss_experiment* e = nullptr;
  if (auto s = diss_experiment_load(cfg_path.c_str(), &e); s != DISS_OK) return report(s);
  std::unique_ptr<diss_experiment, decltype(&diss_experiment_free)> guard(e, diss_experiment_free);

  std::vector<std::pair<std::string, std::string>> overrides;
  if (!o.baseline.empty()) overrides.emplace_back("baseline", o.baseline);
  if (!o.n.empty()) overrides.emplace_back("baseline_n", o.n);
  if (!o.seeds.empty()) overrides.emplace_back("seeds", o.seeds);
  if (!o.out.empty()) overrides.emplace_back("out", o.out);
  for (const auto& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "diss: --set expects key=value, got '" << kv << "'\n";
      return 1;
    }
    overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
  }
  for (const auto& [k, v] : overrides)
    if (auto s = diss_experiment_set(e, k.c_str(), v.c_str()); s != DISS_OK) return report(s);

  if (o.print_config) {
    char* text = nullptr;
    if (auto s = diss_experiment_config_text(e, &text); s != DISS_OK) return report(s);
    std::cout << take(text);
    return 0;
  }

  diss_result* r = nullptr;
  if (auto s = diss_experiment_run(e, &r); s != DISS_OK) return report(s);
  std::unique_ptr<diss_result, decltype(&diss_result_free)> rguard(r, diss_result_free);

  size_t runs = 0;
  diss_result_num_runs(r, &runs);
  for (size_t i = 0; i < runs; ++i) {
    uint64_t seed = 0;
    double best = 0;
    diss_result_seed(r, i, &seed);
    diss_result_best_energy(r, i, &best);
    diss_dfa* d = nullptr;
    diss_result_best_dfa(r, i, &d);
    std::string text = "(none)";
    if (d != nullptr) {
      char* t = nullptr;
      if (diss_dfa_to_text(d, &t) == DISS_OK) text = take(t);
      diss_dfa_free(d);
    }
    std::printf("seed %llu  best energy %.6f  %s\n", static_cast<unsigned long long>(seed), best, text.c_str());
  }
  return 0;
}

int cmd_validate(const std::string& map, const std::vector<std::string>& demos, const std::vector<std::string>& dfas) {
  if (map.empty() && dfas.empty()) {
    std::cerr << "diss: validate needs --map and/or --dfa\n";
    return 1;
  }
  if (!map.empty()) {
    diss_world* w = nullptr;
    if (auto s = diss_world_load(map.c_str(), &w); s != DISS_OK) return report(s);
    std::unique_ptr<diss_world, decltype(&diss_world_free)> wg(w, diss_world_free);
    size_t n = 0;
    diss_world_num_states(w, &n);
    std::cout << map << ": ok, " << n << " states\n";
    for (const auto& p : demos) {
      diss_demos* d = nullptr;
      if (auto s = diss_demos_load(w, p.c_str(), &d); s != DISS_OK) return report(s);
      std::unique_ptr<diss_demos, decltype(&diss_demos_free)> dg(d, diss_demos_free);
      if (auto s = diss_demos_validate(w, d); s != DISS_OK) {
        std::cerr << p << ": ";
        return report(s);
      }
      size_t count = 0;
      diss_demos_count(d, &count);
      if (count == 0) std::cerr << "diss: warning: " << p << " contains no demonstrations\n";
      std::cout << p << ": ok, " << count << " demonstration(s)\n";
      for (size_t i = 0; i < count; ++i) {
        char* word = nullptr;
        if (diss_demos_word(w, d, i, &word) == DISS_OK) std::cout << "  " << take(word) << '\n';
      }
    }
  } else if (!demos.empty()) {
    std::cerr << "diss: --demos needs --map\n";
    return 1;
  }
  for (const auto& p : dfas) {
    diss_dfa* d = nullptr;
    if (auto s = diss_dfa_load(p.c_str(), &d); s != DISS_OK) return report(s);
    size_t n = 0;
    double bits = 0;
    diss_dfa_num_states(d, &n);
    diss_dfa_size_bits(d, &bits);
    diss_dfa_free(d);
    std::cout << p << ": ok, " << n << " states, " << bits << " bits\n";
  }
  return 0;
}

int cmd_export_dot(const std::string& path, const std::string& name, const std::string& out) {
  diss_dfa* d = nullptr;
  if (auto s = diss_dfa_load(path.c_str(), &d); s != DISS_OK) return report(s);
  char* dot = nullptr;
  const auto s = diss_dfa_to_dot(d, name.c_str(), &dot);
  diss_dfa_free(d);
  if (s != DISS_OK) return report(s);
  const auto text = take(dot);
  if (out.empty() || out == "-") {
    std::cout << text;
    return 0;
  }
  std::ofstream f(out);
  if (!(f << text)) {
    std::cerr << "diss: cannot write '" << out << "'\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Task specification search from demonstrations"};
  app.set_version_flag("--version", std::string(diss_version()));
  app.require_subcommand(1);

  RunOptions ro;
  auto* run = app.add_subcommand("run", "run a search experiment");
  auto* cfg_opt = run->add_option("--config", ro.config, "experiment config file");
  run->add_option("--preset", ro.preset, "bundled preset (monolithic, incremental)")->excludes(cfg_opt);
  run->add_option("--baseline", ro.baseline, "none or enum");
  run->add_option("--N", ro.n, "iterations for the enumeration baseline");
  run->add_option("--seeds", ro.seeds, "seed list, e.g. 0..4 or 1,7,9");
  run->add_option("--out", ro.out, "output directory");
  run->add_option("--set", ro.sets, "override a setting, key=value (repeatable)");
  run->add_flag("--print-config", ro.print_config, "print the effective config and exit");

  std::string map, name = "dfa", out, dfa_path;
  std::vector<std::string> demos, dfas;
  auto* validate = app.add_subcommand("validate", "check maps, demonstrations and DFAs");
  validate->add_option("--map", map, "map file");
  validate->add_option("--demos", demos, "demonstration file (repeatable)");
  validate->add_option("--dfa", dfas, "DFA file (repeatable)");

  auto* dot = app.add_subcommand("export-dot", "render a DFA as Graphviz");
  dot->add_option("dfa", dfa_path, "DFA file")->required();
  dot->add_option("--name", name, "graph name");
  dot->add_option("-o,--output", out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*run) return cmd_run(ro);
  if (*validate) return cmd_validate(map, demos, dfas);
  return cmd_export_dot(dfa_path, name, out);
}
