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

#include "diss/diss.h"

#include <cstring>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "core/dfa.hpp"
#include "core/experiment.hpp"
#include "core/gridworld.hpp"

struct diss_world {
  std::unique_ptr<diss::Gridworld> world;
};

struct diss_demos {
  std::vector<diss::Path> paths;
};

struct diss_dfa {
  diss::Dfa dfa;
};

struct diss_experiment {
  diss::ExperimentConfig config;
};

struct diss_result {
  std::vector<std::uint64_t> seeds;
  std::vector<diss::RunTrace> traces;
};

namespace {

thread_local std::string g_last_error;

diss_status fail(diss_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

// Runs f, translating exceptions into status codes.
template <class F>
diss_status guard(F&& f) {
  try {
    g_last_error.clear();
    f();
    return DISS_OK;
  } catch (const diss::ParseError& e) {
    return fail(DISS_ERR_PARSE, e.what());
  } catch (const diss::DomainError& e) {
    return fail(DISS_ERR_DOMAIN, e.what());
  } catch (const diss::LimitError& e) {
    return fail(DISS_ERR_LIMIT, e.what());
  } catch (const diss::IoError& e) {
    return fail(DISS_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(DISS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(DISS_ERR_INTERNAL, e.what());
  }
}

char* dup_string(const std::string& s) {
  auto* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

#define DISS_REQUIRE(...)                                                   \
  do {                                                                      \
    const void* ptrs_[] = {__VA_ARGS__};                                    \
    for (const void* p_ : ptrs_)                                            \
      if (p_ == nullptr) return fail(DISS_ERR_INVALID_ARGUMENT, "null argument"); \
  } while (0)

diss_status check_run(const diss_result* r, size_t run) {
  if (run >= r->traces.size()) return fail(DISS_ERR_DOMAIN, "run index out of range");
  return DISS_OK;
}

}  // namespace

extern "C" {

const char* diss_version(void) { return "0.1.0"; }

const char* diss_last_error(void) { return g_last_error.c_str(); }

const char* diss_status_name(diss_status s) {
  switch (s) {
    case DISS_OK: return "ok";
    case DISS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case DISS_ERR_PARSE: return "parse error";
    case DISS_ERR_DOMAIN: return "domain error";
    case DISS_ERR_LIMIT: return "limit exceeded";
    case DISS_ERR_IO: return "i/o error";
    case DISS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void diss_string_free(char* s) { delete[] s; }

diss_status diss_world_load(const char* map_path, diss_world** out) {
  DISS_REQUIRE(map_path, out);
  return guard([&] {
    auto w = std::make_unique<diss_world>();
    w->world = std::make_unique<diss::Gridworld>(diss::load_map(map_path));
    *out = w.release();
  });
}

diss_status diss_world_parse(const char* map_text, diss_world** out) {
  DISS_REQUIRE(map_text, out);
  return guard([&] {
    auto w = std::make_unique<diss_world>();
    w->world = std::make_unique<diss::Gridworld>(diss::parse_map(map_text));
    *out = w.release();
  });
}

diss_status diss_world_num_states(const diss_world* w, size_t* out) {
  DISS_REQUIRE(w, out);
  *out = w->world->mdp().num_states();
  return guard([] {});
}

void diss_world_free(diss_world* w) { delete w; }

diss_status diss_demos_load(const diss_world* w, const char* path, diss_demos** out) {
  DISS_REQUIRE(w, path, out);
  return guard([&] {
    auto d = std::make_unique<diss_demos>();
    d->paths = diss::load_demos(*w->world, path);
    *out = d.release();
  });
}

diss_status diss_demos_parse(const diss_world* w, const char* text, diss_demos** out) {
  DISS_REQUIRE(w, text, out);
  return guard([&] {
    auto d = std::make_unique<diss_demos>();
    d->paths = diss::parse_demos(*w->world, text);
    *out = d.release();
  });
}

diss_status diss_demos_count(const diss_demos* d, size_t* out) {
  DISS_REQUIRE(d, out);
  *out = d->paths.size();
  return guard([] {});
}

diss_status diss_demos_validate(const diss_world* w, const diss_demos* d) {
  DISS_REQUIRE(w, d);
  return guard([&] {
    for (std::size_t i = 0; i < d->paths.size(); ++i) {
      const auto rep = diss::validate_path(w->world->mdp(), d->paths[i]);
      if (!rep.ok)
        throw diss::DomainError("demonstration " + std::to_string(i) + ", step " + std::to_string(rep.index / 2) + ": " +
                                rep.message);
    }
  });
}

diss_status diss_demos_word(const diss_world* w, const diss_demos* d, size_t i, char** out) {
  DISS_REQUIRE(w, d, out);
  if (i >= d->paths.size()) return fail(DISS_ERR_DOMAIN, "demonstration index out of range");
  return guard([&] {
    const auto& m = w->world->mdp();
    *out = dup_string(diss::format_word(m.alphabet(), diss::trace_of(m, d->paths[i])));
  });
}

void diss_demos_free(diss_demos* d) { delete d; }

diss_status diss_dfa_parse(const char* text, diss_dfa** out) {
  DISS_REQUIRE(text, out);
  return guard([&] { *out = new diss_dfa{diss::parse_dfa(text)}; });
}

diss_status diss_dfa_load(const char* path, diss_dfa** out) {
  DISS_REQUIRE(path, out);
  return guard([&] { *out = new diss_dfa{diss::parse_dfa(diss::read_text_file(path))}; });
}

diss_status diss_dfa_num_states(const diss_dfa* d, size_t* out) {
  DISS_REQUIRE(d, out);
  *out = d->dfa.num_states();
  return guard([] {});
}

diss_status diss_dfa_size_bits(const diss_dfa* d, double* out) {
  DISS_REQUIRE(d, out);
  return guard([&] { *out = diss::size_bits(d->dfa); });
}

diss_status diss_dfa_accepts(const diss_dfa* d, const char* word, int* out) {
  DISS_REQUIRE(d, word, out);
  return guard([&] { *out = d->dfa.accepts(diss::parse_word(d->dfa.alphabet(), word)) ? 1 : 0; });
}

diss_status diss_dfa_to_text(const diss_dfa* d, char** out) {
  DISS_REQUIRE(d, out);
  return guard([&] { *out = dup_string(diss::to_text(d->dfa)); });
}

diss_status diss_dfa_to_dot(const diss_dfa* d, const char* name, char** out) {
  DISS_REQUIRE(d, out);
  return guard([&] { *out = dup_string(diss::to_dot(d->dfa, name ? name : "dfa")); });
}

void diss_dfa_free(diss_dfa* d) { delete d; }

diss_status diss_experiment_load(const char* config_path, diss_experiment** out) {
  DISS_REQUIRE(config_path, out);
  return guard([&] { *out = new diss_experiment{diss::load_config(config_path)}; });
}

diss_status diss_experiment_parse(const char* text, const char* base_dir, diss_experiment** out) {
  DISS_REQUIRE(text, out);
  return guard([&] {
    *out = new diss_experiment{diss::parse_config(text, base_dir ? base_dir : "")};
  });
}

diss_status diss_experiment_set(diss_experiment* e, const char* key, const char* value) {
  DISS_REQUIRE(e, key, value);
  return guard([&] { diss::apply_setting(e->config, key, value, std::filesystem::path{}); });
}

diss_status diss_experiment_config_text(const diss_experiment* e, char** out) {
  DISS_REQUIRE(e, out);
  return guard([&] { *out = dup_string(diss::config_to_text(e->config)); });
}

diss_status diss_experiment_run(const diss_experiment* e, diss_result** out) {
  DISS_REQUIRE(e, out);
  return guard([&] {
    const auto ex = diss::load_experiment(e->config);
    auto r = std::make_unique<diss_result>();
    r->traces = diss::run_experiment(ex);
    r->seeds = e->config.seeds;
    *out = r.release();
  });
}

diss_status diss_experiment_run_seed(const diss_experiment* e, uint64_t seed, diss_result** out) {
  DISS_REQUIRE(e, out);
  return guard([&] {
    const auto ex = diss::load_experiment(e->config);
    auto r = std::make_unique<diss_result>();
    r->traces.push_back(diss::run_seed(ex, seed));
    r->seeds.push_back(seed);
    *out = r.release();
  });
}

void diss_experiment_free(diss_experiment* e) { delete e; }

diss_status diss_result_num_runs(const diss_result* r, size_t* out) {
  DISS_REQUIRE(r, out);
  *out = r->traces.size();
  return guard([] {});
}

diss_status diss_result_seed(const diss_result* r, size_t run, uint64_t* out) {
  DISS_REQUIRE(r, out);
  if (auto s = check_run(r, run); s != DISS_OK) return s;
  *out = r->seeds[run];
  return guard([] {});
}

diss_status diss_result_best_energy(const diss_result* r, size_t run, double* out) {
  DISS_REQUIRE(r, out);
  if (auto s = check_run(r, run); s != DISS_OK) return s;
  *out = r->traces[run].best_energy;
  return guard([] {});
}

diss_status diss_result_best_dfa(const diss_result* r, size_t run, diss_dfa** out) {
  DISS_REQUIRE(r, out);
  if (auto s = check_run(r, run); s != DISS_OK) return s;
  return guard([&] {
    const auto& best = r->traces[run].best;
    *out = best ? new diss_dfa{best->dfa()} : nullptr;
  });
}

diss_status diss_result_min_energy(const diss_result* r, size_t run, double* buf, size_t cap, size_t* len) {
  DISS_REQUIRE(r, len);
  if (auto s = check_run(r, run); s != DISS_OK) return s;
  const auto& recs = r->traces[run].records;
  *len = recs.size();
  if (buf != nullptr)
    for (std::size_t i = 0; i < recs.size() && i < cap; ++i) buf[i] = recs[i].min_energy;
  return guard([] {});
}

diss_status diss_result_trace_jsonl(const diss_result* r, size_t run, char** out) {
  DISS_REQUIRE(r, out);
  if (auto s = check_run(r, run); s != DISS_OK) return s;
  return guard([&] {
    std::ostringstream os;
    diss::write_trace_jsonl(os, r->traces[run]);
    *out = dup_string(os.str());
  });
}

void diss_result_free(diss_result* r) { delete r; }

}  // extern "C"
