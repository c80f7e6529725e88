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

#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "core/experiment.hpp"
#include "support/fixtures.hpp"

namespace diss {
namespace {

namespace fs = std::filesystem;
using testing::data_path;

fs::path scratch_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("diss_experiment_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

TEST(Config, ParsesKeysAndComments) {
  const auto cfg = parse_config(
      "# comment\n"
      "map = world.map\n"
      "demos = a.txt, b.txt\n"
      "repr = monolithic\n"
      "theta=0.5\n"
      "ln_beta = 0\n"
      "  p_drop = 0.1  \n"
      "kappa = 0\n"
      "reset_temp = 2.5\n"
      "seeds = 1, 4..6\n"
      "baseline = enum\n"
      "baseline_n = 7\n",
      "/base");
  EXPECT_EQ(cfg.map_path, fs::path("/base/world.map"));
  ASSERT_EQ(cfg.demo_paths.size(), 2u);
  EXPECT_EQ(cfg.demo_paths[1], fs::path("/base/b.txt"));
  EXPECT_DOUBLE_EQ(cfg.diss.theta, 0.5);
  EXPECT_DOUBLE_EQ(cfg.diss.sgs.beta, 1.0);
  EXPECT_DOUBLE_EQ(cfg.diss.p_drop, 0.1);
  EXPECT_EQ(cfg.diss.kappa, 0u);
  EXPECT_EQ(cfg.diss.reset_temp, 2.5);
  EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{1, 4, 5, 6}));
  EXPECT_EQ(cfg.baseline, Baseline::kEnumeration);
  EXPECT_EQ(cfg.baseline_n, 7u);
}

TEST(Config, AbsolutePathsStay) {
  const auto cfg = parse_config("map = /x/y.map\n", "/base");
  EXPECT_EQ(cfg.map_path, fs::path("/x/y.map"));
}

TEST(Config, InfiniteBeta) {
  const auto cfg = parse_config("beta = inf\n");
  EXPECT_EQ(cfg.diss.sgs.beta, kInf);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse_config("nonsense = 1\n"), ParseError);
  EXPECT_THROW(parse_config("theta\n"), ParseError);
  EXPECT_THROW(parse_config("p_drop = 1.5\n"), ParseError);
  EXPECT_THROW(parse_config("beta = 0\n"), ParseError);
  EXPECT_THROW(parse_config("gamma = 0\n"), ParseError);
  EXPECT_THROW(parse_config("competency = 1\n"), ParseError);
  EXPECT_THROW(parse_config("kappa = -1\n"), ParseError);
  EXPECT_THROW(parse_config("kappa = 3x\n"), ParseError);
  EXPECT_THROW(parse_config("seeds = 5..2\n"), ParseError);
  EXPECT_THROW(parse_config("repr = flat\n"), ParseError);
  try {
    parse_config("\n\ntheta = abc\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Config, TextRoundTrip) {
  for (const char* name : {"monolithic.cfg", "incremental.cfg"}) {
    const auto a = load_config(data_path(name));
    const auto text = config_to_text(a);
    const auto b = parse_config(text);
    EXPECT_EQ(config_to_text(b), text) << name;
    EXPECT_EQ(b.map_path, a.map_path);
    EXPECT_EQ(b.seeds, a.seeds);
    EXPECT_EQ(b.diss.sgs.beta, a.diss.sgs.beta);
    EXPECT_EQ(b.diss.reset_temp, a.diss.reset_temp);
    EXPECT_EQ(b.mandatory_positives, a.mandatory_positives);
  }
}

TEST(Config, PresetsLoad) {
  const auto mono = load_experiment(load_config(data_path("monolithic.cfg")));
  EXPECT_EQ(mono.demos.size(), 2u);
  EXPECT_FALSE(mono.repr->is_incremental());
  const auto inc = load_experiment(load_config(data_path("incremental.cfg")));
  EXPECT_TRUE(inc.repr->is_incremental());
  EXPECT_EQ(inc.repr->mandatory_positives().size(), 2u);
}

TEST(Config, MissingFilesAreIoErrors) {
  auto cfg = load_config(data_path("monolithic.cfg"));
  cfg.map_path = "/nonexistent/world.map";
  EXPECT_THROW(load_experiment(cfg), IoError);
  EXPECT_THROW(load_config("/nonexistent/x.cfg"), IoError);
}

TEST(Config, InvalidDemoIsRejected) {
  const auto dir = scratch_dir("bad_demo");
  std::ofstream(dir / "demo.txt") << "5,1 R 0,0 R 1,0\n";
  auto cfg = load_config(data_path("monolithic.cfg"));
  cfg.demo_paths = {dir / "demo.txt"};
  EXPECT_ANY_THROW(load_experiment(cfg));
}

TEST(Median, PerIteration) {
  std::vector<RunTrace> ts(3);
  const double vals[3][2] = {{5, 4}, {3, 3}, {kInf, 1}};
  for (int s = 0; s < 3; ++s)
    for (int i = 0; i < 2; ++i) {
      IterationRecord r;
      r.min_energy = vals[s][i];
      ts[s].records.push_back(r);
    }
  const auto m = median_min_energy(ts);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0], 5.0);
  EXPECT_EQ(m[1], 3.0);
}

TEST(Run, WritesArtifactsAndReplays) {
  const auto dir = scratch_dir("run");
  auto cfg = load_config(data_path("monolithic.cfg"));
  cfg.diss.max_iters = 2;
  cfg.diss.max_states = 2;
  cfg.seeds = {3, 4};
  cfg.out_dir = dir;
  const auto e = load_experiment(cfg);
  const auto traces = run_experiment(e);
  ASSERT_EQ(traces.size(), 2u);
  for (const char* s : {"seed_3", "seed_4"})
    for (const char* f : {"trace.jsonl", "summary.csv", "best_dfa.txt", "best_dfa.dot", "run_meta.json"})
      EXPECT_TRUE(fs::exists(dir / s / f)) << s << "/" << f;
  EXPECT_TRUE(fs::exists(dir / "median_summary.csv"));

  const auto meta = nlohmann::json::parse(read_text_file(dir / "seed_4" / "run_meta.json"));
  EXPECT_EQ(meta["seed"], 4);
  EXPECT_EQ(meta["config"], config_to_text(cfg));

  // Replaying from the metadata reproduces the trace bit for bit.
  auto replay_cfg = load_config(dir / "seed_4" / "run_meta.json");
  EXPECT_EQ(replay_cfg.seeds, (std::vector<std::uint64_t>{4}));
  replay_cfg.out_dir = dir / "replay";
  run_experiment(load_experiment(replay_cfg));
  EXPECT_EQ(read_text_file(dir / "replay" / "seed_4" / "trace.jsonl"),
            read_text_file(dir / "seed_4" / "trace.jsonl"));
}

TEST(Run, BaselineSeedIgnoresSeed) {
  auto cfg = load_config(data_path("monolithic.cfg"));
  cfg.baseline = Baseline::kEnumeration;
  cfg.baseline_n = 3;
  const auto e = load_experiment(cfg);
  const auto a = run_seed(e, 0), b = run_seed(e, 9);
  ASSERT_EQ(a.records.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(a.records[i].candidate, b.records[i].candidate);
}

}  // namespace
}  // namespace diss
