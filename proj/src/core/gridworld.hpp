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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/mdp.hpp"

namespace diss {

enum GridAction : ActionId { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };

/// Coloured grid with wind. Row 0 is the top row; "down" increases y.
struct GridSpec {
  int width = 0;
  int height = 0;
  std::vector<Symbol> tiles;  // row-major, y * width + x, over color_alphabet()
  double slip_prob = 0.0;
  int start_x = 0;
  int start_y = 0;
  int horizon = 15;

  Symbol tile(int x, int y) const { return tiles[static_cast<std::size_t>(y * width + x)]; }
};

/// MDP over (cell, timestep) pairs plus the sink. The intended move succeeds
/// with probability 1 - slip_prob, otherwise the agent is pushed one cell
/// down. Moves into a wall leave the agent in place. Every action taken at
/// t == horizon leads to the sink.
class Gridworld {
 public:
  struct Cell {
    int x;
    int y;
    int t;
  };

  explicit Gridworld(GridSpec spec);

  const Mdp& mdp() const { return mdp_; }
  void set_include_start_label(bool on) { mdp_.set_include_start_label(on); }
  const GridSpec& spec() const { return spec_; }

  StateId state_at(int x, int y, int t) const;
  /// nullopt for the sink.
  std::optional<Cell> cell_of(StateId s) const;

 private:
  static Mdp build(const GridSpec& spec);

  GridSpec spec_;
  Mdp mdp_;
};

/// Parses the map format: `key=value` header lines (slip, start, horizon)
/// followed by one line per grid row using r, b, y, n (brown) and '.'.
/// Lines starting with '#' are comments.
GridSpec parse_map(std::string_view text);
GridSpec load_map(const std::filesystem::path& path);

/// One demonstration per line: `x0,y0 A0 x1,y1 A1 ... [$]`, actions U/D/L/R.
Path parse_demo(const Gridworld& world, std::string_view line);
std::vector<Path> parse_demos(const Gridworld& world, std::string_view text);
std::vector<Path> load_demos(const Gridworld& world, const std::filesystem::path& path);
std::string format_demo(const Gridworld& world, const Path& p);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace diss
