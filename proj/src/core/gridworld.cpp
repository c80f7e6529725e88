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

#include "core/gridworld.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace diss {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

int parse_int(std::string_view s, std::string_view what) {
  s = trim(s);
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError("bad integer for " + std::string(what) + ": '" + std::string(s) + "'");
  return v;
}

double parse_fraction(std::string_view s) {
  s = trim(s);
  const auto slash = s.find('/');
  if (slash != std::string_view::npos) {
    const double num = parse_int(s.substr(0, slash), "slip numerator");
    const double den = parse_int(s.substr(slash + 1), "slip denominator");
    if (den == 0) throw ParseError("slip denominator is zero");
    return num / den;
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(std::string(s), &used);
    if (used != s.size()) throw ParseError("bad probability '" + std::string(s) + "'");
    return v;
  } catch (const std::logic_error&) {
    throw ParseError("bad probability '" + std::string(s) + "'");
  }
}

Symbol tile_symbol(char c) {
  switch (c) {
    case 'r': return 0;
    case 'b': return 1;
    case 'y': return 2;
    case 'n': return 3;
    case '.': return 4;
    default: throw ParseError(std::string("unknown tile character '") + c + "'");
  }
}

void validate(const GridSpec& spec) {
  if (spec.width <= 0 || spec.height <= 0) throw DomainError("grid must be nonempty");
  if (spec.tiles.size() != static_cast<std::size_t>(spec.width * spec.height))
    throw DomainError("tile grid does not match the dimensions");
  if (spec.start_x < 0 || spec.start_x >= spec.width || spec.start_y < 0 || spec.start_y >= spec.height)
    throw DomainError("start cell is out of bounds");
  if (!(spec.slip_prob >= 0.0 && spec.slip_prob <= 1.0)) throw DomainError("slip probability must lie in [0,1]");
  if (spec.horizon < 1) throw DomainError("horizon must be positive");
  for (Symbol t : spec.tiles)
    if (t < 0 || static_cast<std::size_t>(t) >= color_alphabet().size()) throw DomainError("tile outside the alphabet");
}

}  // namespace

Gridworld::Gridworld(GridSpec spec) : spec_((validate(spec), std::move(spec))), mdp_(build(spec_)) {}

Mdp Gridworld::build(const GridSpec& spec) {
  const int w = spec.width, h = spec.height, horizon = spec.horizon;
  const int cells = w * h;
  const int n = cells * (horizon + 1) + 1;
  const StateId sink = n - 1;
  auto id = [&](int x, int y, int t) { return static_cast<StateId>(t * cells + y * w + x); };

  std::vector<Mdp::State> states(static_cast<std::size_t>(n));
  for (int t = 0; t <= horizon; ++t) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        auto& st = states[static_cast<std::size_t>(id(x, y, t))];
        st.label = spec.tile(x, y);
        for (ActionId a : {kUp, kDown, kLeft, kRight}) {
          ActionRow row{a, {}};
          if (t == horizon) {
            row.outcomes.push_back({sink, 1.0});
          } else {
            int ix = x, iy = y;
            if (a == kUp) iy = std::max(0, y - 1);
            if (a == kDown) iy = std::min(h - 1, y + 1);
            if (a == kLeft) ix = std::max(0, x - 1);
            if (a == kRight) ix = std::min(w - 1, x + 1);
            const StateId intended = id(ix, iy, t + 1);
            const StateId pushed = id(x, std::min(h - 1, y + 1), t + 1);
            if (intended == pushed || spec.slip_prob == 0.0) {
              row.outcomes.push_back({intended, 1.0});
            } else if (spec.slip_prob == 1.0) {
              row.outcomes.push_back({pushed, 1.0});
            } else {
              row.outcomes.push_back({intended, 1.0 - spec.slip_prob});
              row.outcomes.push_back({pushed, spec.slip_prob});
            }
          }
          st.rows.push_back(std::move(row));
        }
      }
    }
  }
  auto& sink_state = states.back();
  sink_state.label = spec.tile(0, 0);
  for (ActionId a : {kUp, kDown, kLeft, kRight}) sink_state.rows.push_back({a, {{sink, 1.0}}});

  return Mdp(std::move(states), id(spec.start_x, spec.start_y, 0), sink, color_alphabet(), {"U", "D", "L", "R"});
}

StateId Gridworld::state_at(int x, int y, int t) const {
  if (x < 0 || x >= spec_.width || y < 0 || y >= spec_.height || t < 0 || t > spec_.horizon)
    throw DomainError("cell (" + std::to_string(x) + "," + std::to_string(y) + ") at t=" + std::to_string(t) +
                      " is outside the grid");
  return static_cast<StateId>(t * spec_.width * spec_.height + y * spec_.width + x);
}

std::optional<Gridworld::Cell> Gridworld::cell_of(StateId s) const {
  if (s == mdp_.sink()) return std::nullopt;
  const int cells = spec_.width * spec_.height;
  return Cell{s % cells % spec_.width, s % cells / spec_.width, s / cells};
}

GridSpec parse_map(std::string_view text) {
  GridSpec spec;
  bool have_start = false;
  std::vector<std::string> rows;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq != std::string_view::npos) {
      const auto key = trim(line.substr(0, eq));
      const auto value = trim(line.substr(eq + 1));
      if (key == "slip") {
        spec.slip_prob = parse_fraction(value);
      } else if (key == "start") {
        const auto comma = value.find(',');
        if (comma == std::string_view::npos) throw ParseError("start must be x,y");
        spec.start_x = parse_int(value.substr(0, comma), "start x");
        spec.start_y = parse_int(value.substr(comma + 1), "start y");
        have_start = true;
      } else if (key == "horizon") {
        spec.horizon = parse_int(value, "horizon");
      } else {
        throw ParseError("line " + std::to_string(lineno) + ": unknown map key '" + std::string(key) + "'");
      }
      continue;
    }
    std::string row;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) row.push_back(c);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("map has no tile rows");
  if (!have_start) throw ParseError("map has no start= line");
  spec.height = static_cast<int>(rows.size());
  spec.width = static_cast<int>(rows[0].size());
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != spec.width) throw ParseError("map rows have different widths");
    for (char c : r) spec.tiles.push_back(tile_symbol(c));
  }
  validate(spec);
  return spec;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

GridSpec load_map(const std::filesystem::path& path) { return parse_map(read_text_file(path)); }

Path parse_demo(const Gridworld& world, std::string_view line) {
  std::istringstream in{std::string(line)};
  std::string tok;
  Path p;
  bool expect_state = true;
  while (in >> tok) {
    if (expect_state) {
      if (tok == "$") {
        if (p.states.empty()) throw ParseError("demo cannot start with $");
        p.states.push_back(world.mdp().sink());
      } else {
        const auto comma = tok.find(',');
        if (comma == std::string::npos) throw ParseError("expected a cell x,y but found '" + tok + "'");
        const int x = parse_int(std::string_view(tok).substr(0, comma), "cell x");
        const int y = parse_int(std::string_view(tok).substr(comma + 1), "cell y");
        const int t = static_cast<int>(p.states.size());
        if (t > world.spec().horizon)
          throw ParseError("demo is longer than the horizon (" + std::to_string(world.spec().horizon) + ")");
        p.states.push_back(world.state_at(x, y, t));
      }
    } else {
      if (p.states.back() == world.mdp().sink()) throw ParseError("demo continues after $");
      const auto a = world.mdp().find_action(tok);
      if (!a) throw ParseError("unknown action '" + tok + "'");
      p.actions.push_back(*a);
    }
    expect_state = !expect_state;
  }
  if (p.states.empty()) throw ParseError("empty demo");
  if (p.ends_in_action()) throw ParseError("demo must end with a state or $");
  return p;
}

std::vector<Path> parse_demos(const Gridworld& world, std::string_view text) {
  std::vector<Path> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    try {
      out.push_back(parse_demo(world, line));
    } catch (const Error& e) {
      throw ParseError("demo line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<Path> load_demos(const Gridworld& world, const std::filesystem::path& path) {
  return parse_demos(world, read_text_file(path));
}

std::string format_demo(const Gridworld& world, const Path& p) {
  std::string out;
  for (std::size_t i = 0; i < p.states.size(); ++i) {
    if (i > 0) out += ' ';
    if (const auto c = world.cell_of(p.states[i]))
      out += std::to_string(c->x) + "," + std::to_string(c->y);
    else
      out += "$";
    if (i < p.actions.size()) out += " " + world.mdp().action_name(p.actions[i]);
  }
  return out;
}

}  // namespace diss
