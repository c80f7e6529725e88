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

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace diss {

using StateId = std::int32_t;
using ActionId = std::int32_t;
using Symbol = std::int32_t;
using Word = std::vector<Symbol>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Base class of every error raised by the library. The C API maps the
/// concrete subclass onto a status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (unknown action, foreign
/// symbol, probability out of range, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input (map, demo, DFA or config files).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A configured resource cap was hit.
class LimitError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// ln(sum(exp(xs))) with max-shift. Empty input gives -inf.
inline double log_sum_exp(std::span<const double> xs) {
  double hi = -kInf;
  for (double x : xs) hi = std::max(hi, x);
  if (hi == -kInf) return -kInf;
  if (hi == kInf) return kInf;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

inline double log_sum_exp(double a, double b) {
  const double xs[2] = {a, b};
  return log_sum_exp(xs);
}

/// ceil(log2(n)) for n >= 1.
inline int ceil_log2(std::uint64_t n) {
  int bits = 0;
  std::uint64_t cap = 1;
  while (cap < n) {
    cap <<= 1;
    ++bits;
  }
  return bits;
}

}  // namespace diss
