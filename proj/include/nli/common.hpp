// nli/common.hpp

// Copyright 2026  nli-ivector authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef NLI_COMMON_HPP_
#define NLI_COMMON_HPP_

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace nli {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Bad user input: malformed files, invalid configuration values.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string &msg) : std::runtime_error(msg) {}
};

/// Bad data: unreadable audio, degenerate statistics, checksum mismatch.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string &msg) : std::runtime_error(msg) {}
};

/// Deterministic 64-bit RNG (xoshiro-free; plain splitmix + mt19937_64 would
/// also do, but we need bit-identical streams across platforms, so the
/// generator and the normal transform are both pinned here).
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  uint64_t NextU64() {
    // splitmix64
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double NextDouble() {
    return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (one value per call, cached pair).
  double NextGaussian();

  /// Uniform integer in [0, n).
  uint64_t NextBelow(uint64_t n) { return NextU64() % n; }

 private:
  uint64_t state_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

/// Parses a plain-text key=value file ('#' comments, blank lines ignored).
std::map<std::string, std::string> ParseKeyValueFile(const std::string &path);

/// Parses key=value pairs from a string, one pair per line.
std::map<std::string, std::string> ParseKeyValueText(const std::string &text);

/// CRC-32 (zlib polynomial) of a byte buffer.
uint32_t Crc32(const void *data, size_t len);

}  // namespace nli

#endif  // NLI_COMMON_HPP_
