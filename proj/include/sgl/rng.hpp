// Copyright 2026 The sgl Authors
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

#include <cstdint>
#include <random>
#include <string>

namespace sgl {

/**
 * @brief Deterministic, splittable random stream.
 *
 * The engine is a 64-bit Mersenne twister whose state is derived from
 * (seed, stream) through splitmix64, so independent tasks can draw from
 * disjoint streams of the same seed.
 */
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed = 0, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream), engine_(mix(seed, stream)) {}

  static const char* algorithm() { return "mt19937_64+splitmix64"; }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /** Child stream for task `index`; does not advance this stream. */
  SeededRng split(std::uint64_t index) const {
    return SeededRng(seed_, splitmix64(stream_ * 0x9e3779b97f4a7c15ULL + index + 1));
  }

  std::uint64_t next() { return engine_(); }

  /** Uniform integer in [0, n). */
  std::uint64_t below(std::uint64_t n) {
    std::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
    return dist(engine_);
  }

  double uniform() {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    return dist(engine_);
  }

  double normal() {
    std::normal_distribution<double> dist(0.0, 1.0);
    return dist(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ stream);
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

}  // namespace sgl
