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
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "sgl/errors.hpp"
#include "sgl/rng.hpp"

namespace sgl {

/** Largest point set for which dense image tables are built. */
inline constexpr std::size_t kMaxTablePoints = std::size_t{1} << 24;

enum class Parity { even, odd };

inline Parity operator^(Parity a, Parity b) {
  return (a == b) ? Parity::even : Parity::odd;
}

inline const char* to_string(Parity p) {
  return p == Parity::even ? "even" : "odd";
}

enum class GroupKind { sym, alt };

/**
 * @brief Bijection on {0, ..., N-1} stored as its image table.
 */
class Permutation {
 public:
  Permutation() = default;

  static Permutation identity(std::size_t n_points) {
    check_cap(n_points);
    Permutation p;
    p.images_.resize(n_points);
    std::iota(p.images_.begin(), p.images_.end(), 0u);
    return p;
  }

  /** Validates that `images` is a bijection. */
  static Permutation from_images(std::vector<std::uint32_t> images) {
    check_cap(images.size());
    std::vector<char> seen(images.size(), 0);
    for (std::uint32_t v : images) {
      if (v >= images.size() || seen[v]) {
        throw ConfigError("image table is not a bijection");
      }
      seen[v] = 1;
    }
    Permutation p;
    p.images_ = std::move(images);
    return p;
  }

  std::size_t size() const { return images_.size(); }
  std::uint32_t operator[](std::size_t x) const { return images_[x]; }
  const std::vector<std::uint32_t>& images() const { return images_; }

  bool is_identity() const {
    for (std::size_t i = 0; i < images_.size(); ++i) {
      if (images_[i] != i) return false;
    }
    return true;
  }

  bool operator==(const Permutation& other) const = default;

 private:
  static void check_cap(std::size_t n) {
    if (n > kMaxTablePoints) {
      throw BudgetError("permutation table exceeds 2^24 points");
    }
  }

  std::vector<std::uint32_t> images_;
};

/** result[x] = p[q[x]]: q acts first. */
inline Permutation compose(const Permutation& p, const Permutation& q) {
  if (p.size() != q.size()) throw ConfigError("compose: size mismatch");
  std::vector<std::uint32_t> out(p.size());
  for (std::size_t x = 0; x < out.size(); ++x) out[x] = p[q[x]];
  return Permutation::from_images(std::move(out));
}

inline Permutation inverse(const Permutation& p) {
  std::vector<std::uint32_t> out(p.size());
  for (std::size_t x = 0; x < out.size(); ++x) out[p[x]] = static_cast<std::uint32_t>(x);
  return Permutation::from_images(std::move(out));
}

/** Cycle lengths, including fixed points, in order of smallest element. */
inline std::vector<std::size_t> cycle_type(const Permutation& p) {
  std::vector<char> seen(p.size(), 0);
  std::vector<std::size_t> lengths;
  for (std::size_t s = 0; s < p.size(); ++s) {
    if (seen[s]) continue;
    std::size_t len = 0;
    for (std::size_t x = s; !seen[x]; x = p[x]) {
      seen[x] = 1;
      ++len;
    }
    lengths.push_back(len);
  }
  return lengths;
}

inline Parity parity(const Permutation& p) {
  std::size_t transpositions = 0;
  for (std::size_t len : cycle_type(p)) transpositions += len - 1;
  return (transpositions % 2 == 0) ? Parity::even : Parity::odd;
}

/** Order of p as the lcm of its cycle lengths. */
inline std::uint64_t order(const Permutation& p) {
  std::uint64_t result = 1;
  for (std::size_t len : cycle_type(p)) result = std::lcm(result, std::uint64_t{len});
  return result;
}

/** Uniform over Sym(N) or Alt(N). */
inline Permutation sample_uniform(GroupKind group, std::size_t n_points, SeededRng& rng) {
  if (n_points == 0) throw ConfigError("sample_uniform: N must be positive");
  std::vector<std::uint32_t> images(n_points);
  std::iota(images.begin(), images.end(), 0u);
  std::size_t swaps = 0;
  for (std::size_t i = n_points - 1; i > 0; --i) {
    std::size_t j = rng.below(i + 1);
    if (j != i) {
      std::swap(images[i], images[j]);
      ++swaps;
    }
  }
  if (group == GroupKind::alt && swaps % 2 == 1 && n_points >= 2) {
    std::swap(images[n_points - 1], images[n_points - 2]);
  }
  return Permutation::from_images(std::move(images));
}

/** Componentwise image (p(m_1), ..., p(m_t)). */
inline std::vector<std::uint64_t> lift_apply(const Permutation& p,
                                             std::span<const std::uint64_t> index) {
  std::vector<std::uint64_t> out(index.size());
  for (std::size_t j = 0; j < index.size(); ++j) {
    if (index[j] >= p.size()) throw std::out_of_range("lift_apply: component out of range");
    out[j] = p[index[j]];
  }
  return out;
}

/** Permutation of {0..n-1} with lexicographic rank `rank` (rank 0 is the identity). */
inline Permutation permutation_from_lex_rank(std::size_t n, std::uint64_t rank) {
  std::vector<std::uint64_t> fact(n + 1, 1);
  for (std::size_t k = 1; k <= n; ++k) fact[k] = fact[k - 1] * k;
  if (n > 20 || rank >= fact[n]) throw ConfigError("lex rank out of range");
  std::vector<std::uint32_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0u);
  std::vector<std::uint32_t> images;
  images.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t f = fact[n - 1 - i];
    std::uint64_t k = rank / f;
    rank %= f;
    images.push_back(pool[k]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k));
  }
  return Permutation::from_images(std::move(images));
}

inline std::uint64_t lex_rank(const Permutation& p) {
  std::uint64_t rank = 0;
  std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t smaller = 0;
    for (std::size_t j = i + 1; j < n; ++j) smaller += (p[j] < p[i]);
    rank = rank * (n - i) + smaller;
  }
  return rank;
}

/** "PERM N: i0 i1 ... i(N-1)". */
inline std::string serialize(const Permutation& p) {
  std::ostringstream os;
  os << "PERM " << p.size() << ":";
  for (std::uint32_t v : p.images()) os << ' ' << v;
  return os.str();
}

inline Permutation parse_permutation(const std::string& line) {
  std::istringstream is(line);
  std::string tag;
  std::size_t n = 0;
  char colon = 0;
  if (!(is >> tag >> n >> colon) || tag != "PERM" || colon != ':') {
    throw ConfigError("malformed permutation line");
  }
  std::vector<std::uint32_t> images(n);
  for (auto& v : images) {
    if (!(is >> v)) throw ConfigError("permutation line too short");
  }
  return Permutation::from_images(std::move(images));
}

}  // namespace sgl
