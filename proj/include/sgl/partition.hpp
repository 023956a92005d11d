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

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "sgl/errors.hpp"
#include "sgl/permutation.hpp"

namespace sgl {

using BigInt = boost::multiprecision::cpp_int;

/** Largest moment order for which partitions are enumerated (Bell(8) = 4140). */
inline constexpr std::size_t kMaxPartitionOrder = 8;

/**
 * @brief Partition of {0, ..., t-1} as a restricted growth string.
 *
 * blocks[i] is the block id of element i; ids appear in order of first
 * occurrence, so equal partitions have equal strings.
 */
struct SetPartition {
  std::vector<std::uint8_t> blocks;

  std::size_t t() const { return blocks.size(); }

  std::size_t block_count() const {
    std::uint8_t m = 0;
    for (auto b : blocks) m = std::max<std::uint8_t>(m, b + 1);
    return blocks.empty() ? 0 : m;
  }

  /** True iff every block of *this lies inside a block of `coarser`. */
  bool refines(const SetPartition& coarser) const {
    for (std::size_t i = 0; i < blocks.size(); ++i)
      for (std::size_t j = i + 1; j < blocks.size(); ++j)
        if (blocks[i] == blocks[j] && coarser.blocks[i] != coarser.blocks[j]) return false;
    return true;
  }

  /** Canonical form of an arbitrary labelling. */
  template <class It>
  static SetPartition from_labels(It first, It last) {
    SetPartition p;
    std::vector<std::uint64_t> seen;
    for (It it = first; it != last; ++it) {
      auto pos = std::find(seen.begin(), seen.end(), static_cast<std::uint64_t>(*it));
      if (pos == seen.end()) {
        p.blocks.push_back(static_cast<std::uint8_t>(seen.size()));
        seen.push_back(static_cast<std::uint64_t>(*it));
      } else {
        p.blocks.push_back(static_cast<std::uint8_t>(pos - seen.begin()));
      }
    }
    return p;
  }

  /** Base-t code of the restricted growth string. */
  std::uint32_t code() const {
    std::uint32_t c = 0;
    for (auto b : blocks) c = c * static_cast<std::uint32_t>(blocks.size()) + b;
    return c;
  }

  /** 1-based block notation, e.g. "{{1,3},{2}}". */
  std::string to_string() const {
    std::ostringstream os;
    os << '{';
    for (std::size_t b = 0; b < block_count(); ++b) {
      os << (b ? ",{" : "{");
      bool first = true;
      for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (blocks[i] != b) continue;
        os << (first ? "" : ",") << i + 1;
        first = false;
      }
      os << '}';
    }
    os << '}';
    return os.str();
  }

  bool operator==(const SetPartition&) const = default;
};

/**
 * All partitions of a t-element set, ordered by decreasing block count and
 * then lexicographically by restricted growth string. With this order the
 * refinement matrix is upper triangular.
 */
inline std::vector<SetPartition> enumerate_partitions(std::size_t t) {
  if (t < 1 || t > kMaxPartitionOrder) throw BudgetError("enumerate_partitions: t must be in [1, 8]");
  std::vector<SetPartition> out;
  SetPartition cur;
  cur.blocks.assign(t, 0);
  auto rec = [&](auto&& self, std::size_t i, std::uint8_t max_id) -> void {
    if (i == t) {
      out.push_back(cur);
      return;
    }
    for (std::uint8_t b = 0; b <= max_id + 1 && b < t; ++b) {
      cur.blocks[i] = b;
      self(self, i + 1, std::max<std::uint8_t>(max_id, b));
    }
  };
  cur.blocks[0] = 0;
  if (t == 1) {
    out.push_back(cur);
  } else {
    rec(rec, 1, 0);
  }
  std::stable_sort(out.begin(), out.end(), [](const SetPartition& a, const SetPartition& b) {
    if (a.block_count() != b.block_count()) return a.block_count() > b.block_count();
    return a.blocks < b.blocks;
  });
  return out;
}

/** Dense row-major integer matrix. */
struct IntMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::int64_t> data;

  IntMatrix() = default;
  IntMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0) {}
  std::int64_t& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  std::int64_t operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  bool operator==(const IntMatrix&) const = default;
};

inline IntMatrix multiply(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols != b.rows) throw ConfigError("matrix shape mismatch");
  IntMatrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      std::int64_t v = a(i, k);
      if (v == 0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) c(i, j) += v * b(k, j);
    }
  return c;
}

/**
 * @brief Partitions of a t-element set with the refinement order.
 */
class PartitionLattice {
 public:
  explicit PartitionLattice(std::size_t t) : t_(t), parts_(enumerate_partitions(t)) {
    for (std::size_t i = 0; i < parts_.size(); ++i) index_.emplace(parts_[i].code(), i);
  }

  std::size_t t() const { return t_; }
  std::size_t size() const { return parts_.size(); }
  const SetPartition& operator[](std::size_t i) const { return parts_[i]; }
  const std::vector<SetPartition>& partitions() const { return parts_; }

  std::size_t index_of(const SetPartition& p) const {
    auto it = index_.find(p.code());
    if (it == index_.end()) throw ConfigError("partition not in lattice");
    return it->second;
  }

  /** K(i, j) = 1 iff partition i refines partition j. */
  IntMatrix k_matrix() const {
    IntMatrix k(size(), size());
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = 0; j < size(); ++j) k(i, j) = parts_[i].refines(parts_[j]) ? 1 : 0;
    return k;
  }

  /**
   * Exact inverse of K from the Moebius function of the partition lattice:
   * for Pi refining Sigma, each block of Sigma that merges k blocks of Pi
   * contributes (-1)^(k-1) (k-1)!.
   */
  IntMatrix k_inverse() const {
    IntMatrix inv(size(), size());
    std::vector<std::int64_t> fact(t_ + 1, 1);
    for (std::size_t k = 1; k <= t_; ++k) fact[k] = fact[k - 1] * static_cast<std::int64_t>(k);
    for (std::size_t i = 0; i < size(); ++i) {
      const auto& fine = parts_[i];
      for (std::size_t j = 0; j < size(); ++j) {
        const auto& coarse = parts_[j];
        if (!fine.refines(coarse)) continue;
        std::int64_t value = 1;
        for (std::size_t b = 0; b < coarse.block_count(); ++b) {
          std::vector<std::uint8_t> merged;
          for (std::size_t e = 0; e < t_; ++e) {
            if (coarse.blocks[e] == b &&
                std::find(merged.begin(), merged.end(), fine.blocks[e]) == merged.end()) {
              merged.push_back(fine.blocks[e]);
            }
          }
          std::size_t k = merged.size();
          value *= ((k - 1) % 2 ? -1 : 1) * fact[k - 1];
        }
        inv(i, j) = value;
      }
    }
    return inv;
  }

 private:
  std::size_t t_;
  std::vector<SetPartition> parts_;
  std::unordered_map<std::uint32_t, std::size_t> index_;
};

inline IntMatrix k_inverse(std::size_t t) { return PartitionLattice(t).k_inverse(); }

/** |M'_Pi| = N (N-1) ... (N - |Pi| + 1). */
inline BigInt oprime_norm_sq(const SetPartition& pi, std::uint64_t n_points) {
  std::size_t b = pi.block_count();
  if (n_points < b) throw ConfigError("oprime_norm_sq: N below the block count");
  BigInt r = 1;
  for (std::size_t i = 0; i < b; ++i) r *= (n_points - i);
  return r;
}

/** |M_Pi| = N^|Pi|. */
inline BigInt o_norm_sq(const SetPartition& pi, std::uint64_t n_points) {
  BigInt r = 1;
  for (std::size_t i = 0; i < pi.block_count(); ++i) r *= n_points;
  return r;
}

// ---------------------------------------------------------------------------
// Embeddings of the permuted set into each tensor copy.

/**
 * @brief Factorization of one tensor copy [D] as [N_S] x [N_C].
 *
 * The permutation group acts on the first factor; the second factor is a
 * spectator on which the projector is the identity.
 */
struct CopyEmbedding {
  std::uint32_t dim = 0;
  std::uint32_t n_sub = 0;
  std::uint32_t n_comp = 1;
  std::vector<std::uint32_t> sub_of;
  std::vector<std::uint32_t> comp_of;
  std::vector<std::uint32_t> point_of;  // point_of[s + n_sub * c]

  /** The group acts on all of [N]. */
  static CopyEmbedding full(std::uint32_t n_points) {
    CopyEmbedding e;
    e.dim = e.n_sub = n_points;
    e.n_comp = 1;
    e.sub_of.resize(n_points);
    std::iota(e.sub_of.begin(), e.sub_of.end(), 0u);
    e.comp_of.assign(n_points, 0);
    e.point_of = e.sub_of;
    return e;
  }

  /** n-bit strings; the group permutes the values of the bits in `subset`. */
  static CopyEmbedding bits(std::uint32_t n_bits, const std::vector<std::uint32_t>& subset) {
    if (n_bits > 24) throw BudgetError("bit embedding wider than 24 bits");
    std::vector<std::uint32_t> rest;
    for (std::uint32_t b = 0; b < n_bits; ++b)
      if (std::find(subset.begin(), subset.end(), b) == subset.end()) rest.push_back(b);
    if (rest.size() + subset.size() != n_bits) throw ConfigError("bit subset has repeats or out-of-range bits");
    CopyEmbedding e;
    e.dim = 1u << n_bits;
    e.n_sub = 1u << subset.size();
    e.n_comp = 1u << rest.size();
    e.sub_of.resize(e.dim);
    e.comp_of.resize(e.dim);
    e.point_of.resize(e.dim);
    for (std::uint32_t x = 0; x < e.dim; ++x) {
      std::uint32_t s = 0, c = 0;
      for (std::size_t k = 0; k < subset.size(); ++k) s |= ((x >> subset[k]) & 1u) << k;
      for (std::size_t k = 0; k < rest.size(); ++k) c |= ((x >> rest[k]) & 1u) << k;
      e.sub_of[x] = s;
      e.comp_of[x] = c;
      e.point_of[s + e.n_sub * c] = x;
    }
    return e;
  }

  /**
   * Points x = a + A (b + B c) of A x B x C; the group acts on A x B
   * (`acted = "ab"`), on B x C (`"bc"`) or on everything (`"abc"`).
   */
  static CopyEmbedding product(std::uint32_t A, std::uint32_t B, std::uint32_t C, const std::string& acted) {
    CopyEmbedding e;
    e.dim = A * B * C;
    e.sub_of.resize(e.dim);
    e.comp_of.resize(e.dim);
    e.point_of.resize(e.dim);
    if (acted == "abc") {
      e.n_sub = e.dim;
      e.n_comp = 1;
    } else if (acted == "ab") {
      e.n_sub = A * B;
      e.n_comp = C;
    } else if (acted == "bc") {
      e.n_sub = B * C;
      e.n_comp = A;
    } else {
      throw ConfigError("product embedding: acted must be ab, bc or abc");
    }
    for (std::uint32_t x = 0; x < e.dim; ++x) {
      std::uint32_t a = x % A, b = (x / A) % B, c = x / (A * B);
      std::uint32_t s = 0, r = 0;
      if (acted == "abc") {
        s = x;
      } else if (acted == "ab") {
        s = a + A * b;
        r = c;
      } else {
        s = b + B * c;
        r = a;
      }
      e.sub_of[x] = s;
      e.comp_of[x] = r;
      e.point_of[s + e.n_sub * r] = x;
    }
    return e;
  }
};

/** Number of entries of the t-fold tensor power of [D], with a budget check. */
inline std::size_t tensor_dim(std::uint64_t D, std::size_t t, std::size_t budget = std::size_t{1} << 24) {
  std::uint64_t dim = 1;
  for (std::size_t j = 0; j < t; ++j) {
    dim *= D;
    if (dim > budget) throw BudgetError("tensor dimension exceeds budget");
  }
  return static_cast<std::size_t>(dim);
}

/**
 * @brief Projector onto the Sym(N_S)-invariant vectors, built from O-vector
 * contractions, K^-1 and the falling-factorial Gram values.
 *
 * Index of a tensor entry is sum_j x_j D^j. O'-vectors are never
 * materialized: each O-vector is an indicator of tuples that are constant on
 * the blocks of its partition, so contraction enumerates one value per block.
 */
inline std::vector<double> apply_trivial_projector(const CopyEmbedding& emb, std::size_t t,
                                                   const std::vector<double>& v) {
  const std::size_t dim = tensor_dim(emb.dim, t);
  if (v.size() != dim) throw ConfigError("apply_trivial_projector: vector has wrong dimension");
  if (emb.n_sub < t) throw ConfigError("apply_trivial_projector: requires N >= t");
  PartitionLattice lat(t);
  IntMatrix kinv = lat.k_inverse();
  const std::size_t B = lat.size();
  std::vector<double> gram(B);
  for (std::size_t p = 0; p < B; ++p) gram[p] = oprime_norm_sq(lat[p], emb.n_sub).convert_to<double>();
  const std::size_t comp_tuples = tensor_dim(emb.n_comp, t);
  std::vector<double> out(dim, 0.0);
  std::vector<std::uint64_t> pow_d(t, 1);
  for (std::size_t j = 1; j < t; ++j) pow_d[j] = pow_d[j - 1] * emb.dim;

  // Visits every tuple of M_Pi for fixed spectator values; fn(index).
  auto for_each_in_block_tuple = [&](const SetPartition& pi, const std::vector<std::uint32_t>& comp, auto&& fn) {
    const std::size_t nb = pi.block_count();
    std::vector<std::uint32_t> val(nb, 0);
    for (;;) {
      std::uint64_t idx = 0;
      for (std::size_t j = 0; j < t; ++j) {
        idx += std::uint64_t{emb.point_of[val[pi.blocks[j]] + emb.n_sub * comp[j]]} * pow_d[j];
      }
      fn(static_cast<std::size_t>(idx));
      std::size_t k = 0;
      while (k < nb && ++val[k] == emb.n_sub) val[k++] = 0;
      if (k == nb) break;
    }
  };

  std::vector<std::uint32_t> comp(t, 0);
  std::vector<double> c_o(B), d_oprime(B), b_o(B);
  for (std::size_t cc = 0; cc < comp_tuples; ++cc) {
    std::size_t rem = cc;
    for (std::size_t j = 0; j < t; ++j) {
      comp[j] = static_cast<std::uint32_t>(rem % emb.n_comp);
      rem /= emb.n_comp;
    }
    for (std::size_t p = 0; p < B; ++p) {
      double s = 0.0;
      for_each_in_block_tuple(lat[p], comp, [&](std::size_t idx) { s += v[idx]; });
      c_o[p] = s;
    }
    for (std::size_t q = 0; q < B; ++q) {
      double s = 0.0;
      for (std::size_t p = 0; p < B; ++p) s += static_cast<double>(kinv(q, p)) * c_o[p];
      d_oprime[q] = s / gram[q];
    }
    for (std::size_t p = 0; p < B; ++p) {
      double s = 0.0;
      for (std::size_t q = 0; q < B; ++q) s += d_oprime[q] * static_cast<double>(kinv(q, p));
      b_o[p] = s;
    }
    for (std::size_t p = 0; p < B; ++p) {
      if (b_o[p] == 0.0) continue;
      for_each_in_block_tuple(lat[p], comp, [&](std::size_t idx) { out[idx] += b_o[p]; });
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Orbit-averaging projectors.

/**
 * @brief Averages a vector over the classes of a partition of its index set.
 *
 * For a group acting by permutations of basis vectors, averaging over orbits
 * is the projector onto invariant vectors.
 */
class ClassProjector {
 public:
  ClassProjector() = default;
  ClassProjector(std::vector<std::uint32_t> class_of, std::size_t n_classes)
      : class_of_(std::move(class_of)), inv_size_(n_classes, 0.0) {
    std::vector<std::size_t> count(n_classes, 0);
    for (auto c : class_of_) ++count[c];
    for (std::size_t c = 0; c < n_classes; ++c) inv_size_[c] = count[c] ? 1.0 / static_cast<double>(count[c]) : 0.0;
    n_nonempty_ = static_cast<std::size_t>(std::count_if(count.begin(), count.end(), [](std::size_t k) { return k > 0; }));
  }

  std::size_t dim() const { return class_of_.size(); }
  /** Rank of the projector. */
  std::size_t rank() const { return n_nonempty_; }
  const std::vector<std::uint32_t>& class_of() const { return class_of_; }

  void apply(const double* in, double* out) const {
    std::vector<double> sums(inv_size_.size(), 0.0);
    for (std::size_t i = 0; i < class_of_.size(); ++i) sums[class_of_[i]] += in[i];
    for (std::size_t c = 0; c < sums.size(); ++c) sums[c] *= inv_size_[c];
    for (std::size_t i = 0; i < class_of_.size(); ++i) out[i] = sums[class_of_[i]];
  }

  std::vector<double> apply(const std::vector<double>& v) const {
    std::vector<double> out(v.size());
    apply(v.data(), out.data());
    return out;
  }

  /** True iff both induce the same partition of the index set. */
  bool same_classes(const ClassProjector& other) const {
    if (dim() != other.dim()) return false;
    std::unordered_map<std::uint32_t, std::uint32_t> fwd, bwd;
    for (std::size_t i = 0; i < dim(); ++i) {
      auto [a, ia] = fwd.emplace(class_of_[i], other.class_of_[i]);
      auto [b, ib] = bwd.emplace(other.class_of_[i], class_of_[i]);
      if (a->second != other.class_of_[i] || b->second != class_of_[i]) return false;
    }
    return true;
  }

 private:
  std::vector<std::uint32_t> class_of_;
  std::vector<double> inv_size_;
  std::size_t n_nonempty_ = 0;
};

/**
 * Projector for Sym(N_S) acting on the t-fold tensor power through an
 * embedding: tuples are grouped by spectator values and by the equality
 * pattern of their acted components.
 */
inline ClassProjector sym_projector(const CopyEmbedding& emb, std::size_t t) {
  const std::size_t dim = tensor_dim(emb.dim, t);
  if (emb.n_sub < t) throw ConfigError("sym_projector: requires N >= t");
  PartitionLattice lat(t);
  const std::size_t B = lat.size();
  const std::size_t comp_tuples = tensor_dim(emb.n_comp, t);
  if (comp_tuples * B > 0xffffffffULL) throw BudgetError("sym_projector: too many classes");
  std::uint32_t code_space = 1;
  for (std::size_t j = 0; j < t; ++j) code_space *= static_cast<std::uint32_t>(t);
  std::vector<std::uint32_t> code_to_index(code_space, 0);
  for (std::size_t p = 0; p < B; ++p) code_to_index[lat[p].code()] = static_cast<std::uint32_t>(p);

  std::vector<std::uint32_t> class_of(dim);
  std::vector<std::uint32_t> sub(t), labels(t);
  for (std::size_t i = 0; i < dim; ++i) {
    std::size_t rem = i;
    std::uint64_t comp_code = 0, comp_pow = 1;
    for (std::size_t j = 0; j < t; ++j) {
      std::uint32_t x = static_cast<std::uint32_t>(rem % emb.dim);
      rem /= emb.dim;
      sub[j] = emb.sub_of[x];
      comp_code += comp_pow * emb.comp_of[x];
      comp_pow *= emb.n_comp;
    }
    std::uint32_t code = 0, next = 0;
    for (std::size_t j = 0; j < t; ++j) {
      std::uint32_t lab = next;
      for (std::size_t k = 0; k < j; ++k) {
        if (sub[k] == sub[j]) {
          lab = labels[k];
          break;
        }
      }
      if (lab == next) ++next;
      labels[j] = lab;
      code = code * static_cast<std::uint32_t>(t) + lab;
    }
    class_of[i] = static_cast<std::uint32_t>(comp_code * B + code_to_index[code]);
  }
  return ClassProjector(std::move(class_of), comp_tuples * B);
}

/**
 * Projector for the group generated by `generators` (permutations of [D])
 * acting diagonally on the t-fold tensor power: orbits by union-find.
 */
inline ClassProjector orbit_projector(std::uint32_t D, std::size_t t, const std::vector<Permutation>& generators) {
  const std::size_t dim = tensor_dim(D, t);
  for (const auto& g : generators) {
    if (g.size() != D) throw ConfigError("orbit_projector: generator acts on wrong point count");
  }
  std::vector<std::uint32_t> parent(dim);
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  std::vector<std::uint64_t> pow_d(t, 1);
  for (std::size_t j = 1; j < t; ++j) pow_d[j] = pow_d[j - 1] * D;
  for (const auto& g : generators) {
    for (std::size_t i = 0; i < dim; ++i) {
      std::size_t rem = i;
      std::uint64_t img = 0;
      for (std::size_t j = 0; j < t; ++j) {
        img += std::uint64_t{g[rem % D]} * pow_d[j];
        rem /= D;
      }
      std::uint32_t a = find(static_cast<std::uint32_t>(i)), b = find(static_cast<std::uint32_t>(img));
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::vector<std::uint32_t> class_of(dim);
  std::vector<std::uint32_t> dense(dim, 0xffffffffu);
  std::uint32_t next = 0;
  for (std::size_t i = 0; i < dim; ++i) {
    std::uint32_t r = find(static_cast<std::uint32_t>(i));
    if (dense[r] == 0xffffffffu) dense[r] = next++;
    class_of[i] = dense[r];
  }
  return ClassProjector(std::move(class_of), next);
}

/** Generators of Alt on the listed points: 3-cycles (p0 p1 pi). */
inline std::vector<Permutation> alt_generators(std::uint32_t D, const std::vector<std::uint32_t>& points) {
  std::vector<Permutation> gens;
  for (std::size_t i = 2; i < points.size(); ++i) {
    std::vector<std::uint32_t> img(D);
    std::iota(img.begin(), img.end(), 0u);
    img[points[0]] = points[1];
    img[points[1]] = points[i];
    img[points[i]] = points[0];
    gens.push_back(Permutation::from_images(std::move(img)));
  }
  return gens;
}

/** Generators of Sym on the listed points: transpositions (p0 pi). */
inline std::vector<Permutation> sym_generators(std::uint32_t D, const std::vector<std::uint32_t>& points) {
  std::vector<Permutation> gens;
  for (std::size_t i = 1; i < points.size(); ++i) {
    std::vector<std::uint32_t> img(D);
    std::iota(img.begin(), img.end(), 0u);
    std::swap(img[points[0]], img[points[i]]);
    gens.push_back(Permutation::from_images(std::move(img)));
  }
  return gens;
}

}  // namespace sgl
