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
#include <iomanip>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sgl/circuit.hpp"
#include "sgl/errors.hpp"
#include "sgl/partition.hpp"
#include "sgl/permutation.hpp"

namespace sgl {

/**
 * @brief Moment operator of one distribution on a fixed tensor space.
 *
 * apply(in, out, transpose) writes M v or M^T v.
 */
class MomentLeaf {
 public:
  virtual ~MomentLeaf() = default;
  virtual std::size_t dim() const = 0;
  virtual void apply(const double* in, double* out, bool transpose) const = 0;
  virtual bool self_adjoint() const = 0;
  virtual std::string describe() const = 0;
};

/** Haar average over a subgroup, realized as an orbit-averaging projector. */
class ProjectorLeaf : public MomentLeaf {
 public:
  ProjectorLeaf(ClassProjector p, std::string label) : p_(std::move(p)), label_(std::move(label)) {}
  std::size_t dim() const override { return p_.dim(); }
  void apply(const double* in, double* out, bool) const override { p_.apply(in, out); }
  bool self_adjoint() const override { return true; }
  std::string describe() const override { return label_; }
  const ClassProjector& projector() const { return p_; }

 private:
  ClassProjector p_;
  std::string label_;
};

/** Finite distribution over permutations of [D], lifted to t tensor copies. */
class PermutationLeaf : public MomentLeaf {
 public:
  PermutationLeaf(std::uint32_t points, std::size_t t, std::vector<double> weights, std::vector<Permutation> perms,
                  std::string label)
      : D_(points), t_(t), dim_(tensor_dim(points, t)), w_(std::move(weights)), perms_(std::move(perms)),
        label_(std::move(label)) {
    if (w_.size() != perms_.size() || perms_.empty()) throw ConfigError("PermutationLeaf: weights and elements differ");
    double total = 0.0;
    for (std::size_t i = 0; i < perms_.size(); ++i) {
      if (perms_[i].size() != D_) throw ConfigError("PermutationLeaf: element acts on wrong point count");
      if (w_[i] < 0) throw ConfigError("PermutationLeaf: negative weight");
      total += w_[i];
    }
    if (std::abs(total - 1.0) > 1e-12) throw ConfigError("PermutationLeaf: weights must sum to 1");
    for (const auto& p : perms_) inverses_.push_back(inverse(p));
    self_adjoint_ = true;
    for (std::size_t i = 0; i < perms_.size() && self_adjoint_; ++i) {
      double mass = 0.0;
      for (std::size_t j = 0; j < perms_.size(); ++j) {
        if (perms_[j] == inverses_[i]) mass += w_[j];
      }
      double own = 0.0;
      for (std::size_t j = 0; j < perms_.size(); ++j) {
        if (perms_[j] == perms_[i]) own += w_[j];
      }
      self_adjoint_ = std::abs(mass - own) < 1e-12;
    }
  }

  std::size_t dim() const override { return dim_; }

  // (P(pi)^{(x)t} v)[pi(m)] = v[m]; the transpose uses the inverse.
  void apply(const double* in, double* out, bool transpose) const override {
    std::fill(out, out + dim_, 0.0);
    std::vector<std::uint32_t> digits(t_);
    for (std::size_t k = 0; k < perms_.size(); ++k) {
      const Permutation& p = transpose ? inverses_[k] : perms_[k];
      const double w = w_[k];
      for (std::size_t i = 0; i < dim_; ++i) {
        std::size_t rem = i, img = 0, pw = 1;
        for (std::size_t j = 0; j < t_; ++j) {
          img += pw * p[rem % D_];
          rem /= D_;
          pw *= D_;
        }
        out[img] += w * in[i];
      }
    }
  }

  bool self_adjoint() const override { return self_adjoint_; }
  std::string describe() const override { return label_; }

 private:
  std::uint32_t D_;
  std::size_t t_;
  std::size_t dim_;
  std::vector<double> w_;
  std::vector<Permutation> perms_;
  std::vector<Permutation> inverses_;
  bool self_adjoint_ = false;
  std::string label_;
};

/** Leaf given by explicit matvec callbacks (used by the quantum moments). */
class FunctionLeaf : public MomentLeaf {
 public:
  using Fn = std::function<void(const double*, double*, bool)>;
  FunctionLeaf(std::size_t dim, Fn fn, bool self_adjoint, std::string label)
      : dim_(dim), fn_(std::move(fn)), self_adjoint_(self_adjoint), label_(std::move(label)) {}
  std::size_t dim() const override { return dim_; }
  void apply(const double* in, double* out, bool transpose) const override { fn_(in, out, transpose); }
  bool self_adjoint() const override { return self_adjoint_; }
  std::string describe() const override { return label_; }

 private:
  std::size_t dim_;
  Fn fn_;
  bool self_adjoint_;
  std::string label_;
};

/**
 * @brief Expression tree over distributions: leaves, convex mixtures and
 * convolutions.
 *
 * convolve({c0, c1, ..., ck}) has moment operator M(c0) M(c1) ... M(ck):
 * the last child acts first.
 */
class EnsembleExpr {
 public:
  enum class Kind { leaf, mix, convolve };

  static EnsembleExpr leaf(std::shared_ptr<const MomentLeaf> l) {
    EnsembleExpr e;
    e.kind_ = Kind::leaf;
    e.dim_ = l->dim();
    e.leaf_ = std::move(l);
    return e;
  }

  static EnsembleExpr mix(std::vector<double> weights, std::vector<EnsembleExpr> children) {
    if (weights.size() != children.size() || children.empty()) throw ConfigError("mix: weights and children differ");
    double total = 0.0;
    for (double w : weights) {
      if (w < 0) throw ConfigError("mix: negative weight");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ConfigError("mix: weights must sum to 1");
    EnsembleExpr e;
    e.kind_ = Kind::mix;
    e.dim_ = children.front().dim();
    for (const auto& c : children) {
      if (c.dim() != e.dim_) throw ConfigError("mix: children act on different spaces");
    }
    e.weights_ = std::move(weights);
    e.children_ = std::move(children);
    return e;
  }

  static EnsembleExpr uniform_mix(std::vector<EnsembleExpr> children) {
    std::vector<double> w(children.size(), 1.0 / static_cast<double>(children.size()));
    return mix(std::move(w), std::move(children));
  }

  static EnsembleExpr convolve(std::vector<EnsembleExpr> children) {
    if (children.empty()) throw ConfigError("convolve: no children");
    EnsembleExpr e;
    e.kind_ = Kind::convolve;
    e.dim_ = children.front().dim();
    for (const auto& c : children) {
      if (c.dim() != e.dim_) throw ConfigError("convolve: children act on different spaces");
    }
    e.children_ = std::move(children);
    return e;
  }

  /** k-fold convolution power. */
  static EnsembleExpr power(const EnsembleExpr& base, std::size_t k) {
    if (k == 0) throw ConfigError("power: exponent must be positive");
    return convolve(std::vector<EnsembleExpr>(k, base));
  }

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  const std::vector<EnsembleExpr>& children() const { return children_; }

  void apply(const double* in, double* out, bool transpose = false) const {
    switch (kind_) {
      case Kind::leaf:
        leaf_->apply(in, out, transpose);
        return;
      case Kind::mix: {
        std::fill(out, out + dim_, 0.0);
        std::vector<double> tmp(dim_);
        for (std::size_t c = 0; c < children_.size(); ++c) {
          if (weights_[c] == 0.0) continue;
          children_[c].apply(in, tmp.data(), transpose);
          for (std::size_t i = 0; i < dim_; ++i) out[i] += weights_[c] * tmp[i];
        }
        return;
      }
      case Kind::convolve: {
        std::vector<double> cur(in, in + dim_), next(dim_);
        const std::size_t k = children_.size();
        for (std::size_t s = 0; s < k; ++s) {
          // M = M0 ... Mk-1 applies Mk-1 first; M^T = Mk-1^T ... M0^T applies M0^T first.
          const auto& child = transpose ? children_[s] : children_[k - 1 - s];
          child.apply(cur.data(), next.data(), transpose);
          std::swap(cur, next);
        }
        std::copy(cur.begin(), cur.end(), out);
        return;
      }
    }
  }

  std::vector<double> apply(const std::vector<double>& v, bool transpose = false) const {
    std::vector<double> out(dim_);
    apply(v.data(), out.data(), transpose);
    return out;
  }

  /** Structural self-adjointness: leaves, mixtures thereof, and palindromic convolutions. */
  bool self_adjoint() const {
    switch (kind_) {
      case Kind::leaf:
        return leaf_->self_adjoint();
      case Kind::mix:
        return std::all_of(children_.begin(), children_.end(), [](const EnsembleExpr& c) { return c.self_adjoint(); });
      case Kind::convolve: {
        const std::size_t k = children_.size();
        for (std::size_t i = 0; i < k; ++i) {
          if (!children_[i].self_adjoint()) return false;
          if (children_[i].describe() != children_[k - 1 - i].describe()) return false;
        }
        return true;
      }
    }
    return false;
  }

  std::string describe() const {
    switch (kind_) {
      case Kind::leaf:
        return leaf_->describe();
      case Kind::mix: {
        std::ostringstream os;
        os << "Mix(";
        for (std::size_t c = 0; c < children_.size(); ++c) {
          os << (c ? "," : "") << std::setprecision(17) << weights_[c] << ':' << children_[c].describe();
        }
        os << ')';
        return os.str();
      }
      case Kind::convolve: {
        std::ostringstream os;
        os << "Convolve(";
        for (std::size_t c = 0; c < children_.size(); ++c) os << (c ? "," : "") << children_[c].describe();
        os << ')';
        return os.str();
      }
    }
    return {};
  }

  /** 64-bit FNV-1a of describe(), as 16 hex digits. */
  std::string hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : describe()) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
  }

 private:
  Kind kind_ = Kind::leaf;
  std::size_t dim_ = 0;
  std::shared_ptr<const MomentLeaf> leaf_;
  std::vector<double> weights_;
  std::vector<EnsembleExpr> children_;
};

// ---------------------------------------------------------------------------
// Permutation ensembles on n-bit strings, t tensor copies.

namespace ensembles {

inline std::string bits_label(const std::vector<std::uint32_t>& bits) {
  std::ostringstream os;
  for (std::size_t i = 0; i < bits.size(); ++i) os << (i ? "," : "") << bits[i];
  return os.str();
}

/** Haar measure of Sym(2^|S|) acting on the bits in S. */
inline EnsembleExpr sym_on_bits(std::uint32_t n, std::size_t t, const std::vector<std::uint32_t>& bits) {
  auto p = sym_projector(CopyEmbedding::bits(n, bits), t);
  return EnsembleExpr::leaf(std::make_shared<ProjectorLeaf>(std::move(p), "Sym[" + bits_label(bits) + "]"));
}

/** Single-copy Sym(2^|S|) projector on the bits in S, without tables. */
inline EnsembleExpr sym_on_bits_single_copy(std::uint32_t n, const std::vector<std::uint32_t>& bits) {
  if (n > 30) throw BudgetError("sym_on_bits_single_copy: n must be at most 30");
  std::uint64_t mask = 0;
  for (auto b : bits) {
    if (b >= n || (mask >> b & 1u)) throw ConfigError("sym_on_bits_single_copy: bad bit subset");
    mask |= std::uint64_t{1} << b;
  }
  const std::size_t dim = std::size_t{1} << n;
  const double inv = 1.0 / static_cast<double>(std::uint64_t{1} << bits.size());
  auto fn = [dim, mask, inv](const double* in, double* out, bool) {
    // Enumerate subsets of the mask for each base point with the S bits cleared.
    for (std::size_t base = 0; base < dim; ++base) {
      if (base & mask) continue;
      double s = 0.0;
      std::uint64_t sub = 0;
      do {
        s += in[base | sub];
        sub = (sub - mask) & mask;
      } while (sub != 0);
      s *= inv;
      sub = 0;
      do {
        out[base | sub] = s;
        sub = (sub - mask) & mask;
      } while (sub != 0);
    }
  };
  return EnsembleExpr::leaf(std::make_shared<FunctionLeaf>(dim, fn, true, "Sym1[" + bits_label(bits) + "]"));
}

/**
 * Haar measure of Alt(2^|S|) on the bits in S. Equal to the Sym projector
 * for t <= 2^|S| - 2; otherwise built from the orbits of 3-cycles.
 */
inline EnsembleExpr alt_on_bits(std::uint32_t n, std::size_t t, const std::vector<std::uint32_t>& bits) {
  const std::string label = "Alt[" + bits_label(bits) + "]";
  const std::uint64_t ns = std::uint64_t{1} << bits.size();
  if (t + 2 <= ns) {
    return EnsembleExpr::leaf(std::make_shared<ProjectorLeaf>(sym_projector(CopyEmbedding::bits(n, bits), t), label));
  }
  CopyEmbedding emb = CopyEmbedding::bits(n, bits);
  std::vector<Permutation> gens;
  for (std::uint32_t i = 2; i < emb.n_sub; ++i) {
    std::vector<std::uint32_t> img(emb.dim);
    for (std::uint32_t x = 0; x < emb.dim; ++x) {
      std::uint32_t s = emb.sub_of[x], c = emb.comp_of[x];
      std::uint32_t s2 = (s == 0) ? 1 : (s == 1) ? i : (s == i) ? 0 : s;
      img[x] = emb.point_of[s2 + emb.n_sub * c];
    }
    gens.push_back(Permutation::from_images(std::move(img)));
  }
  return EnsembleExpr::leaf(std::make_shared<ProjectorLeaf>(orbit_projector(emb.dim, t, gens), label));
}

/** Haar measure of the full Sym(N) on [N]. */
inline EnsembleExpr sym_full(std::uint32_t points, std::size_t t) {
  return EnsembleExpr::leaf(
      std::make_shared<ProjectorLeaf>(sym_projector(CopyEmbedding::full(points), t), "Sym(" + std::to_string(points) + ")"));
}

/** Haar measure of Alt on a subset K of [D], fixing every other point. */
inline EnsembleExpr alt_on_points(std::uint32_t D, std::size_t t, const std::vector<std::uint32_t>& points,
                                  const std::string& label) {
  return EnsembleExpr::leaf(
      std::make_shared<ProjectorLeaf>(orbit_projector(D, t, alt_generators(D, points)), "Alt{" + label + "}"));
}

/** Uniform bit-flip group {I, X}^n. */
inline EnsembleExpr bitflips(std::uint32_t n, std::size_t t) {
  std::vector<Permutation> gens;
  const std::uint32_t D = 1u << n;
  for (std::uint32_t b = 0; b < n; ++b) {
    std::vector<std::uint32_t> img(D);
    for (std::uint32_t x = 0; x < D; ++x) img[x] = x ^ (1u << b);
    gens.push_back(Permutation::from_images(std::move(img)));
  }
  return EnsembleExpr::leaf(std::make_shared<ProjectorLeaf>(orbit_projector(D, t, gens), "BitFlips"));
}

/** Permutation of [2^n] induced by permuting bit positions: bit b moves to position perm[b]. */
inline Permutation bit_position_permutation(std::uint32_t n, const std::vector<std::uint32_t>& perm) {
  const std::uint32_t D = 1u << n;
  std::vector<std::uint32_t> img(D);
  for (std::uint32_t x = 0; x < D; ++x) {
    std::uint32_t y = 0;
    for (std::uint32_t b = 0; b < n; ++b) y |= ((x >> b) & 1u) << perm[b];
    img[x] = y;
  }
  return Permutation::from_images(std::move(img));
}

inline Permutation bit_swap_permutation(std::uint32_t n, std::uint32_t i, std::uint32_t j) {
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  std::swap(perm[i], perm[j]);
  return bit_position_permutation(n, perm);
}

/** Haar measure of all permutations of the n bit positions. */
inline EnsembleExpr qubit_permutations(std::uint32_t n, std::size_t t) {
  std::vector<Permutation> gens;
  for (std::uint32_t i = 0; i + 1 < n; ++i) gens.push_back(bit_swap_permutation(n, i, i + 1));
  return EnsembleExpr::leaf(std::make_shared<ProjectorLeaf>(orbit_projector(1u << n, t, gens), "QubitPerms"));
}

/** Uniform over the bit-position swaps along the edges of T. */
inline EnsembleExpr swap_set(const ArchGraph& T, std::size_t t) {
  std::vector<Permutation> perms;
  std::ostringstream label;
  label << "SwapSet(";
  for (auto [i, j] : T.edges) {
    perms.push_back(bit_swap_permutation(T.n, i, j));
    label << i << '-' << j << ';';
  }
  label << ')';
  std::vector<double> w(perms.size(), 1.0 / static_cast<double>(perms.size()));
  return EnsembleExpr::leaf(std::make_shared<PermutationLeaf>(1u << T.n, t, std::move(w), std::move(perms), label.str()));
}

/** Finite distribution over explicit permutations of [D]. */
inline EnsembleExpr finite_support(std::uint32_t D, std::size_t t, std::vector<double> weights,
                                   std::vector<Permutation> perms, const std::string& label) {
  return EnsembleExpr::leaf(std::make_shared<PermutationLeaf>(D, t, std::move(weights), std::move(perms), label));
}

/** Uniform 3-subset of bits, then a Haar Sym(8) element on those bits. */
inline EnsembleExpr rev_all_to_all(std::uint32_t n, std::size_t t) {
  if (n < 4) throw ConfigError("rev_all_to_all: n must be at least 4");
  std::vector<EnsembleExpr> leaves;
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = i + 1; j < n; ++j)
      for (std::uint32_t k = j + 1; k < n; ++k) leaves.push_back(sym_on_bits(n, t, {i, j, k}));
  return EnsembleExpr::uniform_mix(std::move(leaves));
}

/** Uniform admissible ordered triple of the architecture, then Haar Sym(8) on it. */
inline EnsembleExpr rev_arch(const ArchGraph& T, std::size_t t) {
  auto triples = T.admissible_triples();
  if (triples.empty() || !T.connected()) throw ConfigError("rev_arch: no admissible triple");
  std::vector<std::array<std::uint32_t, 3>> sets;
  std::vector<double> weights;
  for (auto tr : triples) {
    std::sort(tr.begin(), tr.end());
    auto it = std::find(sets.begin(), sets.end(), tr);
    if (it == sets.end()) {
      sets.push_back(tr);
      weights.push_back(1.0);
    } else {
      weights[static_cast<std::size_t>(it - sets.begin())] += 1.0;
    }
  }
  std::vector<EnsembleExpr> leaves;
  for (const auto& s : sets) leaves.push_back(sym_on_bits(T.n, t, {s[0], s[1], s[2]}));
  for (auto& w : weights) w /= static_cast<double>(triples.size());
  return EnsembleExpr::mix(std::move(weights), std::move(leaves));
}

}  // namespace ensembles

}  // namespace sgl
