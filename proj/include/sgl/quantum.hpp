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
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

#include "sgl/ensemble.hpp"
#include "sgl/errors.hpp"
#include "sgl/gap.hpp"
#include "sgl/linalg.hpp"
#include "sgl/parallel.hpp"
#include "sgl/partition.hpp"
#include "sgl/permutation.hpp"

// Moment operators of unitary ensembles act on the doubled space of
// (U ⊗ conj(U))^{⊗t}: 2t copies of an n-qubit string in copy-major order,
// index sum_k x_k 2^{nk}. Copies 0..t-1 carry U, copies t..2t-1 carry conj(U).

namespace sgl {

namespace detail {

inline std::vector<Permutation> all_permutations(std::size_t t) {
  std::vector<Permutation> out;
  std::uint64_t f = 1;
  for (std::size_t i = 2; i <= t; ++i) f *= i;
  for (std::uint64_t r = 0; r < f; ++r) out.push_back(permutation_from_lex_rank(static_cast<std::uint32_t>(t), r));
  return out;
}

inline std::size_t cycle_count(const Permutation& p) { return cycle_type(p).size(); }

/** Inverse of a small rational matrix by Gauss-Jordan elimination. */
inline std::vector<std::vector<BigRational>> rational_inverse(std::vector<std::vector<BigRational>> a) {
  const std::size_t n = a.size();
  std::vector<std::vector<BigRational>> inv(n, std::vector<BigRational>(n, BigRational(0)));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && a[piv][c] == 0) ++piv;
    if (piv == n) throw ConfigError("rational_inverse: singular Gram matrix");
    std::swap(a[piv], a[c]);
    std::swap(inv[piv], inv[c]);
    BigRational s = a[c][c];
    for (std::size_t j = 0; j < n; ++j) {
      a[c][j] /= s;
      inv[c][j] /= s;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      BigRational f = a[r][c];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[c][j];
        inv[r][j] -= f * inv[c][j];
      }
    }
  }
  return inv;
}

}  // namespace detail

/**
 * @brief t-th moment projector of the Haar measure on U(d), as the
 * orthogonal projector onto the span of vectorized permutation operators.
 *
 * Local index sum_k i_k d^k over the 2t copies. vec(sigma) is the indicator
 * of tuples with i_{t+k} = i_{sigma(k)}.
 */
class HaarProjector {
 public:
  HaarProjector(std::uint64_t d, std::size_t t) : d_(d), t_(t) {
    if (t < 1 || t > 3) throw ConfigError("haar_projector: t must be in [1, 3]");
    if (d < 2) throw ConfigError("haar_projector: d must be at least 2");
    if (t > d) throw ConfigError("haar_projector: permutation operators are dependent for t > d");
    std::uint64_t local = 1;
    for (std::size_t k = 0; k < 2 * t; ++k) {
      if (local > (std::uint64_t{1} << 32) / d) throw BudgetError("haar_projector: d^(2t) too large");
      local *= d;
    }
    local_dim_ = local;
    perms_ = detail::all_permutations(t);
    const std::size_t m = perms_.size();
    gram_.assign(m, std::vector<BigInt>(m));
    std::vector<std::vector<BigRational>> g(m, std::vector<BigRational>(m));
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < m; ++b) {
        BigInt v = 1;
        std::size_t cyc = detail::cycle_count(compose(inverse(perms_[a]), perms_[b]));
        for (std::size_t c = 0; c < cyc; ++c) v *= d;
        gram_[a][b] = v;
        g[a][b] = BigRational(v);
      }
    }
    weingarten_ = detail::rational_inverse(std::move(g));
    w_.assign(m * m, 0.0);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) w_[a * m + b] = static_cast<double>(weingarten_[a][b]);
    // Supports.
    std::uint64_t dt = 1;
    for (std::size_t k = 0; k < t; ++k) dt *= d;
    support_.assign(m, std::vector<std::uint32_t>(dt));
    std::vector<std::uint64_t> digits(t);
    for (std::size_t a = 0; a < m; ++a) {
      for (std::uint64_t i = 0; i < dt; ++i) {
        std::uint64_t r = i;
        for (std::size_t k = 0; k < t; ++k) {
          digits[k] = r % d;
          r /= d;
        }
        std::uint64_t idx = 0, pw = 1;
        for (std::size_t k = 0; k < t; ++k, pw *= d) idx += digits[k] * pw;
        for (std::size_t k = 0; k < t; ++k, pw *= d) idx += digits[perms_[a][static_cast<std::uint32_t>(k)]] * pw;
        support_[a][i] = static_cast<std::uint32_t>(idx);
      }
    }
  }

  std::uint64_t d() const { return d_; }
  std::size_t t() const { return t_; }
  std::uint64_t local_dim() const { return local_dim_; }
  std::size_t rank() const { return perms_.size(); }
  const std::vector<Permutation>& permutations() const { return perms_; }
  const std::vector<std::vector<BigInt>>& gram() const { return gram_; }
  const std::vector<std::vector<BigRational>>& weingarten() const { return weingarten_; }
  const std::vector<std::vector<std::uint32_t>>& supports() const { return support_; }

  /** Exact trace sum_{ab} W_ab G_ba. */
  BigRational exact_trace() const {
    BigRational tr = 0;
    for (std::size_t a = 0; a < rank(); ++a)
      for (std::size_t b = 0; b < rank(); ++b) tr += weingarten_[a][b] * BigRational(gram_[b][a]);
    return tr;
  }

  /**
   * Applies P to the local block at `base`, with offsets mapping local
   * indices to global ones. `coef` must hold 2 * rank() doubles.
   */
  void apply_block(const double* in, double* out, std::size_t base, const std::vector<std::size_t>& offset,
                   double* coef) const {
    const std::size_t m = rank();
    double* c = coef;
    double* a = coef + m;
    for (std::size_t s = 0; s < m; ++s) {
      double acc = 0.0;
      for (auto L : support_[s]) acc += in[base + offset[L]];
      c[s] = acc;
    }
    for (std::size_t s = 0; s < m; ++s) {
      double acc = 0.0;
      for (std::size_t r = 0; r < m; ++r) acc += w_[s * m + r] * c[r];
      a[s] = acc;
    }
    for (std::size_t s = 0; s < m; ++s)
      for (auto L : support_[s]) out[base + offset[L]] = 0.0;
    for (std::size_t s = 0; s < m; ++s)
      for (auto L : support_[s]) out[base + offset[L]] += a[s];
  }

  /** Dense matrix; only for local dimension up to 4096. */
  Eigen::MatrixXd dense() const {
    if (local_dim_ > 4096) throw BudgetError("HaarProjector::dense: local dimension above 4096");
    const auto D = static_cast<Eigen::Index>(local_dim_);
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(D, D);
    const std::size_t m = rank();
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b)
        for (auto i : support_[a])
          for (auto j : support_[b]) P(i, j) += w_[a * m + b];
    return P;
  }

 private:
  std::uint64_t d_;
  std::size_t t_;
  std::uint64_t local_dim_ = 0;
  std::vector<Permutation> perms_;
  std::vector<std::vector<BigInt>> gram_;
  std::vector<std::vector<BigRational>> weingarten_;
  std::vector<double> w_;
  std::vector<std::vector<std::uint32_t>> support_;
};

inline HaarProjector haar_projector(std::uint64_t d, std::size_t t) {
  if (d != 2 && d != 4) throw ConfigError("haar_projector: d must be 2 or 4");
  return HaarProjector(d, t);
}

/** Doubled-space dimension 2^(2nt), checked against the budget. */
inline std::size_t doubled_dim(std::uint32_t n, std::size_t t, std::size_t budget = std::size_t{1} << 22) {
  if (n < 1 || t < 1 || std::uint64_t{2} * n * t > 40) throw BudgetError("doubled space: 4^(nt) exceeds the budget");
  std::size_t dim = std::size_t{1} << (2 * n * t);
  if (dim > budget) throw BudgetError("doubled space: 4^(nt) exceeds the budget");
  return dim;
}

/**
 * @brief Haar projector of U(2^|Q|) acting on a subset Q of the n qubits,
 * applied in place on the doubled space.
 */
class QubitHaarLeaf : public MomentLeaf {
 public:
  QubitHaarLeaf(std::uint32_t n, std::size_t t, std::vector<std::uint32_t> qubits, std::string label = {})
      : n_(n), t_(t), dim_(doubled_dim(n, t, std::size_t{1} << 24)), qubits_(std::move(qubits)) {
    const std::uint32_t q = static_cast<std::uint32_t>(qubits_.size());
    if (q < 1 || q > n) throw ConfigError("QubitHaarLeaf: bad qubit subset");
    for (std::size_t i = 0; i < q; ++i) {
      if (qubits_[i] >= n) throw ConfigError("QubitHaarLeaf: qubit out of range");
      for (std::size_t j = 0; j < i; ++j)
        if (qubits_[i] == qubits_[j]) throw ConfigError("QubitHaarLeaf: repeated qubit");
    }
    proj_ = std::make_shared<HaarProjector>(std::uint64_t{1} << q, t);
    offset_.resize(proj_->local_dim());
    mask_ = 0;
    for (std::size_t k = 0; k < 2 * t; ++k)
      for (auto b : qubits_) mask_ |= std::size_t{1} << (b + n * k);
    for (std::size_t L = 0; L < offset_.size(); ++L) {
      std::size_t g = 0;
      for (std::size_t k = 0; k < 2 * t; ++k) {
        std::size_t digit = (L >> (q * k)) & ((std::size_t{1} << q) - 1);
        for (std::uint32_t j = 0; j < q; ++j)
          if (digit >> j & 1u) g |= std::size_t{1} << (qubits_[j] + n * k);
      }
      offset_[L] = g;
    }
    if (label.empty()) label = "Haar[" + ensembles::bits_label(qubits_) + "]";
    label_ = std::move(label);
  }

  std::size_t dim() const override { return dim_; }
  bool self_adjoint() const override { return true; }
  std::string describe() const override { return label_; }
  const HaarProjector& projector() const { return *proj_; }

  void apply(const double* in, double* out, bool) const override {
    const std::size_t m = proj_->rank();
    const std::size_t blocks = dim_ >> (__builtin_popcountll(mask_));
    parallel_for(0, blocks, [&](std::size_t lo, std::size_t hi, unsigned) {
      std::vector<double> coef(2 * m);
      for (std::size_t b = lo; b < hi; ++b) {
        std::size_t base = deposit(b);
        // Entries outside every support are annihilated.
        for (std::size_t L = 0; L < offset_.size(); ++L) out[base + offset_[L]] = 0.0;
        proj_->apply_block(in, out, base, offset_, coef.data());
      }
    });
  }

 private:
  // Scatter the bits of b into the positions outside mask_.
  std::size_t deposit(std::size_t b) const {
    std::size_t r = 0;
    std::size_t bit = 0;
    for (std::size_t pos = 0; b >> bit; ++pos) {
      if (mask_ >> pos & 1u) continue;
      if (b >> bit & 1u) r |= std::size_t{1} << pos;
      ++bit;
    }
    return r;
  }

  std::uint32_t n_;
  std::size_t t_;
  std::size_t dim_;
  std::vector<std::uint32_t> qubits_;
  std::shared_ptr<HaarProjector> proj_;
  std::vector<std::size_t> offset_;
  std::size_t mask_ = 0;
  std::string label_;
};

namespace quantum {

inline EnsembleExpr pair_haar(std::uint32_t n, std::size_t t, std::uint32_t i, std::uint32_t j) {
  return EnsembleExpr::leaf(std::make_shared<QubitHaarLeaf>(n, t, std::vector<std::uint32_t>{i, j}));
}

/** Haar projector of U(2^n) on all qubits. */
inline std::shared_ptr<QubitHaarLeaf> global_haar(std::uint32_t n, std::size_t t) {
  std::vector<std::uint32_t> all(n);
  for (std::uint32_t i = 0; i < n; ++i) all[i] = i;
  return std::make_shared<QubitHaarLeaf>(n, t, all, "Haar(all)");
}

inline ProjectorFn global_reference(std::uint32_t n, std::size_t t) {
  auto g = global_haar(n, t);
  return [g](const double* in, double* out) { g->apply(in, out, false); };
}

enum class Boundary { open, periodic };

inline std::vector<std::pair<std::uint32_t, std::uint32_t>> chain_pairs(std::uint32_t n, Boundary b) {
  if (n < 2) throw ConfigError("chain: n must be at least 2");
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  for (std::uint32_t i = 0; i + 1 < n; ++i) out.emplace_back(i, i + 1);
  if (b == Boundary::periodic && n > 2) out.emplace_back(n - 1, 0);
  return out;
}

/** Local random quantum circuit step: uniform neighbouring pair on the ring. */
inline EnsembleExpr lrqc(std::uint32_t n, std::size_t t) {
  if (n < 3) throw ConfigError("lrqc: n must be at least 3");
  std::vector<EnsembleExpr> leaves;
  for (auto [i, j] : chain_pairs(n, Boundary::periodic)) leaves.push_back(pair_haar(n, t, i, j));
  return EnsembleExpr::uniform_mix(std::move(leaves));
}

/** One brickwork step: the pairs (0,1),(2,3),... then (1,2),...,(n-1,0). */
inline EnsembleExpr brickwork(std::uint32_t n, std::size_t t) {
  if (n < 4 || n % 2) throw ConfigError("brickwork: n must be even and at least 4");
  std::vector<EnsembleExpr> first, second;
  for (std::uint32_t i = 0; i < n; i += 2) first.push_back(pair_haar(n, t, i, i + 1));
  for (std::uint32_t i = 1; i < n; i += 2) second.push_back(pair_haar(n, t, i, (i + 1) % n));
  auto l1 = EnsembleExpr::convolve(std::move(first));
  auto l2 = EnsembleExpr::convolve(std::move(second));
  return EnsembleExpr::convolve({l2, l1});
}

/** Half mixture of the identity and Z on one qubit. */
inline EnsembleExpr nu_z(std::uint32_t n, std::size_t t, std::uint32_t qubit = 0) {
  const std::size_t dim = doubled_dim(n, t, std::size_t{1} << 24);
  if (qubit >= n) throw ConfigError("nu_z: qubit out of range");
  std::size_t mask = 0;
  for (std::size_t k = 0; k < 2 * t; ++k) mask |= std::size_t{1} << (qubit + n * k);
  auto fn = [dim, mask](const double* in, double* out, bool) {
    for (std::size_t x = 0; x < dim; ++x) out[x] = (__builtin_popcountll(x & mask) % 2 == 0) ? in[x] : 0.0;
  };
  return EnsembleExpr::leaf(std::make_shared<FunctionLeaf>(dim, fn, true, "NuZ[" + std::to_string(qubit) + "]"));
}

/** Permutation moment of Haar Sym(8) on three qubits, in the doubled space. */
inline EnsembleExpr triple_sym(std::uint32_t n, std::size_t t, std::array<std::uint32_t, 3> tr) {
  return ensembles::sym_on_bits(n, 2 * t, {tr[0], tr[1], tr[2]});
}

}  // namespace quantum

struct HamiltonianGap {
  double ground_energy = 0.0;
  double gap = 0.0;
  double residual = 0.0;
  bool converged = false;
  std::size_t iters = 0;
};

/** Applies H = sum over chain pairs of (1 - P_pair). */
inline MatVec hamiltonian_matvec(std::uint32_t n, std::size_t t, quantum::Boundary b) {
  auto pairs = quantum::chain_pairs(n, b);
  std::vector<std::shared_ptr<QubitHaarLeaf>> leaves;
  for (auto [i, j] : pairs) leaves.push_back(std::make_shared<QubitHaarLeaf>(n, t, std::vector<std::uint32_t>{i, j}));
  const std::size_t dim = doubled_dim(n, t);
  return [leaves, dim](const double* in, double* out) {
    std::vector<double> tmp(dim);
    for (std::size_t i = 0; i < dim; ++i) out[i] = static_cast<double>(leaves.size()) * in[i];
    for (const auto& l : leaves) {
      l->apply(in, tmp.data(), false);
      for (std::size_t i = 0; i < dim; ++i) out[i] -= tmp[i];
    }
  };
}

/**
 * Ground energy (smallest eigenvalue) and gap (smallest eigenvalue on the
 * complement of the Haar-invariant subspace, which is the ground space).
 */
inline HamiltonianGap hamiltonian_gap(std::uint32_t n, std::size_t t, quantum::Boundary b, const GapOptions& opts = {}) {
  const std::size_t dim = doubled_dim(n, t);
  MatVec H = hamiltonian_matvec(n, t, b);
  auto ref = quantum::global_reference(n, t);
  std::vector<double> scratch(dim);
  Deflation deflate = [&](double* v) {
    ref(v, scratch.data());
    for (std::size_t i = 0; i < dim; ++i) v[i] -= scratch[i];
  };
  SeededRng rng(opts.seed, 0x4a11);
  EigenOptions eo{opts.tol, opts.max_matvecs, opts.krylov};
  HamiltonianGap r;
  EigenResult g = lanczos_extreme(dim, H, false, nullptr, rng, eo);
  r.ground_energy = g.value;
  r.iters += g.matvecs;
  double best = 0.0, res = 0.0;
  bool conv = g.converged;
  for (std::size_t k = 0; k < std::max<std::size_t>(1, opts.restarts); ++k) {
    EigenResult e = lanczos_extreme(dim, H, false, deflate, rng, eo);
    r.iters += e.matvecs;
    conv = conv && e.converged;
    if (k == 0 || e.value < best) {
      best = e.value;
      res = e.residual;
    }
  }
  r.gap = best;
  r.residual = res;
  r.converged = conv;
  return r;
}

struct LrqcResult {
  GapReport report;
  double hamiltonian_gap = 0.0;
  /** |(1 - g) - gap(H_periodic) / n|. */
  double identity_error = 0.0;
};

inline LrqcResult lrqc_moment_norm(std::uint32_t n, std::size_t t, const GapOptions& opts = {}) {
  doubled_dim(n, t);
  LrqcResult r;
  r.report = essential_norm(quantum::lrqc(n, t), quantum::global_reference(n, t), opts);
  r.report.family = "quantum";
  r.report.n = n;
  r.report.t = t;
  r.hamiltonian_gap = hamiltonian_gap(n, t, quantum::Boundary::periodic, opts).gap;
  r.identity_error = std::abs(r.report.gap - r.hamiltonian_gap / n);
  return r;
}

struct BrickworkResult {
  GapReport report;
  double lrqc_norm = 0.0;
  /** 1 - (n/16)(1 - g(lrqc)). */
  double comparison_bound = 0.0;
  bool comparison_holds = false;
};

inline BrickworkResult brickwork_moment_norm(std::uint32_t n, std::size_t t, const GapOptions& opts = {}) {
  if (n % 2) throw ConfigError("brickwork_moment_norm: n must be even");
  doubled_dim(n, t);
  BrickworkResult r;
  r.report = essential_norm(quantum::brickwork(n, t), quantum::global_reference(n, t), opts);
  r.report.family = "quantum";
  r.report.n = n;
  r.report.t = t;
  r.lrqc_norm = essential_norm(quantum::lrqc(n, t), quantum::global_reference(n, t), opts).norm;
  r.comparison_bound = 1.0 - (static_cast<double>(n) / 16.0) * (1.0 - r.lrqc_norm);
  r.comparison_holds = r.report.norm <= r.comparison_bound + 1e-9;
  return r;
}

/**
 * B^{c2} K^{c1} nu_Z K^{c1} B^{c2}, with B one brickwork step and K the
 * product of Sym(8) projectors over the cyclic triples (i, i+1, i+2).
 * Round counts are used as exponents directly.
 */
inline EnsembleExpr composite_gq(std::uint32_t n, std::size_t t, std::size_t c1_rounds, std::size_t c2_rounds) {
  std::vector<EnsembleExpr> kblock;
  for (auto tr : consecutive_triples(n)) kblock.push_back(quantum::triple_sym(n, t, tr));
  auto K = EnsembleExpr::convolve(std::move(kblock));
  auto B = quantum::brickwork(n, t);
  std::vector<EnsembleExpr> seq;
  for (std::size_t i = 0; i < c2_rounds; ++i) seq.push_back(B);
  for (std::size_t i = 0; i < c1_rounds; ++i) seq.push_back(K);
  seq.push_back(quantum::nu_z(n, t));
  for (std::size_t i = 0; i < c1_rounds; ++i) seq.push_back(K);
  for (std::size_t i = 0; i < c2_rounds; ++i) seq.push_back(B);
  return EnsembleExpr::convolve(std::move(seq));
}

inline GapReport composite_gq_norm(std::uint32_t n, std::size_t t, std::size_t c1_rounds, std::size_t c2_rounds,
                                   const GapOptions& opts = {}) {
  if (n < 4 || n % 2 || std::uint64_t{n} * t > 8) throw BudgetError("composite_gq_norm: surrogate sizes are n = 4, t <= 2");
  GapReport r = essential_norm(composite_gq(n, t, c1_rounds, c2_rounds), quantum::global_reference(n, t), opts);
  r.family = "quantum";
  r.n = n;
  r.t = t;
  return r;
}

}  // namespace sgl
