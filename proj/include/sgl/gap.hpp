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
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

#include "json.hpp"
#include "sgl/circuit.hpp"
#include "sgl/ensemble.hpp"
#include "sgl/errors.hpp"
#include "sgl/linalg.hpp"
#include "sgl/partition.hpp"

namespace sgl {

using BigRational = boost::multiprecision::cpp_rational;

struct GapOptions {
  double tol = 1e-8;
  std::size_t max_matvecs = 100000;
  /** Independent random starts; the largest estimate is kept. */
  std::size_t restarts = 5;
  std::uint64_t seed = 0;
  std::size_t krylov = 0;
};

/**
 * @brief Essential norm estimate with convergence metadata.
 */
struct GapReport {
  std::string ensemble_hash;
  std::string family = "permutation";
  std::uint32_t n = 0;
  std::size_t t = 0;
  double norm = 0.0;
  double gap = 1.0;
  double residual = 0.0;
  std::size_t iters = 0;
  std::uint64_t seed = 0;
  double wall_time_ms = 0.0;
  double tol = 0.0;
  bool converged = false;
  std::string mode;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["ensemble_hash"] = ensemble_hash;
    j["n"] = n;
    j["t"] = t;
    j["norm"] = norm;
    j["gap"] = gap;
    j["residual"] = residual;
    j["iters"] = iters;
    j["seed"] = seed;
    j["wall_time_ms"] = wall_time_ms;
    j["tol"] = tol;
    j["converged"] = converged;
    j["mode"] = mode;
    j["rng"] = SeededRng::algorithm();
    if (family != "permutation") j["family"] = family;
    return j;
  }
};

using ProjectorFn = std::function<void(const double*, double*)>;

inline ProjectorFn as_projector_fn(const ClassProjector& p) {
  return [&p](const double* in, double* out) { p.apply(in, out); };
}

/**
 * @brief Largest singular value of M - P restricted to the complement of the
 * reference invariant subspace.
 *
 * Requires P M = M P = P, which holds whenever the ensemble is supported in
 * the reference group. Self-adjoint expressions use Lanczos on both spectrum
 * ends; others use Lanczos on the normal operator (M - P)^T (M - P).
 */
inline GapReport essential_norm(const EnsembleExpr& e, const ProjectorFn& reference, const GapOptions& opts = {}) {
  auto start = std::chrono::steady_clock::now();
  const std::size_t dim = e.dim();
  std::vector<double> scratch(dim);
  Deflation deflate = [&](double* v) {
    reference(v, scratch.data());
    for (std::size_t i = 0; i < dim; ++i) v[i] -= scratch[i];
  };
  GapReport rep;
  rep.ensemble_hash = e.hash();
  rep.seed = opts.seed;
  rep.tol = opts.tol;
  EigenOptions eo{opts.tol, opts.max_matvecs, opts.krylov};
  SeededRng rng(opts.seed, 0x6a70);
  bool all_converged = true;
  double best = 0.0, best_res = 0.0;
  if (e.self_adjoint()) {
    rep.mode = "lanczos-self-adjoint";
    MatVec op = [&](const double* in, double* out) { e.apply(in, out, false); };
    for (std::size_t r = 0; r < std::max<std::size_t>(1, opts.restarts); ++r) {
      for (bool largest : {true, false}) {
        EigenResult er = lanczos_extreme(dim, op, largest, deflate, rng, eo);
        rep.iters += er.matvecs;
        all_converged = all_converged && er.converged;
        if (std::abs(er.value) >= best) {
          best = std::abs(er.value);
          best_res = er.residual;
        }
      }
    }
  } else {
    rep.mode = "lanczos-normal-operator";
    std::vector<double> tmp(dim);
    MatVec op = [&](const double* in, double* out) {
      e.apply(in, tmp.data(), false);
      deflate(tmp.data());
      e.apply(tmp.data(), out, true);
    };
    for (std::size_t r = 0; r < std::max<std::size_t>(1, opts.restarts); ++r) {
      EigenResult er = lanczos_extreme(dim, op, true, deflate, rng, eo);
      rep.iters += er.matvecs;
      all_converged = all_converged && er.converged;
      double s = std::sqrt(std::max(0.0, er.value));
      if (s >= best) {
        best = s;
        best_res = er.residual;
      }
    }
  }
  rep.norm = best;
  rep.gap = 1.0 - best;
  rep.residual = best_res;
  rep.converged = all_converged;
  rep.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

inline GapReport essential_norm(const EnsembleExpr& e, const ClassProjector& reference, const GapOptions& opts = {}) {
  return essential_norm(e, as_projector_fn(reference), opts);
}

/** Essential norm against Alt(2^n) on n-bit strings (t <= 2^n - 2). */
inline GapReport essential_norm_alt(const EnsembleExpr& e, std::uint32_t n, std::size_t t, const GapOptions& opts = {}) {
  if (t + 2 > (std::size_t{1} << n)) throw ConfigError("Alt(2^n) reference requires t <= 2^n - 2");
  ClassProjector ref = sym_projector(CopyEmbedding::full(1u << n), t);
  GapReport r = essential_norm(e, ref, opts);
  r.n = n;
  r.t = t;
  return r;
}

// ---------------------------------------------------------------------------
// Exact quantities for random phase (diagonal sign) ensembles.

inline BigInt binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  BigInt r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r *= (n - k + i);
    r /= i;
  }
  return r;
}

struct PzpValue {
  BigRational value;
  BigRational bound;  // 8 t^2 / 2^n
};

/** max_{k=1..t} C(m,k) / C(2m,2k) with m = 2^(n-1), exactly. */
inline PzpValue pzp_exact(std::uint32_t n, std::uint32_t t) {
  if (n < 1 || t < 1 || n > 62) throw ConfigError("pzp_exact: need n in [1, 62] and t >= 1");
  const std::uint64_t m = std::uint64_t{1} << (n - 1);
  PzpValue out;
  out.value = 0;
  for (std::uint64_t k = 1; k <= std::min<std::uint64_t>(t, m); ++k) {
    BigRational v(binomial(m, k), binomial(2 * m, 2 * k));
    if (v > out.value) out.value = v;
  }
  out.bound = BigRational(BigInt(8) * t * t, BigInt(1) << n);
  return out;
}

/**
 * Brute force over all balanced Boolean functions on n bits: the largest
 * |E (-1)^{sum_j f(x_j)}| over point sets with an odd multiplicity, which
 * reduce to sets of 2k distinct points, k = 1..t.
 */
inline BigRational pzp_bruteforce(std::uint32_t n, std::uint32_t t) {
  if (n < 1 || n > 4) throw BudgetError("pzp_bruteforce: 2^n must be at most 16");
  const std::uint32_t N = 1u << n;
  const std::uint32_t full = (N == 32) ? 0xffffffffu : ((1u << N) - 1);
  std::vector<std::uint32_t> functions;
  for (std::uint32_t f = 0; f <= full; ++f) {
    if (static_cast<std::uint32_t>(__builtin_popcount(f)) == N / 2) functions.push_back(f);
    if (f == full) break;
  }
  BigRational best = 0;
  for (std::uint32_t X = 1; X <= full; ++X) {
    std::uint32_t size = static_cast<std::uint32_t>(__builtin_popcount(X));
    if (size % 2 != 0 || size > 2 * t) continue;
    std::int64_t signed_sum = 0;
    for (std::uint32_t f : functions) signed_sum += (__builtin_popcount(f & X) % 2 == 0) ? 1 : -1;
    BigRational v(BigInt(signed_sum < 0 ? -signed_sum : signed_sum), BigInt(functions.size()));
    if (v > best) best = v;
    if (X == full) break;
  }
  return best;
}

/**
 * sum_i C(m,i) C(m,2t-i) = C(2m,2t) and
 * sum_i (-1)^i C(m,i) C(m,2t-i) = (-1)^t C(m,t), exactly.
 */
inline bool vandermonde_identities_check(std::uint64_t m, std::uint64_t t) {
  if (m < 1 || t < 1) throw ConfigError("vandermonde_identities_check: m, t >= 1");
  BigInt plain = 0, alternating = 0;
  for (std::uint64_t i = 0; i <= 2 * t; ++i) {
    BigInt term = binomial(m, i) * binomial(m, 2 * t - i);
    plain += term;
    alternating += (i % 2 ? -term : term);
  }
  BigInt rhs2 = binomial(m, t);
  if (t % 2) rhs2 = -rhs2;
  return plain == binomial(2 * m, 2 * t) && alternating == rhs2;
}

// ---------------------------------------------------------------------------
// Overlapping permutations.

struct OverlapResult {
  double value = 0.0;
  /** (t log t + log |B|)^3 / sqrt(|B|), the scaling shape of the bound. */
  double bound_shape = 0.0;
  GapReport report;
};

/** || M_AB M_BC - M_ABC || for Sym projectors on A x B x C. */
inline OverlapResult overlap_norm(std::uint32_t a, std::uint32_t b, std::uint32_t c, std::size_t t,
                                  const GapOptions& opts = {}) {
  std::uint64_t dim = 1;
  for (std::size_t j = 0; j < t; ++j) dim *= std::uint64_t{a} * b * c;
  if (dim > (std::uint64_t{1} << 20)) throw BudgetError("overlap_norm: (abc)^t exceeds 2^20");
  if (std::uint64_t{a} * b < t || std::uint64_t{b} * c < t) throw ConfigError("overlap_norm: requires |AB|, |BC| >= t");
  auto ab = EnsembleExpr::leaf(std::make_shared<ProjectorLeaf>(sym_projector(CopyEmbedding::product(a, b, c, "ab"), t), "SymAB"));
  auto bc = EnsembleExpr::leaf(std::make_shared<ProjectorLeaf>(sym_projector(CopyEmbedding::product(a, b, c, "bc"), t), "SymBC"));
  ClassProjector abc = sym_projector(CopyEmbedding::product(a, b, c, "abc"), t);
  OverlapResult r;
  r.report = essential_norm(EnsembleExpr::convolve({ab, bc}), abc, opts);
  r.report.t = t;
  r.value = r.report.norm;
  double tl = static_cast<double>(t) * std::log(std::max<double>(static_cast<double>(t), 1.0)) + std::log(static_cast<double>(b));
  r.bound_shape = tl * tl * tl / std::sqrt(static_cast<double>(b));
  return r;
}

// ---------------------------------------------------------------------------
// Transposition walks.

/** Second-smallest eigenvalue of the graph Laplacian. */
inline double algebraic_connectivity(const ArchGraph& T) {
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(T.n, T.n);
  for (auto [i, j] : T.edges) {
    L(i, i) += 1;
    L(j, j) += 1;
    L(i, j) -= 1;
    L(j, i) -= 1;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
  return es.eigenvalues()(1);
}

struct CayleyGap {
  double alpha = 0.0;
  /** 1 - alpha / |T|. */
  double exact = 0.0;
  /** Essential norm of the swap walk against all bit-position permutations, when computed. */
  std::optional<double> witness;
};

/**
 * Essential norm of the uniform walk on the transpositions of T in the
 * bit-position representation, via the Laplacian spectrum. The witness is
 * computed for n <= witness_max_n on t tensor copies.
 */
inline CayleyGap swap_cayley_gap(const ArchGraph& T, std::size_t t, std::uint32_t witness_max_n = 6,
                                 const GapOptions& opts = {}) {
  if (!T.connected() || T.n < 2) throw ConfigError("swap_cayley_gap: T must be connected");
  CayleyGap g;
  g.alpha = algebraic_connectivity(T);
  g.exact = 1.0 - g.alpha / static_cast<double>(T.edges.size());
  if (T.n <= witness_max_n && std::uint64_t{T.n} * t <= 20) {
    auto walk = ensembles::swap_set(T, t);
    auto ref = ensembles::qubit_permutations(T.n, t);
    ProjectorFn pf = [&ref](const double* in, double* out) { ref.apply(in, out, false); };
    g.witness = essential_norm(walk, pf, opts).norm;
  }
  return g;
}

/** 1 - kappa^2 / (2 |S|). */
inline double kazhdan_gap_bound(double kappa, std::size_t set_size) {
  if (kappa < 0 || kappa > 2 || set_size < 1) throw ConfigError("kazhdan_gap_bound: kappa in [0,2], |S| >= 1");
  return 1.0 - kappa * kappa / (2.0 * static_cast<double>(set_size));
}

/** ceil(c (n t + ln(1/eps)) / delta). */
inline std::uint64_t design_length(double delta, std::uint32_t n, std::uint32_t t, double eps, double c) {
  if (!(delta > 0 && delta <= 1) || !(c > 0) || !(eps > 0)) throw ConfigError("design_length: need delta in (0,1], c > 0, eps > 0");
  double v = c * (static_cast<double>(n) * t + std::log(1.0 / eps)) / delta;
  return static_cast<std::uint64_t>(std::ceil(v - 1e-12));
}

// ---------------------------------------------------------------------------
// Projector inequalities.

struct DetectabilityResult {
  double lhs = 0.0;
  double union_lb = 0.0;
  double dl_ub = 0.0;
  bool ok = false;
};

/**
 * Checks 1 - 4<H> <= ||prod_i (1 - Q_i) psi||^2 <= 1 / (<H>/ell^2 + 1)
 * with H = sum_i Q_i; the product applies Q_0 first.
 */
inline DetectabilityResult detectability_check(const std::vector<Eigen::MatrixXd>& projectors, std::size_t ell,
                                               const Eigen::VectorXd& psi_in, double eps = 1e-10) {
  if (projectors.empty()) throw ConfigError("detectability_check: no projectors");
  if (ell < 1) throw ConfigError("detectability_check: ell must be at least 1");
  for (const auto& Q : projectors) {
    if ((Q * Q - Q).norm() > 1e-10 || (Q - Q.transpose()).norm() > 1e-10) {
      throw ConfigError("detectability_check: not an orthogonal projector");
    }
  }
  for (std::size_t i = 0; i < projectors.size(); ++i) {
    std::size_t noncommuting = 0;
    for (std::size_t j = 0; j < projectors.size(); ++j) {
      if (i == j) continue;
      const auto& A = projectors[i];
      const auto& B = projectors[j];
      if ((A * B - B * A).norm() > 1e-10) ++noncommuting;
    }
    if (noncommuting > ell) throw ConfigError("detectability_check: a projector fails to commute with more than ell others");
  }
  Eigen::VectorXd psi = psi_in.normalized();
  double h = 0.0;
  Eigen::VectorXd v = psi;
  for (const auto& Q : projectors) {
    h += psi.dot(Q * psi);
    v = v - Q * v;
  }
  DetectabilityResult r;
  r.lhs = v.squaredNorm();
  r.union_lb = 1.0 - 4.0 * h;
  r.dl_ub = 1.0 / (h / static_cast<double>(ell * ell) + 1.0);
  r.ok = r.union_lb <= r.lhs + eps && r.lhs <= r.dl_ub + eps;
  return r;
}

struct SandwichResult {
  /** Smallest eigenvalue of M(small) - M(big). */
  double min_eig_difference = 0.0;
  /** Smallest eigenvalue of M(big) - P on the complement of the invariant space. */
  double min_eig_big = 0.0;
  double g_small = 0.0;
  double g_big = 0.0;
  bool holds = false;
};

/**
 * 0 <= M(big) - P <= M(small) - P for averages of subgroup projectors where
 * each subgroup of `small` lies in the paired subgroup of `big`.
 */
inline SandwichResult subgroup_gap_sandwich(const EnsembleExpr& small, const EnsembleExpr& big, const ProjectorFn& reference,
                                            const GapOptions& opts = {}) {
  if (small.dim() != big.dim()) throw ConfigError("subgroup_gap_sandwich: pairing mismatch (dimensions differ)");
  if (!small.self_adjoint() || !big.self_adjoint()) throw ConfigError("subgroup_gap_sandwich: needs self-adjoint averages");
  const std::size_t dim = small.dim();
  std::vector<double> tmp(dim), scratch(dim);
  SeededRng rng(opts.seed, 0x5a4d);
  EigenOptions eo{opts.tol, opts.max_matvecs, opts.krylov};
  MatVec diff = [&](const double* in, double* out) {
    small.apply(in, out, false);
    big.apply(in, tmp.data(), false);
    for (std::size_t i = 0; i < dim; ++i) out[i] -= tmp[i];
  };
  Deflation deflate = [&](double* v) {
    reference(v, scratch.data());
    for (std::size_t i = 0; i < dim; ++i) v[i] -= scratch[i];
  };
  MatVec bigop = [&](const double* in, double* out) { big.apply(in, out, false); };
  SandwichResult r;
  r.min_eig_difference = lanczos_extreme(dim, diff, false, nullptr, rng, eo).value;
  r.min_eig_big = lanczos_extreme(dim, bigop, false, deflate, rng, eo).value;
  GapOptions o2 = opts;
  o2.restarts = 1;
  r.g_small = essential_norm(small, reference, o2).norm;
  r.g_big = essential_norm(big, reference, o2).norm;
  r.holds = r.min_eig_difference >= -1e-10 && r.min_eig_big >= -1e-10 && r.g_big <= r.g_small + 1e-8;
  return r;
}

// ---------------------------------------------------------------------------
// Auxiliary walk and bootstrap recursion.

/** Projectors onto Alt(2^(n-1)) acting on all bits except bit i. */
inline EnsembleExpr beta_walk(std::uint32_t n, std::size_t t) {
  std::vector<EnsembleExpr> q;
  for (std::uint32_t i = 0; i < n; ++i) {
    std::vector<std::uint32_t> bits;
    for (std::uint32_t b = 0; b < n; ++b)
      if (b != i) bits.push_back(b);
    q.push_back(ensembles::alt_on_bits(n, t, bits));
  }
  return EnsembleExpr::uniform_mix(std::move(q));
}

/** delta(n) = 1 - g(beta); the report carries g(beta). */
inline GapReport beta_delta(std::uint32_t n, std::size_t t, const GapOptions& opts = {}) {
  if (n < 2 || std::uint64_t{n} * t > 20) throw BudgetError("beta_delta: 2^(nt) must be at most 2^20");
  if (t + 2 > (std::size_t{1} << (n - 1))) throw ConfigError("beta_delta: requires t <= 2^(n-1) - 2");
  return essential_norm_alt(beta_walk(n, t), n, t, opts);
}

/** Uniform triple of bits with a Haar Sym(8) on it; n = 3 is the full group. */
inline EnsembleExpr rev_walk(std::uint32_t n, std::size_t t) {
  if (n == 3) return ensembles::sym_on_bits(3, t, {0, 1, 2});
  return ensembles::rev_all_to_all(n, t);
}

struct BootstrapResult {
  double delta_n = 0.0;       // 1 - g(beta) on n bits
  double gap_n = 0.0;         // 1 - g(rev walk) on n bits
  double gap_n_minus_1 = 0.0; // same on n - 1 bits
  bool holds = false;
};

/** Checks gap(n) >= delta(n) gap(n - 1). */
inline BootstrapResult bootstrap_check(std::uint32_t n, std::size_t t, const GapOptions& opts = {}) {
  if (n < 4) throw ConfigError("bootstrap_check: n must be at least 4");
  BootstrapResult r;
  r.delta_n = beta_delta(n, t, opts).gap;
  r.gap_n = essential_norm_alt(rev_walk(n, t), n, t, opts).gap;
  r.gap_n_minus_1 = essential_norm_alt(rev_walk(n - 1, t), n - 1, t, opts).gap;
  r.holds = r.gap_n >= r.delta_n * r.gap_n_minus_1 - 1e-9;
  return r;
}

// ---------------------------------------------------------------------------
// Bit-flip sandwich around an alternating group on a good set.

struct XSandwichResult {
  double norm = 0.0;
  BigRational bad_mass;
  std::optional<GapReport> report;
};

/**
 * || M_X M_K M_X - M_A || with M_X the bit-flip group, M_K the Haar
 * projector of Alt(K) fixing points outside K, and M_A that of Alt(2^n).
 */
inline XSandwichResult xsandwich_norm(const std::vector<bool>& good, std::uint32_t n, std::size_t t,
                                      const GapOptions& opts = {}) {
  if (good.size() != (std::size_t{1} << n)) throw ConfigError("xsandwich_norm: predicate size must be 2^n");
  std::vector<std::uint32_t> K;
  for (std::uint32_t x = 0; x < good.size(); ++x)
    if (good[x]) K.push_back(x);
  XSandwichResult r;
  r.bad_mass = BigRational(BigInt(good.size() - K.size()), BigInt(good.size()));
  if (t == 1) {
    // The bit-flip average is the rank-one uniform operator, which absorbs
    // any doubly stochastic middle factor.
    if (n > 24) throw BudgetError("xsandwich_norm: n must be at most 24");
    r.norm = 0.0;
    return r;
  }
  if (std::uint64_t{n} * t > 20) throw BudgetError("xsandwich_norm: 2^(nt) must be at most 2^20");
  if (K.size() < t + 2) throw ConfigError("xsandwich_norm: good set too small for t");
  auto X = ensembles::bitflips(n, t);
  auto MK = ensembles::alt_on_points(1u << n, t, K, "good set");
  r.report = essential_norm_alt(EnsembleExpr::convolve({X, MK, X}), n, t, opts);
  r.norm = r.report->norm;
  return r;
}

// ---------------------------------------------------------------------------
// Equality of low moments of Alt and Sym.

/** || avg_Alt P^t - avg_Sym P^t || via the orbits of each group on [N]^t. */
inline double alt_sym_equality_check(std::uint32_t N, std::size_t t, const GapOptions& opts = {}) {
  if (t + 2 > N) throw ConfigError("alt_sym_equality_check: requires t <= N - 2");
  std::vector<std::uint32_t> pts(N);
  std::iota(pts.begin(), pts.end(), 0u);
  ClassProjector alt = orbit_projector(N, t, alt_generators(N, pts));
  ClassProjector sym = orbit_projector(N, t, sym_generators(N, pts));
  if (alt.same_classes(sym)) return 0.0;
  const std::size_t dim = alt.dim();
  std::vector<double> tmp(dim);
  MatVec diff = [&](const double* in, double* out) {
    alt.apply(in, out);
    sym.apply(in, tmp.data());
    for (std::size_t i = 0; i < dim; ++i) out[i] -= tmp[i];
  };
  SeededRng rng(opts.seed, 0xa17);
  EigenOptions eo{opts.tol, opts.max_matvecs, opts.krylov};
  double hi = lanczos_extreme(dim, diff, true, nullptr, rng, eo).value;
  double lo = lanczos_extreme(dim, diff, false, nullptr, rng, eo).value;
  return std::max(std::abs(hi), std::abs(lo));
}

// ---------------------------------------------------------------------------
// Mixtures of Sym(8) projectors over explicit triple collections.

/** Cyclic consecutive triples {i, i+1, i+2 mod n}. */
inline std::vector<std::array<std::uint32_t, 3>> consecutive_triples(std::uint32_t n) {
  if (n < 3) throw ConfigError("consecutive_triples: n must be at least 3");
  std::vector<std::array<std::uint32_t, 3>> out;
  for (std::uint32_t i = 0; i < (n == 3 ? 1u : n); ++i) out.push_back({i, (i + 1) % n, (i + 2) % n});
  return out;
}

/**
 * Uniform mixture of Haar Sym(8) projectors over the given triples. At t = 1
 * the projectors are applied without tables, which admits n up to 24.
 */
inline EnsembleExpr triple_collection_walk(std::uint32_t n, std::size_t t,
                                           const std::vector<std::array<std::uint32_t, 3>>& triples) {
  if (triples.empty()) throw ConfigError("triple_collection_walk: empty collection");
  std::vector<EnsembleExpr> leaves;
  for (auto tr : triples) {
    std::vector<std::uint32_t> bits{tr[0], tr[1], tr[2]};
    leaves.push_back(t == 1 ? ensembles::sym_on_bits_single_copy(n, bits) : ensembles::sym_on_bits(n, t, bits));
  }
  return EnsembleExpr::uniform_mix(std::move(leaves));
}

/** Essential norm of a triple-collection walk against Alt(2^n). */
inline GapReport triple_collection_norm(std::uint32_t n, std::size_t t,
                                        const std::vector<std::array<std::uint32_t, 3>>& triples,
                                        const GapOptions& opts = {}) {
  if (std::uint64_t{n} * t > 24) throw BudgetError("triple_collection_norm: 2^(nt) must be at most 2^24");
  auto walk = triple_collection_walk(n, t, triples);
  if (t == 1) {
    const std::size_t dim = std::size_t{1} << n;
    ProjectorFn uniform = [dim](const double* in, double* out) {
      double s = 0.0;
      for (std::size_t i = 0; i < dim; ++i) s += in[i];
      std::fill(out, out + dim, s / static_cast<double>(dim));
    };
    GapReport r = essential_norm(walk, uniform, opts);
    r.n = n;
    r.t = 1;
    return r;
  }
  return essential_norm_alt(walk, n, t, opts);
}

}  // namespace sgl
