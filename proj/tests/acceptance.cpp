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

// Acceptance driver: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>

#include "sgl.hpp"

using namespace sgl;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

Eigen::MatrixXd dense_of(const EnsembleExpr& e) {
  return to_dense(e.dim(), [&](const double* in, double* out) { e.apply(in, out, false); });
}

Eigen::MatrixXd dense_of(const ClassProjector& p) {
  return to_dense(p.dim(), [&](const double* in, double* out) { p.apply(in, out); });
}

double top_singular(const Eigen::MatrixXd& m) {
  // BDCSVD in Eigen 3.4.0 is unreliable here; see test_util.hpp.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.transpose() * m, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

ProjectorFn uniform_reference(std::size_t dim) {
  return [dim](const double* in, double* out) {
    double s = 0.0;
    for (std::size_t i = 0; i < dim; ++i) s += in[i];
    std::fill(out, out + dim, s / static_cast<double>(dim));
  };
}

// 1. Exact partial-zero-preservation values.
void pzp(Outcome& o) {
  for (std::uint32_t n : {3u, 4u})
    for (std::uint32_t t : {1u, 2u, 3u}) {
      auto v = pzp_exact(n, t);
      auto b = pzp_bruteforce(n, t);
      o.require(v.value == b, "exact == brute force at n=" + std::to_string(n) + " t=" + std::to_string(t));
      if (v.bound < 1) o.require(v.value <= v.bound, "bound at n=" + std::to_string(n));
      o.detail << " (" << n << "," << t << ")=" << v.value;
    }
  o.require(pzp_exact(3, 1).value == BigRational(1, 7), "n=3 t=1 is 1/7");
}

// 2. Partition projector against explicit group sums; Alt/Sym equality.
void partition_projector(Outcome& o) {
  double worst = 0.0;
  for (std::uint32_t N : {4u, 6u, 8u}) {
    for (std::size_t t = 1; t <= 3; ++t) {
      auto emb = CopyEmbedding::full(N);
      const std::size_t dim = tensor_dim(N, t);
      Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
      std::vector<std::uint32_t> pts(N);
      std::iota(pts.begin(), pts.end(), 0u);
      double count = 0;
      do {
        ++count;
        for (std::size_t i = 0; i < dim; ++i) {
          std::size_t rem = i, img = 0, pw = 1;
          for (std::size_t j = 0; j < t; ++j, pw *= N) {
            img += pw * pts[rem % N];
            rem /= N;
          }
          sum(static_cast<Eigen::Index>(img), static_cast<Eigen::Index>(i)) += 1.0;
        }
      } while (std::next_permutation(pts.begin(), pts.end()));
      sum /= count;
      Eigen::MatrixXd proj = to_dense(dim, [&](const double* in, double* out) {
        std::vector<double> v(in, in + dim);
        auto w = apply_trivial_projector(emb, t, v);
        std::copy(w.begin(), w.end(), out);
      });
      worst = std::max(worst, (proj - sum).cwiseAbs().maxCoeff());
    }
  }
  o.detail << " max|P - group avg|=" << worst;
  o.require(worst <= 1e-10, "projector matches the group average");
  double alt = 0.0;
  for (std::size_t t = 1; t <= 6; ++t) alt = std::max(alt, alt_sym_equality_check(8, t));
  o.detail << " alt/sym=" << alt;
  o.require(alt <= 1e-12, "Alt(8) and Sym(8) moments agree for t <= 6");
}

// 3. Moebius inverse of the refinement matrix.
void moebius(Outcome& o) {
  for (std::size_t t = 1; t <= 6; ++t) {
    PartitionLattice lat(t);
    IntMatrix prod = multiply(lat.k_matrix(), lat.k_inverse());
    IntMatrix kinv = lat.k_inverse();
    for (std::size_t i = 0; i < lat.size(); ++i) {
      std::int64_t abs_sum = 0, fact = 1;
      for (std::size_t j = 0; j < lat.size(); ++j) {
        o.require(prod(i, j) == (i == j ? 1 : 0), "K K^-1 = I");
        abs_sum += std::abs(kinv(i, j));
      }
      for (std::size_t k = 2; k <= lat[i].block_count(); ++k) fact *= static_cast<std::int64_t>(k);
      if (abs_sum != fact) o.require(false, "row sum at t=" + std::to_string(t));
    }
  }
  o.detail << " t<=6 checked";
}

// 4. Overlapping-factor norm.
void overlap(Outcome& o) {
  double t1 = 0.0;
  for (auto [a, b, c] : {std::array<std::uint32_t, 3>{2, 2, 2}, {2, 4, 3}, {3, 8, 2}})
    t1 = std::max(t1, overlap_norm(a, b, c, 1).value);
  o.require(t1 <= 1e-12, "t = 1 is exact");
  double v4 = overlap_norm(2, 4, 2, 2).value, v8 = overlap_norm(2, 8, 2, 2).value, v16 = overlap_norm(2, 16, 2, 2).value;
  double ratio = v4 / v16;
  o.detail << " t1=" << t1 << " b4=" << v4 << " b8=" << v8 << " b16=" << v16 << " ratio=" << ratio;
  o.require(v4 > v8 && v8 > v16, "strictly decreasing in b");
  o.require(ratio >= 1.4 && ratio <= 4.0, "ratio in [1.4, 4]");
}

// 5. SWAP Cayley walks.
void cayley(Outcome& o) {
  double worst_formula = 0.0, worst_witness = 0.0;
  for (std::uint32_t n = 3; n <= 8; ++n) {
    const double pi = std::acos(-1.0);
    auto p = swap_cayley_gap(ArchGraph::path(n), 1);
    worst_formula = std::max(worst_formula, std::abs(p.exact - (1 - (2 - 2 * std::cos(pi / n)) / (n - 1))));
    auto s = swap_cayley_gap(ArchGraph::star(n), 1);
    worst_formula = std::max(worst_formula, std::abs(s.exact - (1 - 1.0 / (n - 1))));
    if (n <= 6) {
      o.require(p.witness && s.witness, "witness computed for n <= 6");
      if (p.witness) worst_witness = std::max(worst_witness, std::abs(*p.witness - p.exact));
      if (s.witness) worst_witness = std::max(worst_witness, std::abs(*s.witness - s.exact));
    }
  }
  o.detail << " formula err=" << worst_formula << " witness err=" << worst_witness;
  o.require(worst_formula <= 1e-10, "closed form");
  o.require(worst_witness <= 1e-8, "spectral witness");
}

// 6. Kassabov circuits at s = 1, exhaustive.
void kassabov(Outcome& o) {
  std::size_t preserved = 0, involutions = 0, ext = 0, good = 0, trivial_inv = 0, total = 0;
  for (const auto& d : untrivialized_set(1)) {
    ++total;
    Circuit g = build_generator(d);
    preserved += preserves_goodset(g, 1);
    involutions += is_involution_s1(g);
    auto r = check_trivialized_s1(d);
    ext += r.exterior_fixed == 144495;
    good += r.good_agree == 117649;
    trivial_inv += r.involution;
  }
  o.detail << " generators=" << total << " preserve=" << preserved << " involution=" << involutions
           << " exterior_fixed=" << ext << " good_agree=" << good << " trivialized_involution=" << trivial_inv;
  o.require(total == 444, "444 generators");
  o.require(preserved == total && involutions == total, "preservation and involution");
  o.require(ext == total && good == total && trivial_inv == total, "trivialization");
}

// 7. Multi-controlled NOT.
void mcx(Outcome& o) {
  for (std::uint32_t m = 2; m <= 6; ++m) {
    Circuit c = mcx_decompose(m);
    const std::uint64_t cm = (std::uint64_t{1} << m) - 1;
    bool exact = true;
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << (m + 2)); ++x) {
      std::uint64_t expect = (x & cm) == cm ? x ^ (std::uint64_t{1} << m) : x;
      exact = exact && apply(c, x) == expect;
    }
    o.require(exact, "truth table at m=" + std::to_string(m));
    o.require(c.gate_counts()[2] <= 8 * m && c.gate_counts()[3] == 0, "Toffoli budget at m=" + std::to_string(m));
    o.detail << " m=" << m << ":" << c.gate_counts()[2];
  }
}

// 8. Caprace generators.
void caprace(Outcome& o) {
  for (std::uint64_t p : {3u, 5u, 7u}) {
    auto g = caprace_generators(p);
    o.require(order(g.sigma) == 3 && order(g.alpha) == p && order(g.beta) == p, "orders at p=" + std::to_string(p));
    o.require(parity(g.sigma) == Parity::even && parity(g.alpha) == Parity::even && parity(g.beta) == Parity::even,
              "parity at p=" + std::to_string(p));
    o.require(orbit_size({g.sigma, g.alpha, g.beta}, 0) == p * p * p - 1, "transitivity at p=" + std::to_string(p));
  }
  for (std::uint64_t p : {3u, 5u, 7u, 11u}) {
    auto g = caprace_generators(p);
    auto rep = essential_norm(caprace_walk(g), uniform_reference(p * p * p - 1));
    o.detail << " p=" << p << ":" << rep.norm;
    o.require(rep.norm < 0.99 && rep.converged, "norm at p=" + std::to_string(p));
  }
}

// 9. Gap engine against a dense oracle.
void gap_engine(Outcome& o) {
  for (std::uint32_t n : {4u, 5u})
    for (std::size_t t : {1u, 2u}) {
      auto e = ensembles::rev_all_to_all(n, t);
      auto r = essential_norm_alt(e, n, t);
      Eigen::MatrixXd P = dense_of(sym_projector(CopyEmbedding::full(1u << n), t));
      double oracle = top_singular(dense_of(e) - P);
      auto r2 = essential_norm_alt(EnsembleExpr::convolve({e, e}), n, t);
      o.detail << " (" << n << "," << t << ")=" << r.norm;
      o.require(std::abs(r.norm - oracle) <= 1e-6, "dense oracle");
      o.require(std::abs(r2.norm - r.norm * r.norm) <= 1e-6, "convolution square");
    }
}

// 10. Quantum moment identities.
void quantum_ids(Outcome& o) {
  for (auto [n, t] : {std::pair<std::uint32_t, std::size_t>{3, 1}, {4, 1}, {4, 2}}) {
    auto h = hamiltonian_gap(n, t, quantum::Boundary::periodic);
    auto ho = hamiltonian_gap(n, t, quantum::Boundary::open);
    auto l = lrqc_moment_norm(n, t);
    o.detail << " (" << n << "," << t << ") E0=" << h.ground_energy << " id_err=" << l.identity_error;
    o.require(std::abs(h.ground_energy) <= 1e-9 && std::abs(ho.ground_energy) <= 1e-9, "frustration-free");
    o.require(l.identity_error <= 1e-8, "gap identity");
  }
  for (std::size_t t = 1; t <= 3; ++t) {
    std::size_t f = t == 3 ? 6 : t;
    o.require(haar_projector(4, t).rank() == f && haar_projector(4, t).exact_trace() == BigRational(static_cast<long long>(f)),
              "rank at t=" + std::to_string(t));
  }
  for (std::size_t t : {1u, 2u}) {
    auto b = brickwork_moment_norm(4, t);
    o.detail << " brick(t=" << t << ")=" << b.report.norm << "<=" << b.comparison_bound;
    o.require(b.comparison_holds, "brickwork comparison");
  }
}

// 11. Detectability inequalities.
void detectability(Outcome& o) {
  SeededRng rng(2026);
  std::size_t ok = 0, total = 0;
  // Rank-one projectors on neighbouring qubit pairs of a 4-qubit chain: each
  // fails to commute with at most two others.
  for (int fam = 0; fam < 1000; ++fam) {
    std::vector<Eigen::MatrixXd> qs;
    for (int i = 0; i < 3; ++i) {
      Eigen::Vector4d phi;
      for (int k = 0; k < 4; ++k) phi(k) = rng.normal();
      phi.normalize();
      Eigen::Matrix4d local = phi * phi.transpose();
      Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(16, 16);
      for (int x = 0; x < 16; ++x)
        for (int y = 0; y < 16; ++y) {
          int rest = 0xf & ~(3 << i);
          if ((x & rest) != (y & rest)) continue;
          Q(x, y) = local((x >> i) & 3, (y >> i) & 3);
        }
      qs.push_back(Q);
    }
    Eigen::VectorXd psi(16);
    for (int k = 0; k < 16; ++k) psi(k) = rng.normal();
    ++total;
    ok += detectability_check(qs, 2, psi).ok;
  }
  std::vector<Eigen::MatrixXd> fam;
  for (auto tr : consecutive_triples(5)) {
    Eigen::MatrixXd P = dense_of(ensembles::sym_on_bits(5, 1, {tr[0], tr[1], tr[2]}));
    fam.push_back(Eigen::MatrixXd::Identity(32, 32) - P);
  }
  for (int k = 0; k < 100; ++k) {
    Eigen::VectorXd psi(32);
    for (int j = 0; j < 32; ++j) psi(j) = rng.normal();
    ++total;
    ok += detectability_check(fam, 4, psi).ok;
  }
  o.detail << " " << ok << "/" << total;
  o.require(ok == total, "all families");
}

// 12. Bootstrap recursion.
void bootstrap(Outcome& o) {
  auto b = bootstrap_check(4, 1);
  o.detail << " gap(4)=" << b.gap_n << " delta(4)=" << b.delta_n << " gap(3)=" << b.gap_n_minus_1;
  o.require(b.holds, "gap(4) >= delta(4) gap(3)");
}

// 13. End-to-end design test.
void design(Outcome& o) {
  const std::uint32_t n = 4;
  const std::size_t t = 2;
  const double threshold = 0.05;
  auto g = essential_norm_alt(ensembles::rev_all_to_all(n, t), n, t);
  std::uint64_t k = design_length(g.gap, n, t, threshold, 1.0);
  SeededRng rng(13);
  auto rep = design_statistical_test(rev_walk_sampler(n, k), n, t, {0, 1}, 1000000, rng, threshold);
  o.detail << " gap=" << g.gap << " k=" << k << " tv=" << rep.tv << " ci=[" << rep.tv_ci_low << "," << rep.tv_ci_high << "]";
  o.require(g.converged, "gap converged");
  o.require(rep.pass, "TV below threshold");
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
      {"pzp-exactness", pzp},          {"partition-projector", partition_projector},
      {"moebius", moebius},            {"overlap", overlap},
      {"cayley-swap", cayley},         {"kassabov-s1", kassabov},
      {"mcx", mcx},                    {"caprace", caprace},
      {"gap-engine", gap_engine},      {"quantum-identities", quantum_ids},
      {"detectability", detectability}, {"bootstrap", bootstrap},
      {"end-to-end-design", design}};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.pass ? "PASS" : "FAIL") << ' ' << i + 1 << ' ' << criteria[i].first << " (" << secs << " s)"
              << o.detail.str() << std::endl;
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
