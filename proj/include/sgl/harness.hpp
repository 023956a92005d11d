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
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sgl/circuit.hpp"
#include "sgl/errors.hpp"
#include "sgl/gap.hpp"
#include "sgl/kassabov.hpp"
#include "sgl/parallel.hpp"
#include "sgl/partition.hpp"
#include "sgl/permutation.hpp"
#include "sgl/quantum.hpp"
#include "sgl/rng.hpp"

#ifndef SGL_BUILD_HASH
#define SGL_BUILD_HASH "unknown"
#endif

namespace sgl {

// ---------------------------------------------------------------------------
// Statistical t-wise independence test.

/** Maps the tuple x to its image under one sampled permutation. */
using TupleSampler =
    std::function<void(SeededRng&, const std::vector<std::uint32_t>& x, std::vector<std::uint32_t>& y)>;

inline TupleSampler uniform_group_sampler(std::uint32_t n, GroupKind kind = GroupKind::alt) {
  return [n, kind](SeededRng& rng, const std::vector<std::uint32_t>& x, std::vector<std::uint32_t>& y) {
    Permutation p = sample_uniform(kind, std::size_t{1} << n, rng);
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = p[x[i]];
  };
}

/** k independent uniform 3-bit gates on uniformly chosen triples of bits. */
inline TupleSampler rev_walk_sampler(std::uint32_t n, std::size_t k) {
  if (n < 4) throw ConfigError("rev_walk_sampler: n must be at least 4");
  return [n, k](SeededRng& rng, const std::vector<std::uint32_t>& x, std::vector<std::uint32_t>& y) {
    y = x;
    const auto& table = sym8_table();
    for (std::size_t step = 0; step < k; ++step) {
      Gate g = sample_rev_all_to_all(n, rng);
      const auto& img = table[g.sigma];
      for (auto& v : y) {
        std::uint32_t local = ((v >> g.bits[0]) & 1u) | ((v >> g.bits[1]) & 1u) << 1 | ((v >> g.bits[2]) & 1u) << 2;
        std::uint32_t out = img[local];
        for (int b = 0; b < 3; ++b) {
          std::uint32_t bit = g.bits[static_cast<std::size_t>(b)];
          v = (v & ~(1u << bit)) | (((out >> b) & 1u) << bit);
        }
      }
    }
  };
}

struct DesignTestReport {
  std::uint32_t n = 0;
  std::size_t t = 0;
  std::size_t samples = 0;
  /** "histogram" (exact cell counts) or "collision" (L2 upper bound on TV). */
  std::string method;
  double tv = 0.0;
  double tv_ci_low = 0.0;
  double tv_ci_high = 0.0;
  double threshold = 0.0;
  bool pass = false;
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  std::size_t bootstrap_resamples = 0;

  nlohmann::json to_json() const {
    return nlohmann::json{{"n", n},
                          {"t", t},
                          {"samples", samples},
                          {"method", method},
                          {"tv", tv},
                          {"tv_ci", {tv_ci_low, tv_ci_high}},
                          {"ci_level", 0.95},
                          {"threshold", threshold},
                          {"pass", pass},
                          {"ratio_min", ratio_min},
                          {"ratio_max", ratio_max},
                          {"bootstrap_resamples", bootstrap_resamples}};
  }
};

namespace detail {

/** Index of a distinct tuple among the N (N-1) ... (N-t+1) ordered tuples. */
inline std::uint64_t distinct_tuple_index(const std::vector<std::uint32_t>& y, std::uint64_t N) {
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    std::uint64_t smaller = y[i];
    for (std::size_t j = 0; j < i; ++j)
      if (y[j] < y[i]) --smaller;
    idx = idx * (N - i) + smaller;
  }
  return idx;
}

inline double tv_from_counts(const std::vector<std::uint64_t>& counts, std::uint64_t total) {
  const double u = 1.0 / static_cast<double>(counts.size());
  double s = 0.0;
  for (auto c : counts) s += std::abs(static_cast<double>(c) / static_cast<double>(total) - u);
  return 0.5 * s;
}

}  // namespace detail

/**
 * Empirical law of (pi(x_1), ..., pi(x_t)) against the uniform law on
 * distinct tuples. Samples are drawn in 64 fixed chunks with split streams,
 * so results do not depend on the thread count.
 */
inline DesignTestReport design_statistical_test(const TupleSampler& sampler, std::uint32_t n, std::size_t t,
                                                const std::vector<std::uint32_t>& x, std::size_t samples,
                                                SeededRng& rng, double threshold = 0.05,
                                                std::size_t resamples = 1000) {
  if (n < 2 || n > 6 || t < 1 || t > 3) throw ConfigError("design_statistical_test: need n in [2, 6] and t in [1, 3]");
  if (x.size() != t) throw ConfigError("design_statistical_test: tuple length must equal t");
  const std::uint64_t N = std::uint64_t{1} << n;
  for (std::size_t i = 0; i < t; ++i) {
    if (x[i] >= N) throw ConfigError("design_statistical_test: point out of range");
    for (std::size_t j = 0; j < i; ++j)
      if (x[i] == x[j]) throw ConfigError("design_statistical_test: degenerate tuple (repeated points)");
  }
  if (samples == 0) throw ConfigError("design_statistical_test: samples must be positive");
  std::uint64_t cells = 1;
  for (std::size_t i = 0; i < t; ++i) cells *= (N - i);

  DesignTestReport rep;
  rep.n = n;
  rep.t = t;
  rep.samples = samples;
  rep.threshold = threshold;
  rep.bootstrap_resamples = resamples;

  constexpr std::size_t kChunks = 64;
  const std::uint64_t base_seed = rng.next();
  std::vector<std::vector<std::uint64_t>> per_chunk(kChunks);
  bool histogram = cells <= (std::uint64_t{1} << 16);
  rep.method = histogram ? "histogram" : "collision";
  parallel_for(0, kChunks, [&](std::size_t lo, std::size_t hi, unsigned) {
    std::vector<std::uint32_t> y(t);
    for (std::size_t ch = lo; ch < hi; ++ch) {
      SeededRng local(base_seed, ch + 1);
      std::size_t count = samples / kChunks + (ch < samples % kChunks ? 1 : 0);
      auto& out = per_chunk[ch];
      if (histogram) out.assign(cells, 0);
      for (std::size_t k = 0; k < count; ++k) {
        sampler(local, x, y);
        std::uint64_t idx = detail::distinct_tuple_index(y, N);
        if (histogram) {
          ++out[idx];
        } else {
          out.push_back(idx);
        }
      }
    }
  });

  if (histogram) {
    std::vector<std::uint64_t> counts(cells, 0);
    for (const auto& c : per_chunk)
      for (std::size_t i = 0; i < cells; ++i) counts[i] += c[i];
    rep.tv = detail::tv_from_counts(counts, samples);
    const double expect = static_cast<double>(samples) / static_cast<double>(cells);
    auto [mn, mx] = std::minmax_element(counts.begin(), counts.end());
    rep.ratio_min = static_cast<double>(*mn) / expect;
    rep.ratio_max = static_cast<double>(*mx) / expect;
    // Multinomial bootstrap via sequential binomials.
    std::mt19937_64 eng(rng.next());
    std::vector<double> tvs;
    std::vector<std::uint64_t> re(cells);
    for (std::size_t b = 0; b < resamples; ++b) {
      std::uint64_t left = samples;
      std::uint64_t mass_left = samples;
      for (std::size_t i = 0; i < cells; ++i) {
        if (left == 0 || mass_left == 0) {
          re[i] = 0;
          continue;
        }
        double prob = std::min(1.0, static_cast<double>(counts[i]) / static_cast<double>(mass_left));
        std::binomial_distribution<std::uint64_t> bin(left, prob);
        re[i] = bin(eng);
        left -= re[i];
        mass_left -= counts[i];
      }
      tvs.push_back(detail::tv_from_counts(re, samples));
    }
    std::sort(tvs.begin(), tvs.end());
    if (!tvs.empty()) {
      rep.tv_ci_low = tvs[static_cast<std::size_t>(0.025 * (tvs.size() - 1))];
      rep.tv_ci_high = tvs[static_cast<std::size_t>(0.975 * (tvs.size() - 1))];
    } else {
      rep.tv_ci_low = rep.tv_ci_high = rep.tv;
    }
  } else {
    // Collision estimate of sum_y p(y)^2; TV <= sqrt(cells * sum p^2 - 1) / 2.
    std::vector<std::uint64_t> all;
    for (auto& c : per_chunk) all.insert(all.end(), c.begin(), c.end());
    std::sort(all.begin(), all.end());
    double pairs = 0.0;
    std::vector<std::uint64_t> runs;
    for (std::size_t i = 0; i < all.size();) {
      std::size_t j = i;
      while (j < all.size() && all[j] == all[i]) ++j;
      runs.push_back(j - i);
      pairs += 0.5 * static_cast<double>(j - i) * static_cast<double>(j - i - 1);
      i = j;
    }
    const double total_pairs = 0.5 * static_cast<double>(samples) * static_cast<double>(samples - 1);
    const double p2 = total_pairs > 0 ? pairs / total_pairs : 0.0;
    rep.tv = std::min(1.0, 0.5 * std::sqrt(std::max(0.0, static_cast<double>(cells) * p2 - 1.0)));
    rep.tv_ci_low = 0.0;
    rep.tv_ci_high = rep.tv;
    rep.ratio_min = 0.0;
    rep.ratio_max = static_cast<double>(*std::max_element(runs.begin(), runs.end())) * static_cast<double>(cells) /
                    static_cast<double>(samples);
  }
  rep.pass = rep.tv_ci_high < threshold;
  return rep;
}

// ---------------------------------------------------------------------------
// Counting calculators.

/** (C(n,3) 8!)^R, the number of R-gate circuits of 3-bit gates. */
inline BigInt reversible_count_bound(std::uint32_t n, std::uint64_t R) {
  if (n < 4) throw ConfigError("reversible_count_bound: n must be at least 4");
  BigInt base = binomial(n, 3) * 40320;
  BigInt r = 1;
  for (std::uint64_t i = 0; i < R; ++i) r *= base;
  return r;
}

inline double reversible_count_log2(std::uint32_t n, std::uint64_t R) {
  if (n < 4) throw ConfigError("reversible_count_log2: n must be at least 4");
  double c = static_cast<double>(n) * (n - 1) * (n - 2) / 6.0;
  return static_cast<double>(R) * std::log2(c * 40320.0);
}

struct ComplexityConstants {
  double c_gap = 1.0;     // gap >= c_gap / n^3
  double c_design = 1.0;  // t = L / (c_design n^4)
  double c_union = 1.0;   // R = c_union n t / ln n
};

struct ComplexityReport {
  double t = 0.0;
  double R = 0.0;
  double gap_lower_bound = 0.0;
  double log2_circuit_count = 0.0;
  double log2_point_probability = 0.0;
  double log2_failure_bound = 0.0;

  nlohmann::json to_json() const {
    return nlohmann::json{{"label", "conditional on supplied constants"},
                          {"t", t},
                          {"R", R},
                          {"gap_lower_bound", gap_lower_bound},
                          {"log2_circuit_count", log2_circuit_count},
                          {"log2_point_probability", log2_point_probability},
                          {"log2_failure_bound", log2_failure_bound}};
  }
};

/**
 * Lower bound chain for reversible circuit complexity with explicit
 * constants: t = L / (c_design n^4), R = c_union n t / ln n; the failure
 * bound is |M_R| (1 + eps) / (N (N-1) ... (N - t + 1)) in log2.
 */
inline ComplexityReport complexity_bound_calculator(std::uint32_t n, double L, const ComplexityConstants& k,
                                                    double eps = 0.0) {
  if (n < 4 || !(L > 0) || !(k.c_gap > 0) || !(k.c_design > 0) || !(k.c_union > 0) || eps < 0) {
    throw ConfigError("complexity_bound_calculator: need n >= 4, L > 0, positive constants, eps >= 0");
  }
  ComplexityReport r;
  const double nd = static_cast<double>(n);
  r.t = L / (k.c_design * nd * nd * nd * nd);
  r.R = k.c_union * nd * r.t / std::log(nd);
  r.gap_lower_bound = k.c_gap / (nd * nd * nd);
  double c3 = nd * (nd - 1) * (nd - 2) / 6.0;
  r.log2_circuit_count = r.R * std::log2(c3 * 40320.0);
  // log2 of 1 / (N (N-1) ... (N - t + 1)) for real t via lgamma.
  const double N = std::ldexp(1.0, static_cast<int>(n));
  double log_falling = (std::lgamma(N + 1) - std::lgamma(N - r.t + 1)) / std::log(2.0);
  if (!(r.t < N)) log_falling = std::numeric_limits<double>::infinity();
  r.log2_point_probability = std::log2(1.0 + eps) - log_falling;
  r.log2_failure_bound = r.log2_circuit_count + r.log2_point_probability;
  return r;
}

// ---------------------------------------------------------------------------
// Experiment configs.

/**
 * @brief Named experiment with parameters and a seed.
 */
struct ExperimentConfig {
  std::string name;
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::string output;

  nlohmann::json to_json() const {
    return nlohmann::json{{"name", name}, {"params", params}, {"seed", seed}, {"output", output}};
  }

  static ExperimentConfig from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("experiment must be a JSON object");
    ExperimentConfig c;
    if (!j.contains("name") || !j["name"].is_string()) throw ConfigError("experiment needs a string name");
    c.name = j["name"].get<std::string>();
    if (j.contains("params")) {
      if (!j["params"].is_object()) throw ConfigError("params must be an object");
      c.params = j["params"];
    }
    if (j.contains("seed")) {
      if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<std::int64_t>() >= 0)) {
        throw ConfigError("seed must be a non-negative integer");
      }
      c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("output")) {
      if (!j["output"].is_string()) throw ConfigError("output must be a string");
      c.output = j["output"].get<std::string>();
    }
    return c;
  }
};

struct RunResult {
  nlohmann::json report;
  /** CSV series; empty when the experiment has none. */
  std::string csv;
  /** False when some eigen-solve did not reach its tolerance. */
  bool converged = true;
};

namespace detail {

template <class T>
T param(const nlohmann::json& p, const char* key, T fallback) {
  if (!p.contains(key)) return fallback;
  try {
    return p.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("parameter '") + key + "' has the wrong type");
  }
}

inline GapOptions gap_options(const nlohmann::json& p, std::uint64_t seed) {
  GapOptions o;
  o.tol = param<double>(p, "tol", 1e-8);
  o.restarts = param<std::size_t>(p, "restarts", 5);
  o.max_matvecs = param<std::size_t>(p, "max_matvecs", 100000);
  o.seed = seed;
  return o;
}

inline std::string rational_string(const BigRational& r) {
  std::ostringstream os;
  os << numerator(r) << '/' << denominator(r);
  return os.str();
}

inline ArchGraph named_graph(const std::string& g, std::uint32_t n) {
  if (g == "path") return ArchGraph::path(n);
  if (g == "star") return ArchGraph::star(n);
  if (g == "cycle") return ArchGraph::cycle(n);
  if (g == "complete") return ArchGraph::complete(n);
  throw ConfigError("unknown graph '" + g + "'");
}

inline EnsembleExpr named_ensemble(const std::string& name, std::uint32_t n, std::size_t t) {
  if (name == "rev-all-to-all") return ensembles::rev_all_to_all(n, t);
  if (name == "rev-path") return ensembles::rev_arch(ArchGraph::path(n), t);
  if (name == "rev-cycle") return ensembles::rev_arch(ArchGraph::cycle(n), t);
  if (name == "beta") return beta_walk(n, t);
  if (name == "consecutive-triples") return triple_collection_walk(n, t, consecutive_triples(n));
  throw ConfigError("unknown ensemble '" + name + "'");
}

inline RunResult run_gap(const ExperimentConfig& c) {
  const auto& p = c.params;
  auto n = param<std::uint32_t>(p, "n", 4);
  auto t = param<std::size_t>(p, "t", 1);
  auto name = param<std::string>(p, "ensemble", "rev-all-to-all");
  GapOptions o = gap_options(p, c.seed);
  GapReport rep;
  if (name == "kassabov-triples") {
    if (t != 1 || n != 18) throw BudgetError("kassabov-triples: only n = 18, t = 1 is within budget");
    rep = triple_collection_norm(18, 1, kassabov_triples(1), o);
  } else if (name == "consecutive-triples") {
    rep = triple_collection_norm(n, t, consecutive_triples(n), o);
  } else {
    if (std::uint64_t{n} * t > 20) throw BudgetError("gap: 2^(nt) exceeds 2^20");
    rep = essential_norm_alt(named_ensemble(name, n, t), n, t, o);
  }
  RunResult r;
  r.report = rep.to_json();
  r.report["ensemble"] = name;
  r.converged = rep.converged;
  return r;
}

inline RunResult run_pzp(const ExperimentConfig& c) {
  auto n = param<std::uint32_t>(c.params, "n", 3);
  auto t = param<std::uint32_t>(c.params, "t", 1);
  PzpValue v = pzp_exact(n, t);
  RunResult r;
  r.report = {{"n", n},
              {"t", t},
              {"value", rational_string(v.value)},
              {"value_float", static_cast<double>(v.value)},
              {"bound", rational_string(v.bound)},
              {"exact", true}};
  if (param<bool>(c.params, "bruteforce", n <= 4)) r.report["bruteforce"] = rational_string(pzp_bruteforce(n, t));
  return r;
}

inline RunResult run_overlap(const ExperimentConfig& c) {
  const auto& p = c.params;
  auto a = param<std::uint32_t>(p, "a", 2);
  auto cc = param<std::uint32_t>(p, "c", 2);
  auto t = param<std::size_t>(p, "t", 2);
  auto bs = param<std::vector<std::uint32_t>>(p, "b", {4, 8, 16});
  GapOptions o = gap_options(p, c.seed);
  RunResult r;
  r.report["a"] = a;
  r.report["c"] = cc;
  r.report["t"] = t;
  r.report["rows"] = nlohmann::json::array();
  std::ostringstream csv;
  csv << "b,norm,residual,bound_shape\n";
  csv.precision(12);
  for (auto b : bs) {
    OverlapResult res = overlap_norm(a, b, cc, t, o);
    r.converged = r.converged && res.report.converged;
    r.report["rows"].push_back({{"b", b}, {"norm", res.value}, {"residual", res.report.residual},
                                {"tol", o.tol}, {"bound_shape", res.bound_shape}});
    csv << b << ',' << res.value << ',' << res.report.residual << ',' << res.bound_shape << '\n';
  }
  r.csv = csv.str();
  return r;
}

inline RunResult run_cayley(const ExperimentConfig& c) {
  auto n = param<std::uint32_t>(c.params, "n", 4);
  auto t = param<std::size_t>(c.params, "t", 1);
  auto g = param<std::string>(c.params, "graph", "path");
  GapOptions o = gap_options(c.params, c.seed);
  CayleyGap res = swap_cayley_gap(named_graph(g, n), t, 6, o);
  RunResult r;
  r.report = {{"graph", g}, {"n", n}, {"t", t}, {"alpha", res.alpha}, {"norm", res.exact}, {"gap", 1.0 - res.exact},
              {"tol", o.tol}};
  if (res.witness) r.report["witness_norm"] = *res.witness;
  return r;
}

inline RunResult run_caprace(const ExperimentConfig& c) {
  auto p = param<std::uint64_t>(c.params, "p", 3);
  GapOptions o = gap_options(c.params, c.seed);
  CapraceGenerators g = caprace_generators(p);
  std::vector<Permutation> gens{g.sigma, g.alpha, g.beta};
  RunResult r;
  r.report = {{"p", p},
              {"points", p * p * p - 1},
              {"orders", {order(g.sigma), order(g.alpha), order(g.beta)}},
              {"even", {parity(g.sigma) == Parity::even, parity(g.alpha) == Parity::even,
                        parity(g.beta) == Parity::even}},
              {"orbit_size", orbit_size(gens, 0)}};
  auto walk = caprace_walk(g);
  const std::size_t N = p * p * p - 1;
  ProjectorFn uniform = [N](const double* in, double* out) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += in[i];
    std::fill(out, out + N, s / static_cast<double>(N));
  };
  GapReport rep = essential_norm(walk, uniform, o);
  rep.t = 1;
  r.report["gap_report"] = rep.to_json();
  r.converged = rep.converged;
  return r;
}

inline RunResult run_quantum(const ExperimentConfig& c) {
  const auto& p = c.params;
  auto kind = param<std::string>(p, "kind", "lrqc");
  auto n = param<std::uint32_t>(p, "n", 3);
  auto t = param<std::size_t>(p, "t", 1);
  GapOptions o = gap_options(p, c.seed);
  RunResult r;
  if (kind == "hamiltonian") {
    auto b = param<std::string>(p, "boundary", "periodic");
    if (b != "open" && b != "periodic") throw ConfigError("boundary must be open or periodic");
    HamiltonianGap h = hamiltonian_gap(n, t, b == "open" ? quantum::Boundary::open : quantum::Boundary::periodic, o);
    r.report = {{"family", "quantum"}, {"n", n}, {"t", t}, {"boundary", b}, {"ground_energy", h.ground_energy},
                {"gap", h.gap}, {"residual", h.residual}, {"tol", o.tol}, {"iters", h.iters}, {"converged", h.converged}};
    r.converged = h.converged;
  } else if (kind == "lrqc") {
    LrqcResult l = lrqc_moment_norm(n, t, o);
    r.report = l.report.to_json();
    r.report["hamiltonian_gap"] = l.hamiltonian_gap;
    r.report["identity_error"] = l.identity_error;
    r.converged = l.report.converged;
  } else if (kind == "brickwork") {
    BrickworkResult b = brickwork_moment_norm(n, t, o);
    r.report = b.report.to_json();
    r.report["lrqc_norm"] = b.lrqc_norm;
    r.report["comparison_bound"] = b.comparison_bound;
    r.report["comparison_holds"] = b.comparison_holds;
    r.converged = b.report.converged;
  } else if (kind == "composite") {
    GapReport g = composite_gq_norm(n, t, param<std::size_t>(p, "c1", 1), param<std::size_t>(p, "c2", 1), o);
    r.report = g.to_json();
    r.converged = g.converged;
  } else if (kind == "haar-rank") {
    auto d = param<std::uint64_t>(p, "d", 4);
    HaarProjector h = haar_projector(d, t);
    r.report = {{"family", "quantum"}, {"d", d}, {"t", t}, {"rank", h.rank()},
                {"trace", rational_string(h.exact_trace())}, {"exact", true}};
  } else {
    throw ConfigError("unknown quantum kind '" + kind + "'");
  }
  return r;
}

inline RunResult run_design_test(const ExperimentConfig& c) {
  const auto& p = c.params;
  auto n = param<std::uint32_t>(p, "n", 4);
  auto t = param<std::size_t>(p, "t", 2);
  auto samples = param<std::size_t>(p, "samples", 100000);
  auto sampler = param<std::string>(p, "sampler", "rev");
  auto threshold = param<double>(p, "threshold", 0.05);
  std::vector<std::uint32_t> x(t);
  for (std::size_t i = 0; i < t; ++i) x[i] = static_cast<std::uint32_t>(i);
  x = param<std::vector<std::uint32_t>>(p, "x", x);
  SeededRng rng(c.seed);
  RunResult r;
  TupleSampler s;
  if (sampler == "uniform") {
    s = uniform_group_sampler(n);
  } else if (sampler == "rev") {
    std::size_t k = param<std::size_t>(p, "k", 0);
    if (k == 0) {
      GapOptions o = gap_options(p, c.seed);
      GapReport g = essential_norm_alt(ensembles::rev_all_to_all(n, t), n, t, o);
      k = design_length(g.gap, n, static_cast<std::uint32_t>(t), param<double>(p, "eps", 0.01), param<double>(p, "c", 1.0));
      r.report["measured_gap"] = g.to_json();
      r.converged = g.converged;
    }
    r.report["k"] = k;
    s = rev_walk_sampler(n, k);
  } else {
    throw ConfigError("unknown sampler '" + sampler + "'");
  }
  r.report["design_test"] = design_statistical_test(s, n, t, x, samples, rng, threshold).to_json();
  return r;
}

inline RunResult run_calc(const ExperimentConfig& c) {
  const auto& p = c.params;
  auto kind = param<std::string>(p, "kind", "design-length");
  RunResult r;
  if (kind == "design-length") {
    r.report = {{"length", design_length(param<double>(p, "delta", 0.1), param<std::uint32_t>(p, "n", 4),
                                         param<std::uint32_t>(p, "t", 1), param<double>(p, "eps", 0.01),
                                         param<double>(p, "c", 1.0))}};
  } else if (kind == "kazhdan") {
    r.report = {{"bound", kazhdan_gap_bound(param<double>(p, "kappa", 1.0), param<std::size_t>(p, "size", 2))}};
  } else if (kind == "reversible-count") {
    auto n = param<std::uint32_t>(p, "n", 4);
    auto R = param<std::uint64_t>(p, "R", 1);
    std::ostringstream os;
    os << reversible_count_bound(n, R);
    r.report = {{"count", os.str()}, {"log2", reversible_count_log2(n, R)}, {"exact", true}};
  } else if (kind == "complexity") {
    ComplexityConstants k{param<double>(p, "c_gap", 1.0), param<double>(p, "c_design", 1.0),
                          param<double>(p, "c_union", 1.0)};
    r.report = complexity_bound_calculator(param<std::uint32_t>(p, "n", 10), param<double>(p, "L", 1e6), k,
                                           param<double>(p, "eps", 0.0))
                   .to_json();
  } else {
    throw ConfigError("unknown calculator '" + kind + "'");
  }
  return r;
}

inline RunResult run_kassabov_verify(const ExperimentConfig& c) {
  auto s = param<std::uint32_t>(c.params, "s", 1);
  if (s != 1) throw BudgetError("kassabov-verify: exhaustive checks need s = 1");
  auto limit = param<std::size_t>(c.params, "limit", 444);
  auto set = untrivialized_set(1);
  limit = std::min(limit, set.size());
  std::size_t preserved = 0, involutions = 0, trivial_ok = 0, max_gates = 0, max_touch = 0;
  for (std::size_t i = 0; i < limit; ++i) {
    Circuit g = build_generator(set[i]);
    if (preserves_goodset(g, 1)) ++preserved;
    if (is_involution_s1(g)) ++involutions;
    if (check_trivialized_s1(set[i]).ok()) ++trivial_ok;
    Circuit tr = trivialize(set[i]);
    max_gates = std::max(max_gates, tr.size());
    max_touch = std::max(max_touch, max_gates_per_bit(tr));
  }
  RunResult r;
  r.report = {{"s", s},
              {"checked", limit},
              {"preserve_all_components", preserved},
              {"involutions", involutions},
              {"trivialization_ok", trivial_ok},
              {"max_trivialized_gates", max_gates},
              {"max_gates_per_bit", max_touch},
              {"exhaustive", true}};
  return r;
}

}  // namespace detail

/** Runs one experiment. */
inline RunResult run_experiment(const ExperimentConfig& c) {
  RunResult r;
  if (c.name == "gap") {
    r = detail::run_gap(c);
  } else if (c.name == "pzp") {
    r = detail::run_pzp(c);
  } else if (c.name == "overlap") {
    r = detail::run_overlap(c);
  } else if (c.name == "cayley") {
    r = detail::run_cayley(c);
  } else if (c.name == "caprace") {
    r = detail::run_caprace(c);
  } else if (c.name == "quantum") {
    r = detail::run_quantum(c);
  } else if (c.name == "design-test") {
    r = detail::run_design_test(c);
  } else if (c.name == "calc") {
    r = detail::run_calc(c);
  } else if (c.name == "kassabov-verify") {
    r = detail::run_kassabov_verify(c);
  } else {
    throw ConfigError("unknown experiment '" + c.name + "'");
  }
  r.report["experiment"] = c.name;
  r.report["seed"] = c.seed;
  return r;
}

/**
 * A report as key,value rows. Nested objects use dotted keys; arrays of
 * scalars are joined with ';'. The echoed config is skipped.
 */
inline std::string flat_csv(const nlohmann::json& j) {
  std::ostringstream os;
  os << "key,value\n";
  auto scalar = [](const nlohmann::json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
  std::function<void(const nlohmann::json&, const std::string&)> walk = [&](const nlohmann::json& o, const std::string& prefix) {
    for (auto it = o.begin(); it != o.end(); ++it) {
      std::string key = prefix + it.key();
      if (prefix.empty() && it.key() == "config") continue;
      if (it->is_object()) {
        walk(*it, key + ".");
      } else if (it->is_array()) {
        if (std::any_of(it->begin(), it->end(), [](const nlohmann::json& e) { return e.is_structured(); })) continue;
        os << key << ',';
        for (std::size_t k = 0; k < it->size(); ++k) os << (k ? ";" : "") << scalar((*it)[k]);
        os << '\n';
      } else {
        os << key << ',' << scalar(*it) << '\n';
      }
    }
  };
  walk(j, "");
  return os.str();
}

/**
 * Runs every experiment of a config document
 * {"seed": s, "experiments": [{"name": ..., "params": {...}}, ...]}.
 * Experiments without their own seed get seed + index.
 */
inline RunResult run(const nlohmann::json& config) {
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  std::uint64_t seed = 0;
  if (config.contains("seed")) {
    const auto& s = config["seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      throw ConfigError("seed must be a non-negative integer");
    }
    seed = s.get<std::uint64_t>();
  }
  nlohmann::json experiments = config.value("experiments", nlohmann::json::array());
  if (!experiments.is_array()) throw ConfigError("experiments must be an array");
  RunResult out;
  out.report = {{"build", SGL_BUILD_HASH}, {"rng", SeededRng::algorithm()}, {"config", config},
                {"results", nlohmann::json::array()}};
  std::ostringstream csv;
  for (std::size_t i = 0; i < experiments.size(); ++i) {
    nlohmann::json e = experiments[i];
    if (e.is_object() && !e.contains("seed")) e["seed"] = seed + i;
    ExperimentConfig c = ExperimentConfig::from_json(e);
    RunResult r = run_experiment(c);
    out.report["results"].push_back(r.report);
    out.converged = out.converged && r.converged;
    csv << "# " << c.name << '\n' << (r.csv.empty() ? flat_csv(r.report) : r.csv);
  }
  out.csv = csv.str();
  return out;
}

/** Zeroes every "wall_time_ms" field, for byte-level comparisons. */
inline void strip_wall_times(nlohmann::json& j) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.key() == "wall_time_ms") {
        it.value() = 0.0;
      } else {
        strip_wall_times(it.value());
      }
    }
  } else if (j.is_array()) {
    for (auto& v : j) strip_wall_times(v);
  }
}

}  // namespace sgl
