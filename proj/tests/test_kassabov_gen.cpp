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

#include <algorithm>
#include <map>
#include <numeric>

#include <catch_amalgamated.hpp>

#include "sgl/kassabov.hpp"
#include "test_util.hpp"

using namespace sgl;

namespace {

GeneratorDescriptor desc(std::uint32_t axis, Symbol sy, std::uint32_t s = 1) { return {s, axis, sy, 0, Family::depth1}; }

// Depth under as-soon-as-possible layering.
std::size_t asap_depth(const Circuit& c) {
  std::vector<std::size_t> level(c.n_bits(), 0);
  std::size_t depth = 0;
  for (const auto& g : c.gates()) {
    std::size_t l = 0;
    for (auto b : g.support()) l = std::max(l, level[b]);
    for (auto b : g.support()) level[b] = l + 1;
    depth = std::max(depth, l + 1);
  }
  return depth;
}

// C^mX reference: flips bit m iff bits 0..m-1 are set.
std::uint64_t mcx_reference(std::uint64_t x, std::uint32_t m) {
  const std::uint64_t cm = (std::uint64_t{1} << m) - 1;
  return (x & cm) == cm ? x ^ (std::uint64_t{1} << m) : x;
}

}  // namespace

TEST_CASE("generator symbols") {
  auto syms = generator_symbols();
  CHECK(syms.size() == 74);
  CHECK(syms.front().to_string() == "E12(1)");
  CHECK(syms[6].to_string() == "E12(a)");
  CHECK(syms[8].to_string() == "E12(z1)");
  CHECK(generator_symbols(Family::k1).size() == 18);
}

TEST_CASE("single-gate generators at s = 1") {
  Circuit b = build_generator(desc(1, {SymbolKind::b, 2, 1, 0}));
  REQUIRE(b.size() == 1);
  CHECK(b.gates()[0] == Gate::cnot(0, 1));

  Circuit z = build_generator(desc(1, {SymbolKind::z, 2, 1, 3}));
  REQUIRE(z.size() == 1);
  RegisterLayout L(1, 0);
  CHECK(z.gates()[0] == Gate::toffoli(L.x(3, 1), 0, 1));
  CHECK(L.x(1, 1) == 3);   // first bit of the next register
  CHECK(L.x(15, 1) == 17); // last bit overall
  CHECK(RegisterLayout(1, 2).x(1, 1) == 0);
  CHECK_THROWS_AS(build_generator(desc(7, {SymbolKind::b, 2, 1, 0})), ConfigError);
  CHECK_THROWS_AS(build_generator({1, 1, {SymbolKind::y, 1, 2, 0}, 0, Family::k1}), ConfigError);
}

TEST_CASE("generators are involutions and preserve every component") {
  SeededRng rng(5);
  for (std::uint32_t axis = 1; axis <= 6; ++axis) {
    for (const auto& sy : generator_symbols()) {
      Circuit c = build_generator(desc(axis, sy));
      INFO(axis << ' ' << sy.to_string());
      CHECK(preserves_goodset(c, 1));
      if (axis == 1) CHECK(is_involution_s1(c));
    }
  }
  for (const auto& sy : generator_symbols()) {
    Circuit c = build_generator(desc(3, sy, 2));
    Circuit twice = c;
    twice.append(c);
    for (int k = 0; k < 10000; ++k) {
      std::uint64_t x = rng.next() & ((std::uint64_t{1} << 36) - 1);
      if (apply(twice, x) != x) FAIL("s = 2 generator is not an involution: " << sy.to_string());
    }
    CHECK(preserves_goodset(c, 2, 9, 10000));
    CHECK(c.size() <= 15 * 2);
  }
  Circuit flip(18);
  flip.add(Gate::x(0));
  CHECK_FALSE(preserves_goodset(flip, 1));
  CHECK(preserves_goodset(Circuit(18), 1));
}

TEST_CASE("mcx decomposition is exact and restores the borrowed bit") {
  CHECK(mcx_decompose(2).size() == 1);
  CHECK(mcx_decompose(2).gates()[0].kind == GateKind::toffoli);
  for (std::uint32_t m = 2; m <= 6; ++m) {
    Circuit c = mcx_decompose(m);
    CHECK(c.size() <= 8 * m);
    CHECK(c.gate_counts()[3] == 0);
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << (m + 2)); ++x) CHECK(apply(c, x) == mcx_reference(x, m));
  }
}

TEST_CASE("parallel multi-target NOT") {
  Circuit c = cmx_parallel(2, 2);
  for (std::uint64_t x = 0; x < 16; ++x) {
    std::uint64_t expect = (x & 3) == 3 ? x ^ 0b1100 : x;
    CHECK(apply(c, x) == expect);
  }
  for (std::uint32_t l = 2; l <= 6; ++l) {
    Circuit cl = cmx_parallel(3, l);
    CHECK(cl.gate_counts()[1] == 2 * l - 2);
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << (3 + l)); ++x) {
      std::uint64_t tmask = ((std::uint64_t{1} << l) - 1) << 3;
      CHECK(apply(cl, x) == ((x & 7) == 7 ? x ^ tmask : x));
    }
  }
}

TEST_CASE("trivialized generators at s = 1 (axis 1, exhaustive)") {
  for (const auto& sy : generator_symbols()) {
    auto r = check_trivialized_s1(desc(1, sy));
    INFO(sy.to_string() << " exterior=" << r.exterior_fixed << " good=" << r.good_agree);
    CHECK(r.ok());
  }
  CHECK(good_set_size(1) == 117649);
}

TEST_CASE("trivialized generators on other axes (sampled)") {
  SeededRng rng(17);
  auto syms = generator_symbols();
  for (std::uint32_t axis = 2; axis <= 6; ++axis) {
    const auto& sy = syms[rng.below(syms.size())];
    INFO(axis << ' ' << sy.to_string());
    CHECK(check_trivialized_s1(desc(axis, sy)).ok());
  }
}

TEST_CASE("bit-flip conjugation") {
  SeededRng rng(8);
  Circuit c = trivialize(desc(2, {SymbolKind::z, 1, 2, 4}));
  CHECK(to_permutation(Circuit(1)).is_identity());
  Circuit c0 = conjugate_bitflip(c, 0, 1);
  CHECK(c0 == c);
  Circuit full = conjugate_bitflip(c, 63, 1);
  const std::uint64_t all = (1u << 18) - 1;
  for (int k = 0; k < 10000; ++k) {
    std::uint64_t x = rng.below(1u << 18);
    CHECK(apply(full, x) == (apply(c, x ^ all) ^ all));
  }
  Circuit twice = conjugate_bitflip(conjugate_bitflip(c, 21, 1), 21, 1);
  for (int k = 0; k < 1000; ++k) {
    std::uint64_t x = rng.below(1u << 18);
    CHECK(apply(twice, x) == apply(c, x));
  }
}

TEST_CASE("Alt(2^n) generating set") {
  CHECK_THROWS_AS(build_alt2n_generators(17), ConfigError);
  auto g = build_alt2n_generators(18);
  CHECK(g.size() == 28416);
  auto g20 = build_alt2n_generators(20);
  CHECK(g20.size() == 28416 * 3);
  SeededRng rng(2);
  std::size_t max_gates = 0, max_fan = 0;
  for (int k = 0; k < 40; ++k) {
    std::size_t idx = rng.below(g.size());
    Circuit c = g.circuit(idx);
    max_gates = std::max(max_gates, c.size());
    max_fan = std::max(max_fan, max_gates_per_bit(c));
    CHECK(parity(to_permutation(c)) == Parity::even);
  }
  CHECK(max_gates < 18 * 400);
  auto j = g.manifest_entry(123);
  CHECK(j["axis"].get<int>() >= 1);
  CHECK(g20.circuit(28416 * 2 + 5).n_bits() == 20);
  CHECK_THROWS(g.entry(28416));
}

TEST_CASE("Caprace generators") {
  auto g3 = caprace_generators(3);
  CHECK(order(g3.sigma) == 3);
  CHECK(order(g3.alpha) == 3);
  CHECK(order(g3.beta) == 3);
  auto g5 = caprace_generators(5);
  CHECK(order(g5.sigma) == 3);
  CHECK(order(g5.alpha) == 5);
  CHECK(order(g5.beta) == 5);
  for (const auto* p : {&g5.sigma, &g5.alpha, &g5.beta}) CHECK(parity(*p) == Parity::even);
  CHECK(parity(g5.tau) == Parity::odd);
  for (std::uint32_t start : {0u, 7u, 123u}) CHECK(orbit_size({g5.sigma, g5.alpha, g5.beta}, start) == 124);
  CHECK(orbit_size({g3.sigma, g3.alpha, g3.beta}, 0) == 26);
  CHECK_THROWS_AS(caprace_generators(9), ConfigError);
  CHECK_THROWS_AS(caprace_generators(2), ConfigError);
}

TEST_CASE("random primes") {
  SeededRng rng(10);
  for (int k = 0; k < 50; ++k) {
    auto p3 = random_prime_near(3, rng);
    CHECK((p3 == 5 || p3 == 7));
    auto p5 = random_prime_near(5, rng);
    CHECK((p5 == 17 || p5 == 19 || p5 == 23 || p5 == 29 || p5 == 31));
    auto p = random_prime_near(40, rng);
    CHECK(p % 2 == 1);
    CHECK(p > (std::uint64_t{1} << 39));
    CHECK(p < (std::uint64_t{1} << 40));
  }
}

TEST_CASE("three-factor decomposition over overlapping supports") {
  const std::vector<std::uint32_t> A{0, 1, 2}, B{3, 4, 5}, C{6, 7, 8};
  auto check_supports = [&](const OverlapFactors& f) {
    for (auto c : C) {
      CHECK(f.l[c] == c);
      CHECK(f.l_prime[c] == c);
    }
    for (auto a : A) CHECK(f.r[a] == a);
  };
  auto id = decompose_overlapping(Permutation::identity(9), A, B, C);
  CHECK(compose(id.l, compose(id.r, id.l_prime)).is_identity());
  SeededRng rng(33);
  for (int k = 0; k < 1000; ++k) {
    Permutation p = sample_uniform(GroupKind::sym, 9, rng);
    auto f = decompose_overlapping(p, A, B, C);
    CHECK(compose(f.l, compose(f.r, f.l_prime)) == p);
    check_supports(f);
    Permutation q = sample_uniform(GroupKind::alt, 9, rng);
    auto fa = decompose_overlapping(q, A, B, C, true);
    CHECK(compose(fa.l, compose(fa.r, fa.l_prime)) == q);
    CHECK(parity(fa.l) == Parity::even);
    CHECK(parity(fa.r) == Parity::even);
    CHECK(parity(fa.l_prime) == Parity::even);
    check_supports(fa);
  }
  CHECK_THROWS_AS(decompose_overlapping(Permutation::from_images({1, 0, 2, 3, 4, 5, 6, 7, 8}), A, B, C, true), ConfigError);
}

TEST_CASE("bit-flip sandwich sampler") {
  SeededRng rng(44);
  std::vector<std::uint64_t> counts(444, 0);
  std::size_t max_depth = 0;
  for (int k = 0; k < 100000; ++k) {
    auto d = appendix_b_sampler(1, rng);
    ++counts[d.generator];
    if (k < 2000) max_depth = std::max(max_depth, asap_depth(d.circuit));
  }
  CHECK(testing::chi_square_uniform_pvalue(counts) > 0.001);
  CHECK(max_depth <= 3);
}
