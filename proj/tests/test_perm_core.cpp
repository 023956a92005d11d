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

#include "sgl/permutation.hpp"
#include "sgl/rng.hpp"
#include "test_util.hpp"

using namespace sgl;

namespace {

Permutation random_perm(std::size_t n, SeededRng& rng) { return sample_uniform(GroupKind::sym, n, rng); }

// Parity by counting inversions, independent of the cycle decomposition.
Parity inversion_parity(const Permutation& p) {
  std::size_t inv = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) ++inv;
  return inv % 2 ? Parity::odd : Parity::even;
}

}  // namespace

TEST_CASE("compose follows function composition") {
  SeededRng rng(1);
  Permutation p = Permutation::from_images({1, 2, 0});  // (0 1 2)
  Permutation q = Permutation::from_images({1, 0, 2});  // (0 1)
  Permutation pq = compose(p, q);
  CHECK(pq.images() == std::vector<std::uint32_t>{2, 1, 0});

  // Table oracle over all of Sym(3).
  std::vector<Permutation> all;
  std::vector<std::uint32_t> v{0, 1, 2};
  do {
    all.push_back(Permutation::from_images(v));
  } while (std::next_permutation(v.begin(), v.end()));
  for (const auto& a : all)
    for (const auto& b : all) {
      Permutation c = compose(a, b);
      for (std::uint32_t x = 0; x < 3; ++x) CHECK(c[x] == a[b[x]]);
    }

  Permutation r = random_perm(10, rng);
  CHECK(compose(Permutation::identity(10), r) == r);
  CHECK(compose(r, inverse(r)).is_identity());
  CHECK_THROWS_AS(compose(r, Permutation::identity(9)), ConfigError);
}

TEST_CASE("from_images rejects non-bijections") {
  CHECK_THROWS_AS(Permutation::from_images({0, 0, 1}), ConfigError);
  CHECK_THROWS_AS(Permutation::from_images({0, 3, 1}), ConfigError);
}

TEST_CASE("parity") {
  CHECK(parity(Permutation::identity(5)) == Parity::even);
  CHECK(parity(Permutation::from_images({1, 0, 2, 3})) == Parity::odd);
  CHECK(parity(Permutation::from_images({1, 2, 0, 3})) == Parity::even);
  SeededRng rng(7);
  for (int k = 0; k < 200; ++k) {
    Permutation a = random_perm(9, rng), b = random_perm(9, rng);
    CHECK(parity(a) == inversion_parity(a));
    CHECK(parity(compose(a, b)) == (parity(a) ^ parity(b)));
  }
}

TEST_CASE("bijectivity survives composition chains") {
  SeededRng rng(11);
  for (int chain = 0; chain < 100; ++chain) {
    Permutation acc = Permutation::identity(32);
    for (int k = 0; k < 100; ++k) acc = compose(random_perm(32, rng), acc);
    std::vector<std::uint32_t> s = acc.images();
    std::sort(s.begin(), s.end());
    std::vector<std::uint32_t> expect(32);
    std::iota(expect.begin(), expect.end(), 0u);
    CHECK(s == expect);
  }
}

TEST_CASE("sample_uniform over Sym(4) and Alt(4) is uniform") {
  SeededRng rng(2024);
  CHECK(sample_uniform(GroupKind::sym, 1, rng).is_identity());
  std::vector<std::uint64_t> sym(24, 0);
  for (int k = 0; k < 100000; ++k) ++sym[lex_rank(sample_uniform(GroupKind::sym, 4, rng))];
  CHECK(testing::chi_square_uniform_pvalue(sym) > 0.001);

  std::map<std::uint64_t, std::uint64_t> alt;
  for (int k = 0; k < 60000; ++k) ++alt[lex_rank(sample_uniform(GroupKind::alt, 4, rng))];
  CHECK(alt.size() == 12);
  std::vector<std::uint64_t> counts;
  for (auto [r, c] : alt) {
    CHECK(parity(permutation_from_lex_rank(4, r)) == Parity::even);
    counts.push_back(c);
  }
  CHECK(testing::chi_square_uniform_pvalue(counts) > 0.001);

  for (int k = 0; k < 10000; ++k) CHECK(parity(sample_uniform(GroupKind::alt, 8, rng)) == Parity::even);
}

TEST_CASE("lift_apply matches the dense tensor power at N = 4, t = 3") {
  SeededRng rng(5);
  Permutation p = random_perm(4, rng);
  // P(p)^{⊗3} e_{(m1,m2,m3)} has its single 1 at index of the image tuple.
  for (std::uint64_t idx = 0; idx < 64; ++idx) {
    std::vector<std::uint64_t> m{idx % 4, (idx / 4) % 4, idx / 16};
    std::uint64_t col = 0;
    for (int k = 2; k >= 0; --k) col = col * 4 + p[m[static_cast<std::size_t>(k)]];
    auto img = lift_apply(p, m);
    std::uint64_t got = img[0] + 4 * img[1] + 16 * img[2];
    CHECK(got == col);
  }
  std::vector<std::uint64_t> one{3};
  CHECK(lift_apply(p, one)[0] == p[3]);
  std::vector<std::uint64_t> bad{4};
  CHECK_THROWS(lift_apply(p, bad));
}

TEST_CASE("lexicographic ranks round-trip") {
  for (std::uint64_t r = 0; r < 120; ++r) CHECK(lex_rank(permutation_from_lex_rank(5, r)) == r);
  CHECK(permutation_from_lex_rank(3, 0).is_identity());
  CHECK(permutation_from_lex_rank(3, 5).images() == std::vector<std::uint32_t>{2, 1, 0});
}

TEST_CASE("serialization round-trips") {
  SeededRng rng(3);
  Permutation p = random_perm(17, rng);
  std::string line = serialize(p);
  CHECK(line.rfind("PERM 17:", 0) == 0);
  CHECK(parse_permutation(line) == p);
  CHECK_THROWS_AS(parse_permutation("PERM 3: 0 1"), ConfigError);
  CHECK_THROWS_AS(parse_permutation("PERM 2: 1 1"), ConfigError);
}

TEST_CASE("rng streams are reproducible and split") {
  SeededRng a(99), b(99), c(100);
  for (int k = 0; k < 10; ++k) CHECK(a.next() == b.next());
  CHECK(SeededRng(99).next() != c.next());
  CHECK(SeededRng(99).split(1).next() != SeededRng(99).split(2).next());
  CHECK(SeededRng::algorithm() == std::string("mt19937_64+splitmix64"));
}
