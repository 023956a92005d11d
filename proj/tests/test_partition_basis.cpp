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
#include <cmath>
#include <functional>
#include <numeric>

#include <catch_amalgamated.hpp>

#include "sgl/partition.hpp"
#include "sgl/permutation.hpp"
#include "sgl/rng.hpp"
#include "test_util.hpp"

using namespace sgl;

namespace {

double max_diff_vs_projector(const std::vector<double>& dense, std::size_t dim,
                             const std::function<std::vector<double>(const std::vector<double>&)>& op) {
  double worst = 0.0;
  for (std::size_t c = 0; c < dim; ++c) {
    std::vector<double> e(dim, 0.0);
    e[c] = 1.0;
    auto col = op(e);
    for (std::size_t r = 0; r < dim; ++r) worst = std::max(worst, std::abs(col[r] - dense[r * dim + c]));
  }
  return worst;
}

std::uint64_t bell(std::size_t t) {
  // Bell triangle.
  std::vector<std::uint64_t> row{1};
  for (std::size_t i = 1; i <= t; ++i) {
    std::vector<std::uint64_t> next{row.back()};
    for (auto v : row) next.push_back(next.back() + v);
    row = next;
  }
  return row.front();
}

}  // namespace

TEST_CASE("enumerate_partitions counts and order") {
  CHECK(enumerate_partitions(1).size() == 1);
  CHECK(enumerate_partitions(3).size() == 5);
  CHECK(enumerate_partitions(4).size() == 15);
  for (std::size_t t = 1; t <= 8; ++t) CHECK(enumerate_partitions(t).size() == bell(t));
  auto p2 = enumerate_partitions(2);
  CHECK(p2[0].to_string() == "{{1},{2}}");
  CHECK(p2[1].to_string() == "{{1,2}}");
  CHECK_THROWS(enumerate_partitions(9));
}

TEST_CASE("K and its Moebius inverse") {
  PartitionLattice l2(2);
  IntMatrix k = l2.k_matrix();
  CHECK(k.data == std::vector<std::int64_t>{1, 1, 0, 1});
  CHECK(l2.k_inverse().data == std::vector<std::int64_t>{1, -1, 0, 1});

  PartitionLattice l3(3);
  std::int64_t abs_sum = 0;
  for (std::size_t j = 0; j < l3.size(); ++j) abs_sum += std::abs(l3.k_inverse()(0, j));
  CHECK(abs_sum == 6);

  for (std::size_t t = 1; t <= 6; ++t) {
    PartitionLattice lat(t);
    IntMatrix prod = multiply(lat.k_matrix(), lat.k_inverse());
    for (std::size_t i = 0; i < lat.size(); ++i)
      for (std::size_t j = 0; j < lat.size(); ++j) CHECK(prod(i, j) == (i == j ? 1 : 0));
    // Upper triangular in the canonical order.
    IntMatrix km = lat.k_matrix();
    for (std::size_t i = 0; i < lat.size(); ++i)
      for (std::size_t j = 0; j < i; ++j) CHECK(km(i, j) == 0);
  }
}

TEST_CASE("O-vector norms") {
  SetPartition one{{0, 0, 0}};
  CHECK(oprime_norm_sq(one, 9) == 9);
  SetPartition p{{0, 1, 0}};
  CHECK(p.to_string() == "{{1,3},{2}}");
  CHECK(oprime_norm_sq(p, 4) == 12);
  CHECK(o_norm_sq(p, 4) == 16);
  BigInt total = 0;
  for (const auto& pi : enumerate_partitions(3)) total += oprime_norm_sq(pi, 5);
  CHECK(total == 125);
  // Brute force: count 3-tuples over [5] by equality pattern.
  std::vector<std::uint64_t> by_blocks(4, 0);
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b)
      for (int c = 0; c < 5; ++c) {
        int distinct = 1 + (b != a) + (c != a && c != b);
        ++by_blocks[static_cast<std::size_t>(distinct)];
      }
  CHECK(by_blocks[3] == 60);  // 5·4·3 for the all-singleton partition
  CHECK(by_blocks[1] == 5);
}

TEST_CASE("projector against explicit group sums") {
  for (std::uint32_t N : {3u, 4u, 5u}) {
    for (std::size_t t = 1; t <= 3 && t <= N; ++t) {
      auto emb = CopyEmbedding::full(N);
      auto dense = testing::group_average(emb, t, GroupKind::sym);
      const std::size_t dim = tensor_dim(N, t);
      auto cls = sym_projector(emb, t);
      CHECK(max_diff_vs_projector(dense, dim, [&](const auto& v) { return apply_trivial_projector(emb, t, v); }) < 1e-12);
      CHECK(max_diff_vs_projector(dense, dim, [&](const auto& v) { return cls.apply(v); }) < 1e-12);
      CHECK(cls.rank() == bell(t));
    }
  }
}

TEST_CASE("Sym(8) and Alt(8) agree at t = 2") {
  auto emb = CopyEmbedding::full(8);
  auto dense_alt = testing::group_average(emb, 2, GroupKind::alt);
  CHECK(max_diff_vs_projector(dense_alt, 64, [&](const auto& v) { return apply_trivial_projector(emb, 2, v); }) < 1e-12);
  std::vector<std::uint32_t> pts(8);
  std::iota(pts.begin(), pts.end(), 0u);
  auto alt = orbit_projector(8, 2, alt_generators(8, pts));
  CHECK(alt.same_classes(sym_projector(emb, 2)));
  // At t = N - 1 the groups differ.
  std::vector<std::uint32_t> p4{0, 1, 2, 3};
  CHECK_FALSE(orbit_projector(4, 3, alt_generators(4, p4)).same_classes(orbit_projector(4, 3, sym_generators(4, p4))));
}

TEST_CASE("projector on a bit subset with spectators") {
  auto emb = CopyEmbedding::bits(3, {0, 2});
  for (std::size_t t = 1; t <= 3; ++t) {
    auto dense = testing::group_average(emb, t, GroupKind::sym);
    const std::size_t dim = tensor_dim(8, t);
    CHECK(max_diff_vs_projector(dense, dim, [&](const auto& v) { return apply_trivial_projector(emb, t, v); }) < 1e-12);
    CHECK(max_diff_vs_projector(dense, dim, [&](const auto& v) { return sym_projector(emb, t).apply(v); }) < 1e-12);
  }
  auto prod = CopyEmbedding::product(2, 2, 2, "bc");
  auto dense = testing::group_average(prod, 2, GroupKind::sym);
  CHECK(max_diff_vs_projector(dense, 64, [&](const auto& v) { return sym_projector(prod, 2).apply(v); }) < 1e-12);
}

TEST_CASE("projector fixes O' vectors and is idempotent at larger N") {
  SeededRng rng(6);
  auto emb = CopyEmbedding::full(10);
  const std::size_t dim = tensor_dim(10, 3);
  // O'_{{1,3},{2}}: indicator of x1 = x3 != x2.
  std::vector<double> o(dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    std::size_t a = i % 10, b = (i / 10) % 10, c = i / 100;
    if (a == c && a != b) o[i] = 1.0;
  }
  auto po = apply_trivial_projector(emb, 3, o);
  for (std::size_t i = 0; i < dim; ++i) CHECK(std::abs(po[i] - o[i]) < 1e-12);

  std::vector<double> v(dim);
  for (auto& x : v) x = rng.normal();
  auto p1 = apply_trivial_projector(emb, 3, v);
  auto p2 = apply_trivial_projector(emb, 3, p1);
  auto pc = sym_projector(emb, 3).apply(v);
  for (std::size_t i = 0; i < dim; ++i) {
    CHECK(std::abs(p1[i] - p2[i]) < 1e-10);
    CHECK(std::abs(p1[i] - pc[i]) < 1e-10);
  }
}

TEST_CASE("budget and precondition errors") {
  CHECK_THROWS_AS(tensor_dim(1u << 13, 2), BudgetError);
  CHECK_THROWS_AS(CopyEmbedding::bits(25, {0}), BudgetError);
  std::vector<double> v(8, 1.0);
  CHECK_THROWS_AS(apply_trivial_projector(CopyEmbedding::full(2), 3, v), ConfigError);
}
