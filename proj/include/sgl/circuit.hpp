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
#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sgl/errors.hpp"
#include "sgl/permutation.hpp"
#include "sgl/rng.hpp"

namespace sgl {

enum class GateKind { not_gate, cnot, toffoli, swap, local_perm, mcx };

/** Number of elements of Sym(8), the local group of a 3-bit gate. */
inline constexpr std::uint32_t kSym8Order = 40320;

/** Image tables of all of Sym(8) in lexicographic order. */
inline const std::vector<std::array<std::uint8_t, 8>>& sym8_table() {
  static const std::vector<std::array<std::uint8_t, 8>> table = [] {
    std::vector<std::array<std::uint8_t, 8>> out;
    out.reserve(kSym8Order);
    std::array<std::uint8_t, 8> p{0, 1, 2, 3, 4, 5, 6, 7};
    do {
      out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
  }();
  return table;
}

/**
 * @brief One reversible gate.
 *
 * For local_perm the three bits form the local value
 * bits[0] | bits[1] << 1 | bits[2] << 2, which is mapped through the Sym(8)
 * element of lexicographic rank `sigma`. An mcx gate flips `target` iff all
 * controls are 1; `borrowed` lists dirty bits a lowering may use.
 */
struct Gate {
  GateKind kind = GateKind::not_gate;
  std::vector<std::uint32_t> controls;
  std::uint32_t target = 0;
  std::vector<std::uint32_t> borrowed;
  std::array<std::uint32_t, 3> bits{};
  std::uint32_t sigma = 0;

  static Gate x(std::uint32_t t) {
    Gate g;
    g.kind = GateKind::not_gate;
    g.target = t;
    return g;
  }
  static Gate cnot(std::uint32_t c, std::uint32_t t) {
    Gate g;
    g.kind = GateKind::cnot;
    g.controls = {c};
    g.target = t;
    return g;
  }
  static Gate toffoli(std::uint32_t c1, std::uint32_t c2, std::uint32_t t) {
    Gate g;
    g.kind = GateKind::toffoli;
    g.controls = {c1, c2};
    g.target = t;
    return g;
  }
  static Gate swap(std::uint32_t i, std::uint32_t j) {
    Gate g;
    g.kind = GateKind::swap;
    g.bits = {i, j, 0};
    return g;
  }
  static Gate local_perm(std::uint32_t i, std::uint32_t j, std::uint32_t k, std::uint32_t sigma) {
    if (sigma >= kSym8Order) throw ConfigError("local_perm: sigma index out of range");
    Gate g;
    g.kind = GateKind::local_perm;
    g.bits = {i, j, k};
    g.sigma = sigma;
    return g;
  }
  static Gate mcx(std::vector<std::uint32_t> controls, std::uint32_t t,
                  std::vector<std::uint32_t> borrowed = {}) {
    Gate g;
    g.kind = GateKind::mcx;
    g.controls = std::move(controls);
    g.target = t;
    g.borrowed = std::move(borrowed);
    return g;
  }

  /** Bits whose value can change or influence the result. */
  std::vector<std::uint32_t> support() const {
    switch (kind) {
      case GateKind::swap:
        return {bits[0], bits[1]};
      case GateKind::local_perm:
        return {bits[0], bits[1], bits[2]};
      default: {
        std::vector<std::uint32_t> s = controls;
        s.push_back(target);
        return s;
      }
    }
  }

  bool operator==(const Gate&) const = default;
};

/**
 * @brief Gate list applied in list order to n-bit strings.
 *
 * Bit 0 is the least significant bit of the integer encoding.
 */
class Circuit {
 public:
  Circuit() = default;
  explicit Circuit(std::uint32_t n_bits) : n_bits_(n_bits) {}

  std::uint32_t n_bits() const { return n_bits_; }
  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }

  Circuit& add(Gate g) {
    validate(g);
    gates_.push_back(std::move(g));
    return *this;
  }

  Circuit& append(const Circuit& other) {
    if (other.n_bits_ != n_bits_) throw ConfigError("append: bit count mismatch");
    gates_.insert(gates_.end(), other.gates_.begin(), other.gates_.end());
    return *this;
  }

  /** Circuit on n_bits() + offset' bits with every index shifted by `offset`. */
  Circuit shifted(std::uint32_t offset, std::uint32_t new_n_bits) const {
    Circuit out(new_n_bits);
    for (Gate g : gates_) {
      for (auto& c : g.controls) c += offset;
      for (auto& b : g.borrowed) b += offset;
      g.target += offset;
      if (g.kind == GateKind::swap || g.kind == GateKind::local_perm) {
        for (auto& b : g.bits) b += offset;
      }
      out.add(std::move(g));
    }
    return out;
  }

  /** Counts of (not, cnot, toffoli, other) gates. */
  std::array<std::size_t, 4> gate_counts() const {
    std::array<std::size_t, 4> c{};
    for (const auto& g : gates_) {
      switch (g.kind) {
        case GateKind::not_gate: ++c[0]; break;
        case GateKind::cnot: ++c[1]; break;
        case GateKind::toffoli: ++c[2]; break;
        default: ++c[3]; break;
      }
    }
    return c;
  }

  bool operator==(const Circuit&) const = default;

 private:
  void validate(const Gate& g) const {
    std::vector<std::uint32_t> idx = g.support();
    if (g.kind == GateKind::mcx) idx.insert(idx.end(), g.borrowed.begin(), g.borrowed.end());
    if (g.kind == GateKind::swap && idx.size() != 2) throw ConfigError("swap needs two bits");
    for (auto i : idx) {
      if (i >= n_bits_) throw std::out_of_range("gate index out of range");
    }
    std::sort(idx.begin(), idx.end());
    if (std::adjacent_find(idx.begin(), idx.end()) != idx.end()) {
      throw ConfigError("gate indices must be distinct");
    }
  }

  std::uint32_t n_bits_ = 0;
  std::vector<Gate> gates_;
};

/** Gate list in reverse order; equals the inverse since every gate kind here except local_perm is self-inverse. */
inline Circuit reversed_with_inverses(const Circuit& c) {
  Circuit out(c.n_bits());
  for (auto it = c.gates().rbegin(); it != c.gates().rend(); ++it) {
    Gate g = *it;
    if (g.kind == GateKind::local_perm) {
      const auto& img = sym8_table()[g.sigma];
      std::uint8_t inv[8];
      for (std::uint8_t v = 0; v < 8; ++v) inv[img[v]] = v;
      std::vector<std::uint32_t> inv_images(inv, inv + 8);
      g.sigma = static_cast<std::uint32_t>(lex_rank(Permutation::from_images(inv_images)));
    }
    out.add(std::move(g));
  }
  return out;
}

/** Arbitrary-width bit string; bit i lives in word i / 64. */
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::uint32_t n_bits) : n_(n_bits), words_((n_bits + 63) / 64, 0) {}

  static BitString from_u64(std::uint32_t n_bits, std::uint64_t value) {
    BitString b(n_bits);
    if (!b.words_.empty()) b.words_[0] = value & mask_for(n_bits);
    return b;
  }

  std::uint32_t size() const { return n_; }
  bool get(std::uint32_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void flip(std::uint32_t i) { words_[i >> 6] ^= (std::uint64_t{1} << (i & 63)); }
  void set(std::uint32_t i, bool v) {
    if (get(i) != v) flip(i);
  }
  std::uint64_t low_word() const { return words_.empty() ? 0 : words_[0]; }
  bool operator==(const BitString&) const = default;

 private:
  static std::uint64_t mask_for(std::uint32_t n) {
    return n >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
  }
  std::uint32_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

namespace detail {

struct U64State {
  std::uint64_t v;
  bool get(std::uint32_t i) const { return (v >> i) & 1u; }
  void flip(std::uint32_t i) { v ^= (std::uint64_t{1} << i); }
  void set(std::uint32_t i, bool b) {
    if (get(i) != b) flip(i);
  }
};

template <class State>
void apply_gate(const Gate& g, State& s) {
  switch (g.kind) {
    case GateKind::not_gate:
      s.flip(g.target);
      break;
    case GateKind::cnot:
      if (s.get(g.controls[0])) s.flip(g.target);
      break;
    case GateKind::toffoli:
      if (s.get(g.controls[0]) && s.get(g.controls[1])) s.flip(g.target);
      break;
    case GateKind::swap: {
      bool a = s.get(g.bits[0]);
      bool b = s.get(g.bits[1]);
      s.set(g.bits[0], b);
      s.set(g.bits[1], a);
      break;
    }
    case GateKind::local_perm: {
      unsigned v = s.get(g.bits[0]) | (s.get(g.bits[1]) << 1) | (s.get(g.bits[2]) << 2);
      unsigned w = sym8_table()[g.sigma][v];
      for (int k = 0; k < 3; ++k) s.set(g.bits[k], (w >> k) & 1u);
      break;
    }
    case GateKind::mcx: {
      bool all = true;
      for (auto c : g.controls) all = all && s.get(c);
      if (all) s.flip(g.target);
      break;
    }
  }
}

}  // namespace detail

/** Pointwise evaluation for circuits of at most 64 bits. */
inline std::uint64_t apply(const Circuit& c, std::uint64_t x) {
  if (c.n_bits() > 64) throw ConfigError("apply(u64): circuit wider than 64 bits");
  detail::U64State s{x};
  for (const auto& g : c.gates()) detail::apply_gate(g, s);
  return s.v;
}

inline BitString apply(const Circuit& c, BitString x) {
  if (x.size() != c.n_bits()) throw ConfigError("apply: bit string width mismatch");
  for (const auto& g : c.gates()) detail::apply_gate(g, x);
  return x;
}

/**
 * @brief Bit-sliced state of all 2^n inputs at once.
 *
 * Row b holds bit b of every input; lane x of the table is input x. Used
 * for whole-table evaluation and exhaustive verification.
 */
class SlicedTable {
 public:
  SlicedTable() = default;

  static SlicedTable all_inputs(std::uint32_t n_bits) {
    if (n_bits > 24) throw BudgetError("sliced table exceeds 2^24 inputs");
    SlicedTable t;
    t.n_ = n_bits;
    t.words_ = (n_bits >= 6) ? (std::size_t{1} << (n_bits - 6)) : 1;
    t.data_.assign(t.words_ * n_bits, 0);
    static constexpr std::uint64_t kLow[6] = {
        0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
        0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};
    for (std::uint32_t b = 0; b < n_bits; ++b) {
      std::uint64_t* r = t.row(b);
      for (std::size_t w = 0; w < t.words_; ++w) {
        r[w] = (b < 6) ? kLow[b] : (((w >> (b - 6)) & 1u) ? ~std::uint64_t{0} : 0);
      }
    }
    return t;
  }

  std::uint32_t n_bits() const { return n_; }
  std::size_t words() const { return words_; }
  std::uint64_t* row(std::uint32_t b) { return data_.data() + b * words_; }
  const std::uint64_t* row(std::uint32_t b) const { return data_.data() + b * words_; }

  /** Number of valid lanes (2^n). */
  std::size_t lanes() const { return std::size_t{1} << n_; }

  /** Mask of valid lanes in word w. */
  std::uint64_t lane_mask(std::size_t w) const {
    (void)w;
    return n_ >= 6 ? ~std::uint64_t{0} : ((std::uint64_t{1} << (std::size_t{1} << n_)) - 1);
  }

  void apply(const Circuit& c) {
    if (c.n_bits() != n_) throw ConfigError("sliced apply: width mismatch");
    for (const auto& g : c.gates()) apply_gate(g);
  }

  void apply_gate(const Gate& g) {
    const std::size_t W = words_;
    switch (g.kind) {
      case GateKind::not_gate: {
        std::uint64_t* t = row(g.target);
        for (std::size_t w = 0; w < W; ++w) t[w] = ~t[w];
        break;
      }
      case GateKind::cnot: {
        std::uint64_t* t = row(g.target);
        const std::uint64_t* c = row(g.controls[0]);
        for (std::size_t w = 0; w < W; ++w) t[w] ^= c[w];
        break;
      }
      case GateKind::toffoli: {
        std::uint64_t* t = row(g.target);
        const std::uint64_t* c1 = row(g.controls[0]);
        const std::uint64_t* c2 = row(g.controls[1]);
        for (std::size_t w = 0; w < W; ++w) t[w] ^= c1[w] & c2[w];
        break;
      }
      case GateKind::swap: {
        std::uint64_t* a = row(g.bits[0]);
        std::uint64_t* b = row(g.bits[1]);
        for (std::size_t w = 0; w < W; ++w) std::swap(a[w], b[w]);
        break;
      }
      case GateKind::mcx: {
        std::uint64_t* t = row(g.target);
        for (std::size_t w = 0; w < W; ++w) {
          std::uint64_t all = ~std::uint64_t{0};
          for (auto c : g.controls) all &= row(c)[w];
          t[w] ^= all;
        }
        break;
      }
      case GateKind::local_perm: {
        const auto& img = sym8_table()[g.sigma];
        std::uint64_t* r[3] = {row(g.bits[0]), row(g.bits[1]), row(g.bits[2])};
        for (std::size_t w = 0; w < W; ++w) {
          std::uint64_t in[3] = {r[0][w], r[1][w], r[2][w]};
          std::uint64_t out[3] = {0, 0, 0};
          for (unsigned v = 0; v < 8; ++v) {
            std::uint64_t match = ~std::uint64_t{0};
            for (int k = 0; k < 3; ++k) match &= ((v >> k) & 1u) ? in[k] : ~in[k];
            for (int k = 0; k < 3; ++k) {
              if ((img[v] >> k) & 1u) out[k] |= match;
            }
          }
          for (int k = 0; k < 3; ++k) r[k][w] = out[k];
        }
        break;
      }
    }
  }

  /** images[x] for every input x. */
  std::vector<std::uint32_t> images() const {
    std::vector<std::uint32_t> out(lanes(), 0);
    for (std::uint32_t b = 0; b < n_; ++b) {
      const std::uint64_t* r = row(b);
      for (std::size_t x = 0; x < out.size(); ++x) {
        out[x] |= static_cast<std::uint32_t>((r[x >> 6] >> (x & 63)) & 1u) << b;
      }
    }
    return out;
  }

  bool operator==(const SlicedTable&) const = default;

 private:
  std::uint32_t n_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> data_;
};

/** Whole-table evaluation; n_bits <= 24. */
inline Permutation to_permutation(const Circuit& c) {
  if (c.n_bits() > 24) throw BudgetError("to_permutation: more than 24 bits");
  SlicedTable t = SlicedTable::all_inputs(c.n_bits());
  t.apply(c);
  return Permutation::from_images(t.images());
}

// ---------------------------------------------------------------------------
// Multi-controlled NOT lowering.

namespace detail {

/** C^kX with k - 2 dirty ancillas: 4(k - 2) Toffolis. */
inline void append_mcx_ladder(Circuit& out, const std::vector<std::uint32_t>& c, std::uint32_t target,
                              const std::vector<std::uint32_t>& a) {
  const std::size_t k = c.size();
  auto down = [&] {
    for (std::size_t i = k - 2; i >= 2; --i) out.add(Gate::toffoli(c[i], a[i - 2], a[i - 1]));
  };
  auto up = [&] {
    for (std::size_t i = 2; i + 2 <= k; ++i) out.add(Gate::toffoli(c[i], a[i - 2], a[i - 1]));
  };
  auto top = [&] { out.add(Gate::toffoli(c[k - 1], a[k - 3], target)); };
  auto base = [&] { out.add(Gate::toffoli(c[0], c[1], a[0])); };
  top();
  down();
  base();
  up();
  top();
  down();
  base();
  up();
}

inline void append_mcx_small(Circuit& out, const std::vector<std::uint32_t>& c, std::uint32_t target,
                             const std::vector<std::uint32_t>& pool) {
  switch (c.size()) {
    case 0: out.add(Gate::x(target)); return;
    case 1: out.add(Gate::cnot(c[0], target)); return;
    case 2: out.add(Gate::toffoli(c[0], c[1], target)); return;
    default:
      if (pool.size() + 2 < c.size()) throw ConfigError("mcx ladder: not enough dirty bits");
      append_mcx_ladder(out, c, target, pool);
  }
}

}  // namespace detail

/**
 * @brief Appends NOT/CNOT/Toffoli gates implementing C^kX.
 *
 * Uses the linear ladder when k - 2 borrowed bits are available, otherwise
 * splits the controls in two halves around a single borrowed bit and lowers
 * each half with a ladder that borrows from the other half.
 */
inline void append_mcx_lowered(Circuit& out, const std::vector<std::uint32_t>& controls, std::uint32_t target,
                               const std::vector<std::uint32_t>& borrowed) {
  const std::size_t k = controls.size();
  if (k <= 2 || borrowed.size() + 2 >= k) {
    detail::append_mcx_small(out, controls, target, borrowed);
    return;
  }
  if (borrowed.empty()) throw ConfigError("mcx with 3 or more controls needs a borrowed bit");
  const std::uint32_t b = borrowed[0];
  const std::size_t h1 = (k + 1) / 2;
  std::vector<std::uint32_t> first(controls.begin(), controls.begin() + static_cast<std::ptrdiff_t>(h1));
  std::vector<std::uint32_t> second(controls.begin() + static_cast<std::ptrdiff_t>(h1), controls.end());
  std::vector<std::uint32_t> pool1 = second;
  pool1.push_back(target);
  std::vector<std::uint32_t> second_b = second;
  second_b.push_back(b);
  for (int rep = 0; rep < 2; ++rep) {
    detail::append_mcx_small(out, first, b, pool1);
    detail::append_mcx_small(out, second_b, target, first);
  }
}

/** Replaces every mcx gate by elementary gates. */
inline Circuit lower(const Circuit& c) {
  Circuit out(c.n_bits());
  for (const auto& g : c.gates()) {
    if (g.kind == GateKind::mcx) {
      append_mcx_lowered(out, g.controls, g.target, g.borrowed);
    } else {
      out.add(g);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text format.

inline std::string serialize(const Circuit& c) {
  std::ostringstream os;
  os << "CIRCUIT n=" << c.n_bits() << '\n';
  for (const auto& g : c.gates()) {
    switch (g.kind) {
      case GateKind::not_gate: os << "NOT " << g.target; break;
      case GateKind::cnot: os << "CNOT " << g.controls[0] << ' ' << g.target; break;
      case GateKind::toffoli:
        os << "TOF " << g.controls[0] << ' ' << g.controls[1] << ' ' << g.target;
        break;
      case GateKind::swap: os << "SWAP " << g.bits[0] << ' ' << g.bits[1]; break;
      case GateKind::local_perm:
        os << "LP " << g.bits[0] << ' ' << g.bits[1] << ' ' << g.bits[2] << ' ' << g.sigma;
        break;
      case GateKind::mcx:
        os << "MCX " << g.controls.size();
        for (auto x : g.controls) os << ' ' << x;
        os << ' ' << g.target;
        for (auto x : g.borrowed) os << ' ' << x;
        break;
    }
    os << '\n';
  }
  return os.str();
}

inline Circuit parse_circuit(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line.rfind("CIRCUIT n=", 0) != 0) {
    throw ConfigError("circuit text must start with 'CIRCUIT n=<n>'");
  }
  Circuit c(static_cast<std::uint32_t>(std::stoul(line.substr(10))));
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string op;
    if (!(ls >> op)) continue;
    std::vector<std::uint32_t> v;
    std::uint32_t x;
    while (ls >> x) v.push_back(x);
    auto need = [&](std::size_t k) {
      if (v.size() != k) throw ConfigError("malformed gate line: " + line);
    };
    if (op == "NOT") {
      need(1);
      c.add(Gate::x(v[0]));
    } else if (op == "CNOT") {
      need(2);
      c.add(Gate::cnot(v[0], v[1]));
    } else if (op == "TOF") {
      need(3);
      c.add(Gate::toffoli(v[0], v[1], v[2]));
    } else if (op == "SWAP") {
      need(2);
      c.add(Gate::swap(v[0], v[1]));
    } else if (op == "LP") {
      need(4);
      c.add(Gate::local_perm(v[0], v[1], v[2], v[3]));
    } else if (op == "MCX") {
      if (v.empty() || v.size() < v[0] + 2) throw ConfigError("malformed gate line: " + line);
      std::vector<std::uint32_t> ctl(v.begin() + 1, v.begin() + 1 + v[0]);
      std::vector<std::uint32_t> bor(v.begin() + 2 + v[0], v.end());
      c.add(Gate::mcx(ctl, v[1 + v[0]], bor));
    } else {
      throw ConfigError("unknown gate: " + op);
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Architectures and gate ensembles.

/** Undirected graph on n vertices, 0-indexed. */
struct ArchGraph {
  std::uint32_t n = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;

  static ArchGraph path(std::uint32_t n) {
    ArchGraph g{n, {}};
    for (std::uint32_t i = 0; i + 1 < n; ++i) g.edges.emplace_back(i, i + 1);
    return g;
  }
  static ArchGraph star(std::uint32_t n) {
    ArchGraph g{n, {}};
    for (std::uint32_t i = 1; i < n; ++i) g.edges.emplace_back(0, i);
    return g;
  }
  static ArchGraph cycle(std::uint32_t n) {
    ArchGraph g = path(n);
    if (n > 2) g.edges.emplace_back(n - 1, 0);
    return g;
  }
  static ArchGraph complete(std::uint32_t n) {
    ArchGraph g{n, {}};
    for (std::uint32_t i = 0; i < n; ++i)
      for (std::uint32_t j = i + 1; j < n; ++j) g.edges.emplace_back(i, j);
    return g;
  }

  bool has_edge(std::uint32_t a, std::uint32_t b) const {
    for (auto [u, v] : edges) {
      if ((u == a && v == b) || (u == b && v == a)) return true;
    }
    return false;
  }

  bool connected() const {
    if (n == 0) return false;
    std::vector<char> seen(n, 0);
    std::vector<std::uint32_t> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      std::uint32_t u = stack.back();
      stack.pop_back();
      for (auto [a, b] : edges) {
        std::uint32_t w = (a == u) ? b : (b == u ? a : n);
        if (w < n && !seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](char s) { return s != 0; });
  }

  /** Ordered triples (i, j, k) of distinct vertices with edges (i,j) and (j,k). */
  std::vector<std::array<std::uint32_t, 3>> admissible_triples() const {
    std::vector<std::array<std::uint32_t, 3>> out;
    for (std::uint32_t j = 0; j < n; ++j)
      for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t k = 0; k < n; ++k) {
          if (i == j || j == k || i == k) continue;
          if (has_edge(i, j) && has_edge(j, k)) out.push_back({i, j, k});
        }
    return out;
  }
};

/** One 3-bit gate: uniform 3-subset (sorted) and uniform Sym(8) element. */
inline Gate sample_rev_all_to_all(std::uint32_t n, SeededRng& rng) {
  if (n < 4) throw ConfigError("sample_rev_all_to_all: n must be at least 4");
  std::array<std::uint32_t, 3> b{};
  for (;;) {
    b = {static_cast<std::uint32_t>(rng.below(n)), static_cast<std::uint32_t>(rng.below(n)),
         static_cast<std::uint32_t>(rng.below(n))};
    if (b[0] != b[1] && b[1] != b[2] && b[0] != b[2]) break;
  }
  std::sort(b.begin(), b.end());
  return Gate::local_perm(b[0], b[1], b[2], static_cast<std::uint32_t>(rng.below(kSym8Order)));
}

/** One 3-bit gate on a uniformly chosen admissible triple of the architecture. */
inline Gate sample_rev_arch(std::uint32_t n, const ArchGraph& arch, SeededRng& rng) {
  if (arch.n != n || !arch.connected()) throw ConfigError("sample_rev_arch: architecture must be connected on n vertices");
  auto triples = arch.admissible_triples();
  if (triples.empty()) throw ConfigError("sample_rev_arch: no admissible triple");
  const auto& tr = triples[rng.below(triples.size())];
  return Gate::local_perm(tr[0], tr[1], tr[2], static_cast<std::uint32_t>(rng.below(kSym8Order)));
}

/** Uniform element of {I, X}^n as a NOT layer. */
inline Circuit sample_bitflip(std::uint32_t n, SeededRng& rng) {
  Circuit c(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    if (rng.below(2)) c.add(Gate::x(i));
  }
  return c;
}

}  // namespace sgl
