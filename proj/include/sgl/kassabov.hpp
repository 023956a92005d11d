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
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/miller_rabin.hpp>

#include "json.hpp"
#include "sgl/circuit.hpp"
#include "sgl/ensemble.hpp"
#include "sgl/errors.hpp"
#include "sgl/parallel.hpp"
#include "sgl/partition.hpp"
#include "sgl/permutation.hpp"
#include "sgl/rng.hpp"

namespace sgl {

// ---------------------------------------------------------------------------
// Register layout: six registers of 3s bits; register r holds bits
// [3s r, 3s (r+1)). The acted register is "y", the other five in increasing
// order form the 15s control bits "x".

struct RegisterLayout {
  std::uint32_t s = 1;
  /** Acted register, 0-based. */
  std::uint32_t axis = 0;

  RegisterLayout(std::uint32_t s_, std::uint32_t axis_) : s(s_), axis(axis_) {
    if (s < 1) throw ConfigError("RegisterLayout: s must be at least 1");
    if (axis > 5) throw ConfigError("RegisterLayout: axis must be in [0, 6)");
  }

  std::uint32_t n_bits() const { return 18 * s; }
  std::uint32_t reg_width() const { return 3 * s; }
  std::uint32_t reg_bit(std::uint32_t r, std::uint32_t k) const { return 3 * s * r + k; }

  /** y bit in block i (1..3), position a (1..s). */
  std::uint32_t y(std::uint32_t i, std::uint32_t a) const { return reg_bit(axis, (i - 1) * s + (a - 1)); }

  /** The x-register (0..4) as a register index. */
  std::uint32_t x_register(std::uint32_t xr) const { return xr < axis ? xr : xr + 1; }

  /** Bit at position p (0-based, < 15s) of the concatenated x string. */
  std::uint32_t x_pos(std::uint32_t p) const { return reg_bit(x_register(p / (3 * s)), p % (3 * s)); }

  /** x_{c,a}: c in [1,15], a in [1,s]. */
  std::uint32_t x(std::uint32_t c, std::uint32_t a) const { return x_pos((c - 1) * s + (a - 1)); }

  /** x_{a,b} of the k = 1 family: a in [1,15], b in [1,s]. Same position rule. */
  std::uint32_t x_ab(std::uint32_t a, std::uint32_t b) const { return x(a, b); }

  /** Which x-register (0..4) holds a bit, or -1 for y bits. */
  int x_register_of(std::uint32_t bit) const {
    std::uint32_t r = bit / (3 * s);
    if (r == axis) return -1;
    return static_cast<int>(r < axis ? r : r - 1);
  }
};

enum class SymbolKind { one, a, b, z, y };

/** E_{ij}(w) with w in {1, a, b, z_c, y}. */
struct Symbol {
  SymbolKind kind = SymbolKind::one;
  std::uint32_t i = 1, j = 2;
  std::uint32_t c = 0;

  std::string to_string() const {
    std::string w;
    switch (kind) {
      case SymbolKind::one: w = "1"; break;
      case SymbolKind::a: w = "a"; break;
      case SymbolKind::b: w = "b"; break;
      case SymbolKind::z: w = "z" + std::to_string(c); break;
      case SymbolKind::y: w = "y"; break;
    }
    return "E" + std::to_string(i) + std::to_string(j) + "(" + w + ")";
  }

  bool operator==(const Symbol&) const = default;
};

enum class Family { depth1, k1 };

inline const char* to_string(Family f) { return f == Family::depth1 ? "depth1_k15" : "k1_toffoli"; }

/**
 * Generators per embedding: the six E_ab(1), then for (i,j) in
 * (1,2),(2,3),(2,1),(3,2) the symbols a, b and z_1..z_15 (or y for k = 1).
 */
inline std::vector<Symbol> generator_symbols(Family f = Family::depth1) {
  std::vector<Symbol> out;
  for (std::uint32_t i = 1; i <= 3; ++i)
    for (std::uint32_t j = 1; j <= 3; ++j)
      if (i != j) out.push_back({SymbolKind::one, i, j, 0});
  const std::array<std::pair<std::uint32_t, std::uint32_t>, 4> pairs{{{1, 2}, {2, 3}, {2, 1}, {3, 2}}};
  for (auto [i, j] : pairs) {
    out.push_back({SymbolKind::a, i, j, 0});
    out.push_back({SymbolKind::b, i, j, 0});
    if (f == Family::depth1) {
      for (std::uint32_t c = 1; c <= 15; ++c) out.push_back({SymbolKind::z, i, j, c});
    } else {
      out.push_back({SymbolKind::y, i, j, 0});
    }
  }
  return out;
}

struct GeneratorDescriptor {
  std::uint32_t s = 1;
  /** 1-based embedding axis. */
  std::uint32_t axis = 1;
  Symbol symbol;
  /** Bit r set: register r is complemented around the generator. */
  std::uint32_t u = 0;
  Family family = Family::depth1;
};

/** Untrivialized generator circuit on 18s bits. */
inline Circuit build_generator(const GeneratorDescriptor& d) {
  if (d.axis < 1 || d.axis > 6) throw ConfigError("build_generator: axis must be in [1, 6]");
  const Symbol& sy = d.symbol;
  if (sy.i < 1 || sy.i > 3 || sy.j < 1 || sy.j > 3 || sy.i == sy.j) throw ConfigError("build_generator: invalid (i, j)");
  if (d.family == Family::k1 && d.s < 15) throw ConfigError("build_generator: the k = 1 family needs s >= 15");
  if ((sy.kind == SymbolKind::z && d.family == Family::k1) || (sy.kind == SymbolKind::y && d.family == Family::depth1)) {
    throw ConfigError("build_generator: symbol not in the family");
  }
  RegisterLayout L(d.s, d.axis - 1);
  const std::uint32_t s = d.s;
  Circuit c(L.n_bits());
  switch (sy.kind) {
    case SymbolKind::one:
      for (std::uint32_t a = 1; a <= s; ++a) c.add(Gate::cnot(L.y(sy.j, a), L.y(sy.i, a)));
      break;
    case SymbolKind::a:
      // Row r of A has its 1 in column r + 1 (cyclically).
      for (std::uint32_t r = 1; r <= s; ++r) c.add(Gate::cnot(L.y(sy.j, r % s + 1), L.y(sy.i, r)));
      break;
    case SymbolKind::b:
      c.add(Gate::cnot(L.y(sy.j, 1), L.y(sy.i, 1)));
      break;
    case SymbolKind::z:
      if (sy.c < 1 || sy.c > 15) throw ConfigError("build_generator: z index must be in [1, 15]");
      for (std::uint32_t a = 1; a <= s; ++a) c.add(Gate::toffoli(L.x(sy.c, a), L.y(sy.j, a), L.y(sy.i, a)));
      break;
    case SymbolKind::y:
      for (std::uint32_t a = 1; a <= 15; ++a)
        for (std::uint32_t b = 1; b <= s; ++b) c.add(Gate::toffoli(L.x_ab(a, b), L.y(sy.j, b), L.y(sy.i, a)));
      break;
  }
  return c;
}

/** Component label w(x): bit r set iff register r is nonzero. */
inline std::uint32_t component_of(std::uint64_t x, std::uint32_t s) {
  const std::uint64_t reg_mask = (std::uint64_t{1} << (3 * s)) - 1;
  std::uint32_t w = 0;
  for (std::uint32_t r = 0; r < 6; ++r)
    if ((x >> (3 * s * r)) & reg_mask) w |= 1u << r;
  return w;
}

inline bool in_good_set(std::uint64_t x, std::uint32_t s) { return component_of(x, s) == 0x3fu; }

/** |K(1^6)| = (2^{3s} - 1)^6. */
inline BigInt good_set_size(std::uint32_t s) {
  BigInt k = (BigInt(1) << (3 * s)) - 1;
  return k * k * k * k * k * k;
}

/** Images of every 18-bit input under a circuit at s = 1. */
inline std::vector<std::uint32_t> images_s1(const Circuit& c) {
  if (c.n_bits() != 18) throw ConfigError("images_s1: circuit must have 18 bits");
  SlicedTable t = SlicedTable::all_inputs(18);
  t.apply(c);
  return t.images();
}

/**
 * Whether the circuit maps every component K(w) into itself: exhaustive
 * for s = 1, otherwise on `samples` uniform random inputs.
 */
inline bool preserves_goodset(const Circuit& c, std::uint32_t s, std::uint64_t seed = 0, std::size_t samples = 100000) {
  if (c.n_bits() != 18 * s) throw ConfigError("preserves_goodset: circuit width must be 18s");
  if (s == 1) {
    auto img = images_s1(c);
    for (std::uint32_t x = 0; x < img.size(); ++x)
      if (component_of(x, 1) != component_of(img[x], 1)) return false;
    return true;
  }
  if (18 * s > 64) {
    SeededRng rng(seed, 0x600d);
    const std::uint32_t n = 18 * s;
    for (std::size_t k = 0; k < samples; ++k) {
      BitString x(n);
      for (std::uint32_t b = 0; b < n; ++b)
        if (rng.below(2)) x.flip(b);
      BitString y = apply(c, x);
      for (std::uint32_t r = 0; r < 6; ++r) {
        bool nx = false, ny = false;
        for (std::uint32_t b = 0; b < 3 * s; ++b) {
          nx = nx || x.get(3 * s * r + b);
          ny = ny || y.get(3 * s * r + b);
        }
        if (nx != ny) return false;
      }
    }
    return true;
  }
  SeededRng rng(seed, 0x600d);
  const std::uint64_t mask = (18 * s == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << (18 * s)) - 1);
  for (std::size_t k = 0; k < samples; ++k) {
    std::uint64_t x = rng.next() & mask;
    if (component_of(x, s) != component_of(apply(c, x), s)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Multi-controlled NOT circuits.

/** C^mX on controls 0..m-1, target m, one borrowed bit m+1; NOT/CNOT/Toffoli only. */
inline Circuit mcx_decompose(std::uint32_t m) {
  if (m < 2) throw ConfigError("mcx_decompose: m must be at least 2");
  std::vector<std::uint32_t> controls(m);
  for (std::uint32_t i = 0; i < m; ++i) controls[i] = i;
  Circuit c(m + 2);
  append_mcx_lowered(c, controls, m, {m + 1});
  return c;
}

/**
 * C^m(X^{⊗l}) on controls 0..m-1 and targets m..m+l-1 without extra bits:
 * a CNOT staircase over the targets conjugates C^mX on the first target,
 * which borrows the second target.
 */
inline Circuit cmx_parallel(std::uint32_t m, std::uint32_t l) {
  if (m < 2 || l < 2) throw ConfigError("cmx_parallel: need m >= 2 and l >= 2");
  std::vector<std::uint32_t> controls(m), targets(l);
  for (std::uint32_t i = 0; i < m; ++i) controls[i] = i;
  for (std::uint32_t i = 0; i < l; ++i) targets[i] = m + i;
  Circuit c(m + l);
  for (std::uint32_t k = l - 1; k >= 1; --k) c.add(Gate::cnot(targets[k - 1], targets[k]));
  append_mcx_lowered(c, controls, targets[0], {targets[1]});
  for (std::uint32_t k = 1; k < l; ++k) c.add(Gate::cnot(targets[k - 1], targets[k]));
  return c;
}

namespace detail {

/** cmx_parallel on arbitrary bits, appended to `out`. */
inline void append_cmx(Circuit& out, const std::vector<std::uint32_t>& controls, const std::vector<std::uint32_t>& targets) {
  const std::size_t l = targets.size();
  for (std::size_t k = l - 1; k >= 1; --k) out.add(Gate::cnot(targets[k - 1], targets[k]));
  append_mcx_lowered(out, controls, targets[0], {targets[1]});
  for (std::size_t k = 1; k < l; ++k) out.add(Gate::cnot(targets[k - 1], targets[k]));
}

/** A bit of [0, n) outside `used`, preferring `hint` and then scanning upward from it. */
inline std::uint32_t free_bit(std::uint32_t n, const std::vector<char>& used, std::uint32_t hint) {
  for (std::uint32_t k = 0; k < n; ++k) {
    std::uint32_t b = (hint + k) % n;
    if (!used[b]) return b;
  }
  throw ConfigError("no free bit available to borrow");
}

}  // namespace detail

/** Number of nonempty subsets of the five x-registers used as amendment layers. */
inline constexpr std::uint32_t kAmendmentLayers = 31;

/**
 * @brief Generator with trivial action outside K(1^6).
 *
 * Appends, for every nonempty set R of x-registers, the gates of W not
 * controlled from R, applied only when every register in R is zero. Per
 * layer with L >= 2 gates, each gate gets its own borrowed bit b_i and the
 * layer is [C_{b_i} g_i] C^m(X^{⊗L})(R -> b) [C_{b_i} g_i] C^m(X^{⊗L})(R -> b);
 * a single gate becomes one multi-controlled NOT. Borrowed bits avoid R and
 * every kept gate, and are chosen greedily in increasing bit order.
 */
inline Circuit trivialize(const GeneratorDescriptor& d, bool lowered = true) {
  Circuit W = build_generator(d);
  RegisterLayout L(d.s, d.axis - 1);
  const std::uint32_t n = L.n_bits();
  Circuit out = W;
  for (std::uint32_t R = 1; R < 32; ++R) {
    std::vector<std::uint32_t> rbits;
    for (std::uint32_t xr = 0; xr < 5; ++xr) {
      if (!(R >> xr & 1u)) continue;
      std::uint32_t reg = L.x_register(xr);
      for (std::uint32_t k = 0; k < 3 * d.s; ++k) rbits.push_back(L.reg_bit(reg, k));
    }
    std::vector<Gate> kept;
    for (const auto& g : W.gates()) {
      bool dropped = false;
      for (auto c : g.controls) {
        int xr = L.x_register_of(c);
        if (xr >= 0 && (R >> xr & 1u)) dropped = true;
      }
      if (!dropped) kept.push_back(g);
    }
    if (kept.empty()) continue;
    std::vector<char> used(n, 0);
    for (auto b : rbits) used[b] = 1;
    for (const auto& g : kept)
      for (auto b : g.support()) used[b] = 1;

    for (auto b : rbits) out.add(Gate::x(b));
    if (kept.size() == 1) {
      const Gate& g = kept.front();
      std::vector<std::uint32_t> controls = rbits;
      controls.insert(controls.end(), g.controls.begin(), g.controls.end());
      std::vector<std::uint32_t> borrowed;
      for (std::uint32_t b = 0; b < n; ++b)
        if (!used[b]) borrowed.push_back(b);
      if (borrowed.empty()) throw ConfigError("trivialize: no bit to borrow");
      out.add(Gate::mcx(controls, g.target, borrowed));
    } else {
      std::vector<std::uint32_t> anc;
      std::vector<char> taken = used;
      for (std::size_t i = 0; i < kept.size(); ++i) {
        std::uint32_t b = detail::free_bit(n, taken, 0);
        taken[b] = 1;
        anc.push_back(b);
      }
      auto controlled_layer = [&] {
        for (std::size_t i = 0; i < kept.size(); ++i) {
          const Gate& g = kept[i];
          std::vector<std::uint32_t> controls{anc[i]};
          controls.insert(controls.end(), g.controls.begin(), g.controls.end());
          if (controls.size() == 2) {
            out.add(Gate::toffoli(controls[0], controls[1], g.target));
          } else {
            // Borrow the next gate's ancilla; it is idle at this point.
            std::uint32_t spare = anc[(i + 1) % anc.size()];
            out.add(Gate::mcx(controls, g.target, {spare}));
          }
        }
      };
      controlled_layer();
      detail::append_cmx(out, rbits, anc);
      controlled_layer();
      detail::append_cmx(out, rbits, anc);
    }
    for (auto b : rbits) out.add(Gate::x(b));
  }
  return lowered ? lower(out) : out;
}

/** X(u) c X(u), with X(u) complementing every register r whose bit is set in u. */
inline Circuit conjugate_bitflip(const Circuit& c, std::uint32_t u, std::uint32_t s) {
  if (c.n_bits() != 18 * s) throw ConfigError("conjugate_bitflip: circuit width must be 18s");
  if (u >= 64) throw ConfigError("conjugate_bitflip: u must be a 6-bit mask");
  Circuit out(c.n_bits());
  auto layer = [&] {
    for (std::uint32_t r = 0; r < 6; ++r)
      if (u >> r & 1u)
        for (std::uint32_t k = 0; k < 3 * s; ++k) out.add(Gate::x(3 * s * r + k));
  };
  layer();
  out.append(c);
  layer();
  return out;
}

/** Largest number of gates touching any single bit. */
inline std::size_t max_gates_per_bit(const Circuit& c) {
  std::vector<std::size_t> count(c.n_bits(), 0);
  for (const auto& g : c.gates()) {
    for (auto b : g.support()) ++count[b];
  }
  return count.empty() ? 0 : *std::max_element(count.begin(), count.end());
}

/**
 * @brief Generating set for Alt(2^n), n >= 18: trivialized generators at
 * s = floor(n / 18) for every axis, every u in F_2^6 and every symbol,
 * placed at each bit offset 0..n - 18s. Circuits are built on demand.
 */
class Alt2nGenerators {
 public:
  explicit Alt2nGenerators(std::uint32_t n) : n_(n) {
    if (n < 18) throw ConfigError("build_alt2n_generators: n must be at least 18");
    s_ = n / 18;
    symbols_ = generator_symbols(Family::depth1);
    base_.resize(6 * symbols_.size());
  }

  std::uint32_t n() const { return n_; }
  std::uint32_t s() const { return s_; }
  std::uint32_t offsets() const { return n_ - 18 * s_ + 1; }
  std::size_t size() const { return std::size_t{64} * 6 * symbols_.size() * offsets(); }

  struct Entry {
    GeneratorDescriptor descriptor;
    std::uint32_t offset = 0;
  };

  /** Index order: offset, then u, then axis, then symbol. */
  Entry entry(std::size_t index) const {
    if (index >= size()) throw std::out_of_range("Alt2nGenerators: index out of range");
    const std::size_t ns = symbols_.size();
    Entry e;
    e.descriptor.s = s_;
    e.descriptor.symbol = symbols_[index % ns];
    index /= ns;
    e.descriptor.axis = static_cast<std::uint32_t>(index % 6) + 1;
    index /= 6;
    e.descriptor.u = static_cast<std::uint32_t>(index % 64);
    e.offset = static_cast<std::uint32_t>(index / 64);
    return e;
  }

  Circuit circuit(std::size_t index) const {
    Entry e = entry(index);
    const std::size_t key = (e.descriptor.axis - 1) * symbols_.size() + index % symbols_.size();
    const Circuit& base = trivialized(key, e.descriptor);
    Circuit c = conjugate_bitflip(base, e.descriptor.u, s_);
    return e.offset == 0 && n_ == 18 * s_ ? c : c.shifted(e.offset, n_);
  }

  nlohmann::json manifest_entry(std::size_t index) const {
    Entry e = entry(index);
    Circuit c = circuit(index);
    return nlohmann::json{{"s", s_},
                          {"family", to_string(e.descriptor.family)},
                          {"axis", e.descriptor.axis},
                          {"symbol", e.descriptor.symbol.to_string()},
                          {"u", e.descriptor.u},
                          {"offset", e.offset},
                          {"gate_count", c.size()}};
  }

 private:
  const Circuit& trivialized(std::size_t key, const GeneratorDescriptor& d) const {
    std::lock_guard<std::mutex> lock(*mutex_);
    if (!base_[key]) {
      GeneratorDescriptor plain = d;
      plain.u = 0;
      base_[key] = trivialize(plain);
    }
    return *base_[key];
  }

  std::uint32_t n_;
  std::uint32_t s_;
  std::vector<Symbol> symbols_;
  mutable std::vector<std::optional<Circuit>> base_;
  std::shared_ptr<std::mutex> mutex_ = std::make_shared<std::mutex>();
};

inline Alt2nGenerators build_alt2n_generators(std::uint32_t n) { return Alt2nGenerators(n); }

// ---------------------------------------------------------------------------
// Generators of Alt(p^3 - 1) over F_p^3 minus the origin.

struct CapraceGenerators {
  std::uint64_t p = 3;
  Permutation sigma, alpha, beta, tau;
};

/** Point (x, y, z) has index x + p y + p^2 z - 1. */
inline CapraceGenerators caprace_generators(std::uint64_t p) {
  if (p < 3 || p % 2 == 0 || !boost::multiprecision::miller_rabin_test(BigInt(p), 40)) {
    throw ConfigError("caprace_generators: p must be an odd prime");
  }
  if (p * p * p - 1 > kMaxTablePoints) throw BudgetError("caprace_generators: p^3 - 1 exceeds the table budget");
  const std::uint64_t N = p * p * p - 1;
  auto idx = [p](std::uint64_t x, std::uint64_t y, std::uint64_t z) {
    return static_cast<std::uint32_t>(x + p * y + p * p * z - 1);
  };
  std::vector<std::uint32_t> s(N), a(N), b(N), t(N);
  for (std::uint64_t i = 0; i < N; ++i) {
    std::uint64_t v = i + 1;
    std::uint64_t x = v % p, y = (v / p) % p, z = v / (p * p);
    s[i] = idx(y, z, x);
    a[i] = idx((x + y) % p, y, z);
    b[i] = idx((x + y * y) % p, y, z);
    t[i] = static_cast<std::uint32_t>(i);
  }
  std::swap(t[idx(1, 0, 0)], t[idx(0, 1, 0)]);
  CapraceGenerators g;
  g.p = p;
  g.sigma = Permutation::from_images(std::move(s));
  g.alpha = Permutation::from_images(std::move(a));
  g.beta = Permutation::from_images(std::move(b));
  g.tau = Permutation::from_images(std::move(t));
  return g;
}

/** Uniform walk over {sigma, alpha, beta} and their inverses. */
inline EnsembleExpr caprace_walk(const CapraceGenerators& g) {
  std::vector<Permutation> perms{g.sigma, inverse(g.sigma), g.alpha, inverse(g.alpha), g.beta, inverse(g.beta)};
  std::vector<double> w(perms.size(), 1.0 / 6.0);
  const std::uint32_t N = static_cast<std::uint32_t>(g.sigma.size());
  return ensembles::finite_support(N, 1, std::move(w), std::move(perms), "Caprace(" + std::to_string(g.p) + ")");
}

/** Size of the orbit of `start` under the given permutations (breadth-first). */
inline std::size_t orbit_size(const std::vector<Permutation>& gens, std::uint32_t start) {
  if (gens.empty()) return 1;
  std::vector<char> seen(gens.front().size(), 0);
  std::vector<std::uint32_t> queue{start};
  seen[start] = 1;
  for (std::size_t h = 0; h < queue.size(); ++h) {
    for (const auto& g : gens) {
      std::uint32_t y = g[queue[h]];
      if (!seen[y]) {
        seen[y] = 1;
        queue.push_back(y);
      }
    }
  }
  return queue.size();
}

/** Prime p with 2^(n-1) < p < 2^n by rejection sampling with Miller-Rabin (40 rounds). */
inline std::uint64_t random_prime_near(std::uint32_t n, SeededRng& rng, std::size_t max_trials = 100000) {
  if (n < 2 || n > 63) throw ConfigError("random_prime_near: n must be in [2, 63]");
  if (n == 2) return 3;
  const std::uint64_t lo = std::uint64_t{1} << (n - 1);
  std::mt19937_64 mr_engine(rng.next());
  for (std::size_t k = 0; k < max_trials; ++k) {
    std::uint64_t cand = lo + 1 + rng.below(lo - 1);  // (2^(n-1), 2^n)
    cand |= 1u;
    if (cand >= 2 * lo) continue;
    if (boost::multiprecision::miller_rabin_test(BigInt(cand), 40, mr_engine)) return cand;
  }
  throw BudgetError("random_prime_near: trial budget exhausted");
}

// ---------------------------------------------------------------------------
// Three-factor decomposition over overlapping supports.

struct OverlapFactors {
  Permutation l, r, l_prime;
};

namespace detail {

inline Permutation transposition(std::size_t n, std::uint32_t a, std::uint32_t b) {
  std::vector<std::uint32_t> img(n);
  std::iota(img.begin(), img.end(), 0u);
  std::swap(img[a], img[b]);
  return Permutation::from_images(std::move(img));
}

}  // namespace detail

/**
 * p = l r l' with l, l' supported on A ∪ B and r on B ∪ C. First l^{-1}
 * routes the images of C into B ∪ C, then r^{-1} returns them to C, and
 * l' = r^{-1} l^{-1} p fixes C. With `alternating`, p must be even and a
 * transposition inside B fixes the parities of all three factors.
 */
inline OverlapFactors decompose_overlapping(const Permutation& p, const std::vector<std::uint32_t>& A,
                                           const std::vector<std::uint32_t>& B, const std::vector<std::uint32_t>& C,
                                           bool alternating = false) {
  const std::size_t N = p.size();
  if (B.size() < C.size()) throw ConfigError("decompose_overlapping: requires |B| >= |C|");
  std::vector<int> part(N, -1);
  auto mark = [&](const std::vector<std::uint32_t>& S, int label) {
    for (auto x : S) {
      if (x >= N || part[x] != -1) throw ConfigError("decompose_overlapping: sets must be disjoint and in range");
      part[x] = label;
    }
  };
  mark(A, 0);
  mark(B, 1);
  mark(C, 2);
  for (std::uint32_t x = 0; x < N; ++x)
    if (part[x] == -1 && p[x] != x) throw ConfigError("decompose_overlapping: p moves a point outside A ∪ B ∪ C");
  if (alternating) {
    if (B.size() < 2) throw ConfigError("decompose_overlapping: the alternating variant needs |B| >= 2");
    if (parity(p) != Parity::even) throw ConfigError("decompose_overlapping: p must be even");
  }

  // l^{-1}: move images of C that lie in A onto unused points of B.
  std::vector<std::uint32_t> linv(N);
  std::iota(linv.begin(), linv.end(), 0u);
  std::vector<char> b_used(N, 0);
  for (auto c : C)
    if (part[p[c]] == 1) b_used[p[c]] = 1;
  std::size_t bi = 0;
  for (auto c : C) {
    std::uint32_t y = p[c];
    if (part[y] != 0) continue;
    while (b_used[B[bi]]) ++bi;
    std::uint32_t b = B[bi];
    b_used[b] = 1;
    std::swap(linv[y], linv[b]);
  }
  Permutation l_inv = Permutation::from_images(linv);
  Permutation q = compose(l_inv, p);

  // r^{-1} on B ∪ C: q(c) -> c, remaining points matched in order, fixed where possible.
  std::vector<std::uint32_t> rinv(N);
  std::iota(rinv.begin(), rinv.end(), 0u);
  std::vector<char> dom_used(N, 0), cod_used(N, 0);
  for (auto c : C) {
    rinv[q[c]] = c;
    dom_used[q[c]] = 1;
    cod_used[c] = 1;
  }
  std::vector<std::uint32_t> BC = B;
  BC.insert(BC.end(), C.begin(), C.end());
  for (auto x : BC)
    if (!dom_used[x] && !cod_used[x]) {
      rinv[x] = x;
      dom_used[x] = cod_used[x] = 1;
    }
  std::vector<std::uint32_t> dom_rest, cod_rest;
  for (auto x : BC) {
    if (!dom_used[x]) dom_rest.push_back(x);
    if (!cod_used[x]) cod_rest.push_back(x);
  }
  for (std::size_t k = 0; k < dom_rest.size(); ++k) rinv[dom_rest[k]] = cod_rest[k];
  Permutation r_inv = Permutation::from_images(rinv);

  OverlapFactors f;
  f.l = inverse(l_inv);
  f.r = inverse(r_inv);
  f.l_prime = compose(r_inv, q);
  if (alternating) {
    Permutation tB = detail::transposition(N, B[0], B[1]);
    if (parity(f.l) == Parity::odd) {
      f.l = compose(f.l, tB);
      f.r = compose(tB, f.r);
    }
    if (parity(f.r) == Parity::odd) {
      f.r = compose(f.r, tB);
      f.l_prime = compose(tB, f.l_prime);
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// Bit-flip sandwiches of the untrivialized generators.

struct SandwichDraw {
  Circuit circuit;
  /** Index into the 6 x 74 untrivialized set, axis-major. */
  std::size_t generator = 0;
};

/** The untrivialized set S_0 at s: 74 symbols on each of the six axes. */
inline std::vector<GeneratorDescriptor> untrivialized_set(std::uint32_t s) {
  std::vector<GeneratorDescriptor> out;
  for (std::uint32_t axis = 1; axis <= 6; ++axis)
    for (const auto& sy : generator_symbols(Family::depth1)) out.push_back({s, axis, sy, 0, Family::depth1});
  return out;
}

/** x y z with x, z uniform bit-flip layers and y uniform over S_0. */
inline SandwichDraw appendix_b_sampler(std::uint32_t s, SeededRng& rng) {
  if (s < 1) throw ConfigError("appendix_b_sampler: s must be at least 1");
  const std::uint32_t n = 18 * s;
  const std::size_t count = 6 * generator_symbols(Family::depth1).size();
  SandwichDraw d;
  d.generator = rng.below(count);
  const std::uint32_t axis = static_cast<std::uint32_t>(d.generator / (count / 6)) + 1;
  const Symbol sy = generator_symbols(Family::depth1)[d.generator % (count / 6)];
  d.circuit = Circuit(n);
  d.circuit.append(sample_bitflip(n, rng));
  d.circuit.append(build_generator({s, axis, sy, 0, Family::depth1}));
  d.circuit.append(sample_bitflip(n, rng));
  return d;
}

// ---------------------------------------------------------------------------
// Exhaustive checks at s = 1.

struct TrivializationCheck {
  std::size_t exterior_fixed = 0;
  std::size_t good_agree = 0;
  bool involution = false;
  bool even = false;
  bool ok() const { return exterior_fixed == 144495 && good_agree == 117649 && involution && even; }
};

inline TrivializationCheck check_trivialized_s1(const GeneratorDescriptor& d) {
  if (d.s != 1) throw ConfigError("check_trivialized_s1: s must be 1");
  auto plain = images_s1(build_generator(d));
  auto triv = images_s1(trivialize(d));
  TrivializationCheck r;
  r.involution = true;
  for (std::uint32_t x = 0; x < triv.size(); ++x) {
    if (in_good_set(x, 1)) {
      if (triv[x] == plain[x]) ++r.good_agree;
    } else if (triv[x] == x) {
      ++r.exterior_fixed;
    }
    if (triv[triv[x]] != x) r.involution = false;
  }
  r.even = parity(Permutation::from_images(std::move(triv))) == Parity::even;
  return r;
}

/** Every bit-string point is mapped to itself after two applications. */
inline bool is_involution_s1(const Circuit& c) {
  auto img = images_s1(c);
  for (std::uint32_t x = 0; x < img.size(); ++x)
    if (img[img[x]] != x) return false;
  return true;
}

/**
 * Sets of three bits touched by the elementary gates of the trivialized set;
 * gates on fewer bits are padded with the cyclically next bits.
 */
inline std::vector<std::array<std::uint32_t, 3>> kassabov_triples(std::uint32_t s = 1) {
  std::set<std::array<std::uint32_t, 3>> out;
  for (const auto& d : untrivialized_set(s)) {
    Circuit c = trivialize(d);
    for (const auto& g : c.gates()) {
      std::vector<std::uint32_t> sup = g.support();
      const std::uint32_t n = c.n_bits();
      for (std::uint32_t k = 1; sup.size() < 3; ++k) {
        std::uint32_t b = (sup.front() + k) % n;
        if (std::find(sup.begin(), sup.end(), b) == sup.end()) sup.push_back(b);
      }
      std::sort(sup.begin(), sup.end());
      out.insert({sup[0], sup[1], sup[2]});
    }
  }
  return {out.begin(), out.end()};
}

}  // namespace sgl
