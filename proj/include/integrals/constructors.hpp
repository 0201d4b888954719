#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <unordered_map>
#include <vector>

#include "integrals/abelian.hpp"
#include "integrals/descriptor.hpp"
#include "integrals/error.hpp"
#include "integrals/group_table.hpp"
#include "integrals/homomorphism.hpp"
#include "integrals/perm_group.hpp"

namespace integrals {

namespace detail {

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline std::uint64_t mod_mul(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline Permutation perm_from_map(std::size_t n, const std::function<Point(Point)>& f) {
  std::vector<Point> img(n);
  for (Point x = 0; x < n; ++x) img[x] = f(x);
  return Permutation(std::move(img));
}

inline Permutation cycle_on(std::size_t n, std::size_t off, std::size_t len) {
  std::vector<Point> img(n);
  std::iota(img.begin(), img.end(), 0u);
  for (std::size_t i = 0; i < len; ++i) img[off + i] = static_cast<Point>(off + (i + 1) % len);
  return Permutation(std::move(img));
}

/// Moves a permutation of degree k onto points off..off+k-1 of degree n.
inline Permutation shift_perm(const Permutation& p, std::size_t n, std::size_t off) {
  std::vector<Point> img(n);
  std::iota(img.begin(), img.end(), 0u);
  for (Point x = 0; x < p.degree(); ++x) img[off + x] = static_cast<Point>(off + p[x]);
  return Permutation(std::move(img));
}

inline std::uint64_t checked_pow(std::uint64_t b, std::uint64_t e) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < e; ++i) {
    if (r > (std::uint64_t{1} << 40) / std::max<std::uint64_t>(b, 1)) throw PreconditionError("parameter too large");
    r *= b;
  }
  return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Standard families

inline PermGroup cyclic_group(std::uint64_t n) {
  if (n == 0) throw PreconditionError("cyclic: order must be positive");
  if (n == 1) return PermGroup::trivial(1);
  return PermGroup(n, {detail::cycle_on(n, 0, n)});
}

/// Product of cycles of the given lengths on consecutive blocks.
inline PermGroup abelian_group(const std::vector<std::uint64_t>& factors) {
  std::size_t n = 0;
  for (auto d : factors) {
    if (d == 0) throw PreconditionError("abelian: factors must be positive");
    if (d > 1) n += d;
  }
  if (n == 0) return PermGroup::trivial(1);
  std::vector<Permutation> gens;
  std::size_t off = 0;
  for (auto d : factors) {
    if (d < 2) continue;
    gens.push_back(detail::cycle_on(n, off, d));
    off += d;
  }
  return PermGroup(n, gens);
}

inline PermGroup elementary_abelian(std::uint64_t p, std::uint64_t k) {
  if (!detail::is_prime(p)) throw PreconditionError("elemab: p must be prime");
  return abelian_group(std::vector<std::uint64_t>(k, p));
}

/// Dihedral group of the given order 2n, acting on an n-gon (n >= 3).
inline PermGroup dihedral_group(std::uint64_t order) {
  if (order < 2 || order % 2) throw PreconditionError("dihedral: order must be even and at least 2");
  const std::uint64_t n = order / 2;
  if (n == 1) return cyclic_group(2);
  if (n == 2) return elementary_abelian(2, 2);
  Permutation r = detail::cycle_on(n, 0, n);
  Permutation s = detail::perm_from_map(n, [n](Point x) { return static_cast<Point>((n - x) % n); });
  return PermGroup(n, {r, s});
}

/// Generalized quaternion group of order 2^k (k >= 3) in its regular action.
inline PermGroup quaternion_group(std::uint64_t order) {
  if (order < 8 || (order & (order - 1))) throw PreconditionError("quaternion: order must be a power of 2, at least 8");
  const std::uint64_t m = order / 2;  // |<a>|
  // element a^i b^j has index i + m*j
  auto mul = [m](std::uint64_t x, std::uint64_t y) -> std::uint64_t {
    std::uint64_t i = x % m, j = x / m, k = y % m, l = y / m;
    if (j == 0) return (i + k) % m + m * l;
    std::uint64_t e = (i + m - k) % m;
    if (l == 0) return e + m;
    return (e + m / 2) % m;
  };
  std::vector<GroupTable::Index> t(order * order);
  for (std::uint64_t x = 0; x < order; ++x)
    for (std::uint64_t y = 0; y < order; ++y) t[x * order + y] = static_cast<GroupTable::Index>(mul(x, y));
  GroupTable tab = GroupTable::from_cayley(order, std::move(t));
  return tab.regular_group({1, static_cast<GroupTable::Index>(m)});
}

inline PermGroup symmetric_group(std::uint64_t n) {
  if (n == 0) throw PreconditionError("symmetric: degree must be positive");
  if (n == 1) return PermGroup::trivial(1);
  if (n == 2) return cyclic_group(2);
  return PermGroup(n, {detail::cycle_on(n, 0, n), Permutation::from_cycles(n, {{0, 1}})});
}

inline PermGroup alternating_group(std::uint64_t n) {
  if (n == 0) throw PreconditionError("alternating: degree must be positive");
  if (n < 3) return PermGroup::trivial(n);
  Permutation a = Permutation::from_cycles(n, {{0, 1, 2}});
  if (n == 3) return PermGroup(n, {a});
  Permutation b = n % 2 ? detail::cycle_on(n, 0, n) : detail::cycle_on(n, 1, n - 1);
  return PermGroup(n, {a, b});
}

/// SL(2,3) acting on the eight nonzero vectors of F_3^2.
inline PermGroup sl23_group() {
  // vector (u,v) with index 3u+v-1 (skipping 0)
  auto idx = [](int u, int v) { return static_cast<Point>(3 * u + v - 1); };
  auto mat = [&](int a, int b, int c, int d) {
    std::vector<Point> img(8);
    for (int u = 0; u < 3; ++u)
      for (int v = 0; v < 3; ++v) {
        if (!u && !v) continue;
        int x = (a * u + b * v) % 3, y = (c * u + d * v) % 3;
        img[idx(u, v)] = idx(x, y);
      }
    return Permutation(std::move(img));
  };
  return PermGroup(8, {mat(1, 1, 0, 1), mat(1, 0, 1, 1)});
}

/// UT(3, Z/m) acting affinely on (Z/m)^2: (u,v) -> (u + b v + c, v + a).
inline PermGroup heisenberg_group(std::uint64_t m) {
  if (m < 2) throw PreconditionError("heisenberg: modulus must be at least 2");
  const std::size_t n = m * m;
  auto pt = [m](std::uint64_t u, std::uint64_t v) { return static_cast<Point>(u * m + v); };
  auto map = [&](std::uint64_t b, std::uint64_t c, std::uint64_t a) {
    return detail::perm_from_map(n, [=](Point x) {
      std::uint64_t u = x / m, v = x % m;
      return pt((u + b * v + c) % m, (v + a) % m);
    });
  };
  return PermGroup(n, {map(1, 0, 0), map(0, 0, 1), map(0, 1, 0)});
}

/// G_n = <a, b | a^(2^(n-1)) = b^2 = 1, a^b = a^(2^(n-2)+1)>, order 2^n (n >= 3),
/// acting on Z/2^(n-1) by translation (a) and multiplication (b).
inline PermGroup modular_group(std::uint64_t n) {
  if (n < 3 || n > 30) throw PreconditionError("modular: n must be in [3, 30]");
  const std::uint64_t m = std::uint64_t{1} << (n - 1);
  const std::uint64_t u = (std::uint64_t{1} << (n - 2)) + 1;
  return PermGroup(m, {detail::cycle_on(m, 0, m),
                       detail::perm_from_map(m, [=](Point x) { return static_cast<Point>(x * u % m); })});
}

/// Extraspecial group of order p^3 (p odd) of exponent p, or of exponent p^2
/// when `exponent == p*p` (then <a, b | a^(p^2) = b^p = 1, a^b = a^(1+p)>).
inline PermGroup extraspecial_group(std::uint64_t p, std::uint64_t exponent = 0) {
  if (!detail::is_prime(p) || p == 2) throw PreconditionError("extraspecial: p must be an odd prime");
  if (exponent == 0 || exponent == p) return heisenberg_group(p);
  if (exponent != p * p) throw PreconditionError("extraspecial: exponent must be p or p^2");
  const std::uint64_t m = p * p;
  return PermGroup(m, {detail::cycle_on(m, 0, m),
                       detail::perm_from_map(m, [=](Point x) { return static_cast<Point>(x * (1 + p) % m); })});
}

// ---------------------------------------------------------------------------
// Products

inline PermGroup direct_product(const std::vector<PermGroup>& fs) {
  if (fs.empty()) return PermGroup::trivial(1);
  std::size_t n = 0;
  for (const auto& f : fs) n += f.degree();
  std::vector<Permutation> gens;
  std::size_t off = 0;
  for (const auto& f : fs) {
    for (const auto& g : f.generators())
      if (!g.is_identity()) gens.push_back(detail::shift_perm(g, n, off));
    off += f.degree();
  }
  if (gens.empty()) return PermGroup::trivial(n);
  return PermGroup(n, gens);
}

/// B wr T in its imprimitive action on degree(B) * degree(T) points: block
/// i holds a copy of B's points and T permutes the blocks.
inline PermGroup wreath_product(const PermGroup& b, const PermGroup& t) {
  const std::size_t m = b.degree(), k = t.degree(), n = m * k;
  std::vector<Permutation> gens;
  // one copy of B's generators per T-orbit of blocks
  std::vector<bool> seen(k, false);
  for (Point s = 0; s < k; ++s) {
    if (seen[s]) continue;
    std::vector<Point> orb{s};
    seen[s] = true;
    for (std::size_t i = 0; i < orb.size(); ++i)
      for (const auto& g : t.generators())
        if (!seen[g[orb[i]]]) {
          seen[g[orb[i]]] = true;
          orb.push_back(g[orb[i]]);
        }
    for (const auto& g : b.generators())
      if (!g.is_identity()) gens.push_back(detail::shift_perm(g, n, s * m));
  }
  for (const auto& g : t.generators()) {
    if (g.is_identity()) continue;
    gens.push_back(detail::perm_from_map(n, [&](Point x) { return static_cast<Point>(g[x / m] * m + x % m); }));
  }
  if (gens.empty()) return PermGroup::trivial(n);
  return PermGroup(n, gens);
}

/// Left-regular representation (degree |G|).
inline PermGroup regular_representation(const PermGroup& g, const Limits& limits = {}) {
  g.require_enumerable(limits, "regular representation");
  std::vector<Permutation> els = g.elements(limits);
  std::unordered_map<Permutation, Point, PermutationHash> idx;
  for (std::size_t i = 0; i < els.size(); ++i) idx.emplace(els[i], static_cast<Point>(i));
  std::vector<Permutation> gens;
  for (const auto& s : g.generators()) {
    if (s.is_identity()) continue;
    std::vector<Point> img(els.size());
    for (std::size_t i = 0; i < els.size(); ++i) img[i] = idx.at(s * els[i]);
    gens.emplace_back(std::move(img));
  }
  if (gens.empty()) return PermGroup::trivial(els.size());
  return PermGroup(els.size(), gens);
}

/// Evaluates a word over the given generators.
inline Permutation evaluate(const GenWord& w, const std::vector<Permutation>& gens, std::size_t degree) {
  Permutation r(degree);
  for (const auto& f : w.factors) {
    if (f.gen >= gens.size()) throw PreconditionError("word uses generator g" + std::to_string(f.gen + 1) + " that does not exist");
    r = r * gens[f.gen].pow(f.exp);
  }
  return r;
}

/// N ⋊ T where T's k-th generator acts on N by the automorphism sending N's
/// generators to `action[k]`, i.e. t n t^-1 = action_t(n). Realized on the
/// disjoint union of N's and T's elements: n acts by x -> n x on the first
/// part, t acts by x -> action_t(x) there and by s -> t s on the second.
inline PermGroup semidirect_product(const PermGroup& nn, const PermGroup& tt,
                                    const std::vector<std::vector<Permutation>>& action, const Limits& limits = {}) {
  if (action.size() != tt.generators().size())
    throw PreconditionError("semidirect: need one automorphism per top generator");
  auto nel = nn.elements(limits);
  auto tel = tt.elements(limits);
  const std::size_t a = nel.size(), b = tel.size(), n = a + b;
  std::unordered_map<Permutation, Point, PermutationHash> ni, ti;
  for (std::size_t i = 0; i < a; ++i) ni.emplace(nel[i], static_cast<Point>(i));
  for (std::size_t i = 0; i < b; ++i) ti.emplace(tel[i], static_cast<Point>(i));

  // Each action must be an automorphism of N.
  std::vector<Permutation> on_n;  // automorphisms as permutations of N's elements
  for (const auto& imgs : action) {
    if (imgs.size() != nn.generators().size())
      throw PreconditionError("semidirect: automorphism must give one image per bottom generator");
    Homomorphism phi(nn, nn, imgs);
    if (!phi.is_injective()) throw PreconditionError("semidirect: action is not by automorphisms");
    std::vector<Point> img(a);
    for (std::size_t i = 0; i < a; ++i) img[i] = ni.at(phi.apply(nel[i]));
    on_n.emplace_back(std::move(img));
  }
  // t -> action_t must be a homomorphism T -> Aut(N).
  if (!on_n.empty()) {
    PermGroup auts(a, on_n);
    Homomorphism check(tt, auts, on_n);
    (void)check;
  }

  std::vector<Permutation> gens;
  for (const auto& g : nn.generators()) {
    if (g.is_identity()) continue;
    std::vector<Point> img(n);
    for (std::size_t i = 0; i < a; ++i) img[i] = ni.at(g * nel[i]);
    for (std::size_t i = 0; i < b; ++i) img[a + i] = static_cast<Point>(a + i);
    gens.emplace_back(std::move(img));
  }
  for (std::size_t k = 0; k < tt.generators().size(); ++k) {
    const auto& t = tt.generators()[k];
    std::vector<Point> img(n);
    for (std::size_t i = 0; i < a; ++i) img[i] = on_n[k][static_cast<Point>(i)];
    for (std::size_t i = 0; i < b; ++i) img[a + i] = static_cast<Point>(a + ti.at(t * tel[i]));
    gens.emplace_back(std::move(img));
  }
  PermGroup g(n, gens);
  if (g.order() != nn.order() * tt.order()) throw Error("semidirect: order check failed");
  return g;
}

// ---------------------------------------------------------------------------
// Descriptor compilation

inline PermGroup construct(const GroupDescriptor& d, const Limits& limits = {}) {
  using K = GroupDescriptor::Kind;
  auto need = [&](std::size_t k) {
    if (d.params.size() != k)
      throw PreconditionError(std::string(detail::kind_name(d.kind)) + ": expected " + std::to_string(k) + " parameter(s)");
  };
  switch (d.kind) {
    case K::Cyclic:
      need(1);
      return cyclic_group(d.params[0]);
    case K::Abelian:
      return abelian_group(d.params);
    case K::ElementaryAbelian:
      need(2);
      return elementary_abelian(d.params[0], d.params[1]);
    case K::Dihedral:
      need(1);
      return dihedral_group(d.params[0]);
    case K::Quaternion:
      need(1);
      return quaternion_group(d.params[0]);
    case K::Symmetric:
      need(1);
      return symmetric_group(d.params[0]);
    case K::Alternating:
      need(1);
      return alternating_group(d.params[0]);
    case K::SL23:
      need(0);
      return sl23_group();
    case K::Heisenberg:
      need(1);
      return heisenberg_group(d.params[0]);
    case K::Modular:
      need(1);
      return modular_group(d.params[0]);
    case K::Extraspecial:
      if (d.params.size() == 1) return extraspecial_group(d.params[0]);
      need(2);
      return extraspecial_group(d.params[0], d.params[1]);
    case K::Direct: {
      std::vector<PermGroup> fs;
      for (const auto& c : d.children) fs.push_back(construct(c, limits));
      return direct_product(fs);
    }
    case K::Wreath:
      return wreath_product(construct(d.children.at(0), limits), construct(d.children.at(1), limits));
    case K::Regular:
      return regular_representation(construct(d.children.at(0), limits), limits);
    case K::Semidirect: {
      PermGroup nn = construct(d.children.at(0), limits);
      PermGroup tt = construct(d.children.at(1), limits);
      std::vector<std::vector<Permutation>> act;
      for (const auto& imgs : d.action) {
        std::vector<Permutation> ps;
        for (const auto& w : imgs) ps.push_back(evaluate(w, nn.generators(), nn.degree()));
        act.push_back(std::move(ps));
      }
      return semidirect_product(nn, tt, act, limits);
    }
  }
  throw PreconditionError("unknown descriptor kind");
}

inline PermGroup construct(std::string_view text, const Limits& limits = {}) { return construct(parse_descriptor(text), limits); }

// ---------------------------------------------------------------------------
// Explicit integrals

/// For an abelian p-group A = ⊕ C_{p^{n_i}} (rank d, exponent p^n), the
/// group N ⋊ <α> with N = ⊕ C_{p^{n_i+1}} and α raising every element to
/// the power p+1 (inversion when p = 2). Its derived subgroup is N^p ≅ A and
/// |G| = |A| p^{d+n} (|A| 2^{d+1} for p = 2).
///
/// Realized on one block Z/p^{n_i+1} per factor: the i-th generator of N
/// translates block i, α multiplies every block by p+1 (or -1).
inline PermGroup lemma00_integral(const AbelianType& a, std::uint64_t p) {
  if (!detail::is_prime(p)) throw PreconditionError("lemma00_integral: p must be prime");
  for (auto f : a.factors) {
    std::uint64_t x = f;
    while (x % p == 0) x /= p;
    if (x != 1) throw PreconditionError("lemma00_integral: A is not a p-group");
  }
  if (a.factors.empty()) return PermGroup::trivial(1);
  std::vector<std::uint64_t> sizes;
  std::size_t n = 0;
  for (auto f : a.factors) {
    sizes.push_back(f * p);
    n += f * p;
  }
  std::vector<Permutation> gens;
  std::size_t off = 0;
  for (auto s : sizes) {
    gens.push_back(detail::cycle_on(n, off, s));
    off += s;
  }
  std::vector<Point> alpha(n);
  off = 0;
  for (auto s : sizes) {
    for (std::uint64_t x = 0; x < s; ++x) {
      std::uint64_t y = p == 2 ? (s - x) % s : detail::mod_mul(x, p + 1, s);
      alpha[off + x] = static_cast<Point>(off + y);
    }
    off += s;
  }
  gens.emplace_back(std::move(alpha));
  return PermGroup(n, gens);
}

/// (A×A) ⋊ <α> for A = ⊕ Z/d_i, with α: (x,y) -> (y, y-x) or, when
/// `use_order3`, (x,y) -> (y, -x-y). Realized block by block on (Z/d_i)^2
/// with translations and the linear map α. Its derived subgroup is A×A.
inline PermGroup double_integral(const AbelianType& a, bool use_order3) {
  if (use_order3)
    for (auto d : a.factors)
      if (d % 3 == 0) throw PreconditionError("double_integral: order-3 variant needs A without elements of order 3");
  if (a.factors.empty()) return PermGroup::trivial(1);
  std::size_t n = 0;
  for (auto d : a.factors) n += d * d;
  std::vector<Permutation> gens;
  std::vector<Point> alpha(n);
  std::size_t off = 0;
  for (auto d : a.factors) {
    auto pt = [&](std::uint64_t x, std::uint64_t y) { return static_cast<Point>(off + x * d + y); };
    std::vector<Point> tx(n), ty(n);
    std::iota(tx.begin(), tx.end(), 0u);
    std::iota(ty.begin(), ty.end(), 0u);
    for (std::uint64_t x = 0; x < d; ++x)
      for (std::uint64_t y = 0; y < d; ++y) {
        tx[pt(x, y)] = pt((x + 1) % d, y);
        ty[pt(x, y)] = pt(x, (y + 1) % d);
        alpha[pt(x, y)] = use_order3 ? pt(y, (2 * d - x - y) % d) : pt(y, (y + d - x) % d);
      }
    gens.emplace_back(std::move(tx));
    gens.emplace_back(std::move(ty));
    off += d * d;
  }
  gens.emplace_back(std::move(alpha));
  return PermGroup(n, gens);
}

inline PermGroup double_integral(const PermGroup& a, bool use_order3) {
  return double_integral(abelian_invariants(a), use_order3);
}

/// A ⋊ X_n with A cyclic of order p_1...p_m (m = 2^n - 1) and X_n = C2^n,
/// where X_n centralizes the i-th prime factor exactly on its i-th maximal
/// subgroup and inverts it modulo that subgroup. Degree is the sum of the
/// primes: the i-th factor rotates its own block, and the j-th generator
/// of X_n reflects block i when bit j of i is set.
inline PermGroup hn_minimal_integral(std::uint64_t n, const std::vector<std::uint64_t>& primes) {
  if (n < 2 || n > 10) throw PreconditionError("hn_minimal_integral: n must be in [2, 10]");
  const std::size_t m = (std::size_t{1} << n) - 1;
  if (primes.size() != m) throw PreconditionError("hn_minimal_integral: need 2^n - 1 primes");
  for (std::size_t i = 0; i < m; ++i) {
    if (!detail::is_prime(primes[i]) || primes[i] == 2) throw PreconditionError("hn_minimal_integral: primes must be odd primes");
    for (std::size_t j = 0; j < i; ++j)
      if (primes[i] == primes[j]) throw PreconditionError("hn_minimal_integral: primes must be distinct");
  }
  std::size_t deg = 0;
  std::vector<std::size_t> off;
  for (auto p : primes) {
    off.push_back(deg);
    deg += p;
  }
  std::vector<Permutation> gens;
  for (std::size_t i = 0; i < m; ++i) gens.push_back(detail::cycle_on(deg, off[i], primes[i]));
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<Point> img(deg);
    std::iota(img.begin(), img.end(), 0u);
    for (std::size_t i = 0; i < m; ++i) {
      if (!(((i + 1) >> j) & 1)) continue;
      const std::uint64_t p = primes[i];
      for (std::uint64_t x = 0; x < p; ++x) img[off[i] + x] = static_cast<Point>(off[i] + (p - x) % p);
    }
    gens.emplace_back(std::move(img));
  }
  return PermGroup(deg, gens);
}

/// Integral of the homocyclic group (Z/n)^k for even k and 3 ∤ n: the
/// order-3 double integral of (Z/n)^(k/2).
inline PermGroup homocyclic_integral(std::uint64_t n, std::uint64_t k) {
  if (k < 2 || k % 2) throw PreconditionError("homocyclic_integral: k must be even and at least 2");
  if (n < 2) throw PreconditionError("homocyclic_integral: n must be at least 2");
  if (n % 3 == 0) throw PreconditionError("homocyclic_integral: n must be prime to 3");
  AbelianType a;
  a.factors.assign(k / 2, n);
  return double_integral(a, true);
}

}  // namespace integrals
