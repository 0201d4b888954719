#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "integrals/error.hpp"
#include "integrals/perm_group.hpp"

namespace integrals {

/// Invariant factors d1 | d2 | ... | dr, each at least 2.
struct AbelianType {
  std::vector<std::uint64_t> factors;

  std::size_t rank() const { return factors.size(); }

  BigInt order() const {
    BigInt o = 1;
    for (auto d : factors) o *= d;
    return o;
  }

  std::uint64_t exponent() const { return factors.empty() ? 1 : factors.back(); }

  /// Rank of the Sylow p-subgroup: factors divisible by p.
  std::size_t p_rank(std::uint64_t p) const {
    return static_cast<std::size_t>(std::count_if(factors.begin(), factors.end(), [p](auto d) { return d % p == 0; }));
  }

  /// Exponents of the cyclic p-power factors, largest first.
  std::vector<unsigned> p_type(std::uint64_t p) const {
    std::vector<unsigned> out;
    for (auto d : factors) {
      unsigned e = 0;
      while (d % p == 0) {
        d /= p;
        ++e;
      }
      if (e) out.push_back(e);
    }
    std::sort(out.rbegin(), out.rend());
    return out;
  }

  bool operator==(const AbelianType&) const = default;

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < factors.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(factors[i]);
    }
    return s + ")";
  }

  /// Builds the type from prime-power elementary divisors.
  static AbelianType from_elementary_divisors(const std::map<std::uint64_t, std::vector<unsigned>>& by_prime) {
    std::size_t r = 0;
    for (const auto& [p, es] : by_prime) r = std::max(r, es.size());
    std::vector<std::uint64_t> f(r, 1);
    for (const auto& [p, es0] : by_prime) {
      auto es = es0;
      std::sort(es.begin(), es.end());  // smallest first, aligned to the right
      const std::size_t off = r - es.size();
      for (std::size_t i = 0; i < es.size(); ++i)
        for (unsigned k = 0; k < es[i]; ++k) f[off + i] *= p;
    }
    AbelianType t;
    for (auto d : f)
      if (d > 1) t.factors.push_back(d);
    return t;
  }
};

/// Primes dividing a group order; prime factors of a permutation group's
/// order never exceed its degree.
inline std::vector<std::uint64_t> prime_divisors(BigInt n, std::uint64_t bound) {
  std::vector<std::uint64_t> ps;
  for (std::uint64_t p = 2; p <= std::max<std::uint64_t>(bound, 2) && n > 1; ++p) {
    if (n % p != 0) continue;
    ps.push_back(p);
    while (n % p == 0) n /= p;
  }
  if (n > 1) throw Error("prime_divisors: residual factor above bound");
  return ps;
}

inline unsigned valuation(BigInt n, std::uint64_t p) {
  unsigned e = 0;
  while (n != 0 && n % p == 0) {
    n /= p;
    ++e;
  }
  return e;
}

/// Invariant factors of an abelian permutation group, computed per prime
/// from the orders of the power subgroups A^(p^i) = <g^(p^i)>.
inline AbelianType abelian_invariants(const PermGroup& a) {
  if (!a.is_abelian()) throw PreconditionError("abelian_invariants: group is not abelian");
  const BigInt order = a.order();
  std::map<std::uint64_t, std::vector<unsigned>> by_prime;
  for (std::uint64_t p : prime_divisors(order, a.degree())) {
    const unsigned e = valuation(order, p);
    // v[i] = log_p |A_p^(p^i)|
    std::vector<unsigned> v{e};
    std::vector<Permutation> cur = a.generators();
    while (v.back() > 0) {
      for (auto& g : cur) g = g.pow(static_cast<std::int64_t>(p));
      v.push_back(valuation(PermGroup(a.degree(), cur).order(), p));
    }
    // Number of cyclic factors of order >= p^(i+1) is v[i] - v[i+1].
    std::vector<unsigned> es;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      const unsigned ge_i1 = v[i] - v[i + 1];
      const unsigned ge_i2 = i + 2 < v.size() ? v[i + 1] - v[i + 2] : 0;
      for (unsigned k = ge_i2; k < ge_i1; ++k) es.push_back(static_cast<unsigned>(i + 1));
    }
    by_prime[p] = es;
  }
  return AbelianType::from_elementary_divisors(by_prime);
}

/// Direct product of cycles realizing a type (degree = sum of factors, or 1).
inline PermGroup abelian_from_type(const AbelianType& t) {
  std::size_t n = 0;
  for (auto d : t.factors) n += d;
  if (n == 0) return PermGroup::trivial(1);
  std::vector<Permutation> gens;
  std::size_t off = 0;
  for (auto d : t.factors) {
    std::vector<Point> c;
    for (std::size_t i = 0; i < d; ++i) c.push_back(static_cast<Point>(off + i));
    gens.push_back(Permutation::from_cycles(n, {c}));
    off += d;
  }
  return PermGroup(n, gens);
}

/// Invariant factors from arbitrary cyclic orders (e.g. C2 x C4 x C6).
inline AbelianType abelian_type_of(const std::vector<std::uint64_t>& cyclic_orders) {
  std::map<std::uint64_t, std::vector<unsigned>> by_prime;
  for (auto d : cyclic_orders) {
    for (std::uint64_t p = 2; d > 1; ++p) {
      unsigned e = 0;
      while (d % p == 0) {
        d /= p;
        ++e;
      }
      if (e) by_prime[p].push_back(e);
    }
  }
  return AbelianType::from_elementary_divisors(by_prime);
}

}  // namespace integrals
