#pragma once

// Brute-force reference computations used to check the library. These work
// on raw image vectors and never call into the chain-based code.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <vector>

namespace oracle {

using Perm = std::vector<std::uint32_t>;

inline Perm mul(const Perm& a, const Perm& b) {
  Perm r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[b[i]];
  return r;
}

inline Perm inv(const Perm& a) {
  Perm r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[a[i]] = static_cast<std::uint32_t>(i);
  return r;
}

inline Perm identity(std::size_t n) {
  Perm r(n);
  std::iota(r.begin(), r.end(), 0u);
  return r;
}

inline Perm from_cycles(std::size_t n, const std::vector<std::vector<std::uint32_t>>& cs) {
  Perm r = identity(n);
  for (const auto& c : cs)
    for (std::size_t i = 0; i < c.size(); ++i) r[c[i]] = c[(i + 1) % c.size()];
  return r;
}

inline std::set<Perm> closure(const std::vector<Perm>& gens) {
  std::set<Perm> seen{identity(gens.at(0).size())};
  std::vector<Perm> todo(seen.begin(), seen.end());
  while (!todo.empty()) {
    Perm x = todo.back();
    todo.pop_back();
    for (const auto& g : gens) {
      Perm y = mul(x, g);
      if (seen.insert(y).second) todo.push_back(y);
    }
  }
  return seen;
}

inline std::uint64_t order(const Perm& a) {
  Perm x = a;
  std::uint64_t k = 1;
  const Perm e = identity(a.size());
  while (x != e) {
    x = mul(x, a);
    ++k;
  }
  return k;
}

inline std::map<std::uint64_t, std::size_t> order_histogram(const std::set<Perm>& g) {
  std::map<std::uint64_t, std::size_t> h;
  for (const auto& x : g) ++h[order(x)];
  return h;
}

/// Subgroup generated by all commutators of elements of `g`.
inline std::set<Perm> derived(const std::set<Perm>& g) {
  std::vector<Perm> comms;
  std::set<Perm> seen;
  for (const auto& a : g)
    for (const auto& b : g) {
      Perm c = mul(mul(inv(a), inv(b)), mul(a, b));
      if (seen.insert(c).second) comms.push_back(c);
    }
  return closure(comms);
}

inline std::set<Perm> centre(const std::set<Perm>& g) {
  std::set<Perm> z;
  for (const auto& a : g) {
    bool ok = true;
    for (const auto& b : g)
      if (mul(a, b) != mul(b, a)) {
        ok = false;
        break;
      }
    if (ok) z.insert(a);
  }
  return z;
}

}  // namespace oracle
