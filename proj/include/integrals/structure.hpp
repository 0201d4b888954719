#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "integrals/abelian.hpp"
#include "integrals/error.hpp"
#include "integrals/group_table.hpp"
#include "integrals/homomorphism.hpp"
#include "integrals/limits.hpp"
#include "integrals/perm_group.hpp"

namespace integrals {

inline bool is_subgroup(const PermGroup& g, const PermGroup& h) { return g.contains(h); }

/// True when every generator of `n` conjugated by every generator of `g`
/// stays in `n`.
inline bool is_normal(const PermGroup& g, const PermGroup& n) {
  for (const auto& x : n.generators())
    for (const auto& s : g.generators())
      if (!n.contains(conjugate(x, s))) return false;
  return true;
}

/// [A, B] for subgroups A, B that are normal in G.
inline PermGroup commutator_subgroup(const PermGroup& g, const PermGroup& a, const PermGroup& b) {
  std::vector<Permutation> seeds;
  for (const auto& x : a.generators())
    for (const auto& y : b.generators()) seeds.push_back(commutator(x, y));
  return normal_closure(g, std::move(seeds));
}

inline PermGroup derived_subgroup(const PermGroup& g) {
  std::vector<Permutation> seeds;
  const auto& gs = g.generators();
  for (std::size_t i = 0; i < gs.size(); ++i)
    for (std::size_t j = i + 1; j < gs.size(); ++j) seeds.push_back(commutator(gs[i], gs[j]));
  return normal_closure(g, std::move(seeds));
}

inline bool is_perfect(const PermGroup& g) { return derived_subgroup(g).order() == g.order(); }

/// Subgroup generated by `gens` inside the ambient degree of `g`.
inline PermGroup subgroup(const PermGroup& g, std::vector<Permutation> gens) {
  if (gens.empty()) return PermGroup::trivial(g.degree());
  return PermGroup(g.degree(), std::move(gens));
}

/// Subgroup generated by two subgroups.
inline PermGroup join(const PermGroup& a, const PermGroup& b) {
  std::vector<Permutation> gens = a.generators();
  for (const auto& x : b.generators())
    if (!a.contains(x)) gens.push_back(x);
  return PermGroup(a.degree(), gens);
}

// ---------------------------------------------------------------------------
// Centre

namespace detail {

inline std::vector<std::vector<Point>> orbits(const PermGroup& g) {
  const std::size_t n = g.degree();
  std::vector<int> seen(n, 0);
  std::vector<std::vector<Point>> out;
  for (Point p = 0; p < n; ++p) {
    if (seen[p]) continue;
    std::vector<Point> orb{p};
    seen[p] = 1;
    for (std::size_t i = 0; i < orb.size(); ++i)
      for (const auto& s : g.generators()) {
        Point q = s[orb[i]];
        if (!seen[q]) {
          seen[q] = 1;
          orb.push_back(q);
        }
      }
    out.push_back(std::move(orb));
  }
  return out;
}

}  // namespace detail

/// Centre by testing every element against the generators.
inline PermGroup centre_by_elements(const PermGroup& g, const Limits& limits = {}) {
  g.require_enumerable(limits, "centre");
  std::vector<Permutation> found;
  PermGroup z = PermGroup::trivial(g.degree());
  g.for_each_element([&](const Permutation& x) {
    for (const auto& s : g.generators())
      if (x * s != s * x) return true;
    if (!z.contains(x)) {
      found.push_back(x);
      z = PermGroup(g.degree(), found);
    }
    return true;
  });
  return z;
}

/// Centre by backtracking: on each orbit a central element agrees with an
/// element of the centralizer of the transitive constituent, and those
/// centralizers are small and explicit. Candidates are pruned by sifting
/// their images of the base points seen so far.
inline PermGroup centre_by_backtrack(const PermGroup& g, const Limits& limits = {}) {
  const std::size_t n = g.degree();
  auto orbs = detail::orbits(g);
  std::erase_if(orbs, [](const auto& o) { return o.size() < 2; });
  if (orbs.empty()) return PermGroup::trivial(n);
  std::vector<int> orbit_of(n, -1);
  for (std::size_t i = 0; i < orbs.size(); ++i)
    for (Point p : orbs[i]) orbit_of[p] = static_cast<int>(i);

  // Centralizer of each constituent, as maps defined on that orbit.
  std::vector<std::vector<std::vector<Point>>> cands(orbs.size());
  for (std::size_t i = 0; i < orbs.size(); ++i) {
    const Point alpha = orbs[i][0];
    std::vector<Point> prefix{alpha};
    StabChain ch(n, g.generators(), prefix);
    const auto& lv = ch.levels()[0];
    auto stab = ch.stabilizer_generators(1);
    for (Point beta : orbs[i]) {
      bool fixed = std::all_of(stab.begin(), stab.end(), [&](const Permutation& s) { return s[beta] == beta; });
      if (!fixed) continue;
      std::vector<Point> c(n, 0);
      for (std::size_t k = 0; k < lv.orbit.size(); ++k) c[lv.orbit[k]] = lv.transversal[k][beta];
      cands[i].push_back(std::move(c));
    }
  }

  // Base sorted orbit by orbit so levels can be checked as orbits get fixed.
  auto base = g.chain().base();
  std::stable_sort(base.begin(), base.end(), [&](Point a, Point b) { return orbit_of[a] < orbit_of[b]; });
  StabChain chain(n, g.generators(), base);
  const auto& levels = chain.levels();
  std::vector<std::size_t> levels_done(orbs.size() + 1, 0);  // levels decidable after orbit i
  for (std::size_t i = 0; i < orbs.size(); ++i) {
    std::size_t l = i ? levels_done[i] : 0;
    while (l < levels.size() && orbit_of[levels[l].base] >= 0 && orbit_of[levels[l].base] <= static_cast<int>(i)) ++l;
    levels_done[i + 1] = l;
  }

  std::vector<Point> z(n);
  std::iota(z.begin(), z.end(), 0u);
  std::vector<const Permutation*> path;  // inverse transversals chosen so far
  std::vector<Permutation> found;
  PermGroup result = PermGroup::trivial(n);
  std::uint64_t leaves = 0;

  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == orbs.size()) {
      Permutation p(z);
      if (++leaves > limits.enumeration_threshold)
        throw SizeGateExceeded("centre backtrack", std::to_string(leaves), std::to_string(limits.enumeration_threshold));
      if (!p.is_identity() && chain.contains(p) && !result.contains(p)) {
        found.push_back(p);
        result = PermGroup(n, found);
      }
      return;
    }
    for (const auto& c : cands[i]) {
      for (Point q : orbs[i]) z[q] = c[q];
      const std::size_t keep = path.size();
      bool ok = true;
      for (std::size_t l = levels_done[i]; l < levels_done[i + 1]; ++l) {
        Point q = z[levels[l].base];
        for (const Permutation* u : path) q = (*u)[q];
        const std::int32_t k = levels[l].slot[q];
        if (k < 0) {
          ok = false;
          break;
        }
        path.push_back(&levels[l].inv_transversal[k]);
      }
      if (ok) rec(i + 1);
      path.resize(keep);
    }
    for (Point q : orbs[i]) z[q] = q;
  };
  rec(0);
  return result;
}

/// Z(G): element filtering below the enumeration threshold, centralizer
/// backtracking above it.
inline PermGroup centre(const PermGroup& g, const Limits& limits = {}) {
  if (g.order() <= limits.enumeration_threshold) return centre_by_elements(g, limits);
  return centre_by_backtrack(g, limits);
}

/// Centralizer of a subgroup by element filtering.
inline PermGroup centralizer(const PermGroup& g, const PermGroup& h, const Limits& limits = {}) {
  g.require_enumerable(limits, "centralizer");
  std::vector<Permutation> found;
  PermGroup c = PermGroup::trivial(g.degree());
  g.for_each_element([&](const Permutation& x) {
    for (const auto& s : h.generators())
      if (x * s != s * x) return true;
    if (!c.contains(x)) {
      found.push_back(x);
      c = PermGroup(g.degree(), found);
    }
    return true;
  });
  return c;
}

// ---------------------------------------------------------------------------
// Quotients

/// Canonical representative of the left coset gN: at each level of N's
/// chain, pick the transversal element sending the base point to the
/// point with the smallest image under g.
inline Permutation canonical_coset_rep(Permutation g, const StabChain& n_chain) {
  for (const auto& lv : n_chain.levels()) {
    std::size_t best = 0;
    Point best_img = g[lv.orbit[0]];
    for (std::size_t k = 1; k < lv.orbit.size(); ++k) {
      Point img = g[lv.orbit[k]];
      if (img < best_img) {
        best_img = img;
        best = k;
      }
    }
    if (best) g = g * lv.transversal[best];
  }
  return g;
}

struct Quotient {
  PermGroup group;
  Homomorphism projection;
};

/// G/N as the permutation action of G on the left cosets of N.
inline Quotient quotient(const PermGroup& g, const PermGroup& n, const Limits& limits = {}) {
  if (!g.contains(n)) throw PreconditionError("quotient: N is not a subgroup of G");
  if (!is_normal(g, n)) throw PreconditionError("quotient: N is not normal in G");
  const BigInt index = g.order() / n.order();
  if (index > limits.coset_budget)
    throw SizeGateExceeded("quotient cosets", index.str(), std::to_string(limits.coset_budget));
  const std::size_t m = static_cast<std::size_t>(index);
  const StabChain& nc = n.chain();
  std::vector<Permutation> reps{canonical_coset_rep(g.identity(), nc)};
  std::unordered_map<Permutation, std::uint32_t, PermutationHash> idx;
  idx.emplace(reps[0], 0);
  const auto& gens = g.generators();
  std::vector<std::vector<Point>> act(gens.size());
  for (std::size_t c = 0; c < reps.size(); ++c) {
    for (std::size_t s = 0; s < gens.size(); ++s) {
      Permutation r = canonical_coset_rep(gens[s] * reps[c], nc);
      auto [it, fresh] = idx.try_emplace(r, static_cast<std::uint32_t>(reps.size()));
      if (fresh) reps.push_back(std::move(r));
      act[s].push_back(it->second);
    }
  }
  if (reps.size() != m) throw Error("quotient: coset count disagrees with index");
  std::vector<Permutation> images;
  for (auto& a : act) images.emplace_back(std::move(a));
  PermGroup q(m, images);
  Homomorphism proj(g, q, images);
  return {q, std::move(proj)};
}

/// Full preimage of a subgroup of the quotient.
inline PermGroup preimage(const Quotient& q, const PermGroup& sub) {
  std::vector<Permutation> gens = q.projection.kernel().generators();
  for (const auto& s : sub.generators())
    if (!s.is_identity()) gens.push_back(q.projection.preimage(s));
  return PermGroup(q.projection.domain().degree(), gens);
}

// ---------------------------------------------------------------------------
// Series and element statistics

inline std::uint64_t exponent(const PermGroup& g, const Limits& limits = {}) {
  g.require_enumerable(limits, "exponent");
  std::uint64_t e = 1;
  g.for_each_element([&](const Permutation& x) {
    e = std::lcm(e, x.order());
    return true;
  });
  return e;
}

/// G = G^(0) > G^(1) > ... until it stabilizes.
inline std::vector<PermGroup> derived_series(const PermGroup& g) {
  std::vector<PermGroup> s{g};
  while (true) {
    PermGroup d = derived_subgroup(s.back());
    if (d.order() == s.back().order()) break;
    s.push_back(std::move(d));
  }
  return s;
}

inline bool is_solvable(const PermGroup& g) { return derived_series(g).back().is_trivial(); }

/// G = γ1 > γ2 > ... with γ(i+1) = [γi, G], until it stabilizes.
inline std::vector<PermGroup> lower_central_series(const PermGroup& g) {
  std::vector<PermGroup> s{g};
  while (true) {
    PermGroup next = commutator_subgroup(g, s.back(), g);
    if (next.order() == s.back().order()) break;
    s.push_back(std::move(next));
  }
  return s;
}

/// Class c with γ(c+1) = 1, or nullopt when G is not nilpotent.
inline std::optional<std::size_t> nilpotency_class(const PermGroup& g) {
  auto s = lower_central_series(g);
  if (!s.back().is_trivial()) return std::nullopt;
  return s.size() - 1;
}

inline bool is_nilpotent(const PermGroup& g) { return nilpotency_class(g).has_value(); }

/// 1 = Z0 < Z1 < ... until it stabilizes.
inline std::vector<PermGroup> upper_central_series(const PermGroup& g, const Limits& limits = {}) {
  std::vector<PermGroup> s{PermGroup::trivial(g.degree())};
  while (true) {
    const PermGroup& cur = s.back();
    PermGroup next = cur.is_trivial() ? centre(g, limits) : [&] {
      Quotient q = quotient(g, cur, limits);
      return preimage(q, centre(q.group, limits));
    }();
    if (next.order() == cur.order()) break;
    s.push_back(std::move(next));
    if (s.back().order() == g.order()) break;
  }
  return s;
}

struct ConjugacyClass {
  Permutation representative;
  std::uint64_t size = 0;
};

/// Conjugacy classes, each with its smallest element (index order for tables)
/// as representative.
inline std::vector<ConjugacyClass> conjugacy_classes(const PermGroup& g, const Limits& limits = {}) {
  std::vector<ConjugacyClass> out;
  if (g.order() <= limits.table_threshold) {
    auto t = table_of(g, limits);
    std::vector<bool> done(t->size(), false);
    for (GroupTable::Index a = 0; a < t->size(); ++a) {
      if (done[a]) continue;
      std::vector<GroupTable::Index> cls{a};
      done[a] = true;
      for (std::size_t i = 0; i < cls.size(); ++i)
        for (GroupTable::Index s : t->generator_indices()) {
          GroupTable::Index c = t->conjugate(cls[i], s);
          if (!done[c]) {
            done[c] = true;
            cls.push_back(c);
          }
        }
      out.push_back({t->element(a), cls.size()});
    }
    return out;
  }
  g.require_enumerable(limits, "conjugacy classes");
  std::unordered_set<Permutation, PermutationHash> done;
  g.for_each_element([&](const Permutation& x) {
    if (done.count(x)) return true;
    std::vector<Permutation> cls{x};
    done.insert(x);
    for (std::size_t i = 0; i < cls.size(); ++i)
      for (const auto& s : g.generators()) {
        Permutation c = conjugate(cls[i], s);
        if (done.insert(c).second) cls.push_back(c);
      }
    out.push_back({x, cls.size()});
    return true;
  });
  return out;
}

/// [A, H] = <a^-1 h(a)> for an abelian A and automorphisms h of A given as
/// endomorphisms A -> A. Returns the subgroup; A/[A,H] is the caller's.
inline PermGroup coinvariants(const PermGroup& a, const std::vector<Homomorphism>& action) {
  if (!a.is_abelian()) throw PreconditionError("coinvariants: A is not abelian");
  std::vector<Permutation> gens;
  for (const auto& h : action) {
    if (h.domain().degree() != a.degree() || h.codomain().degree() != a.degree())
      throw PreconditionError("coinvariants: action is not on A");
    if (h.domain().order() != a.order() || !a.contains(h.domain()) || !a.contains(h.image()) || !h.is_injective())
      throw PreconditionError("coinvariants: action is not by automorphisms of A");
    for (const auto& x : a.generators()) {
      Permutation c = x.inverse() * h.apply(x);
      if (!c.is_identity()) gens.push_back(std::move(c));
    }
  }
  return subgroup(a, std::move(gens));
}

/// Invariant factors of G/G', from the orders of <G', g^(p^i)>.
inline AbelianType abelianization(const PermGroup& g, const PermGroup& derived) {
  const BigInt index = g.order() / derived.order();
  std::map<std::uint64_t, std::vector<unsigned>> by_prime;
  for (std::uint64_t p : prime_divisors(index, g.degree())) {
    const unsigned e = valuation(index, p);
    std::vector<unsigned> v{e};
    std::vector<Permutation> cur = g.generators();
    while (v.back() > 0) {
      for (auto& x : cur) x = x.pow(static_cast<std::int64_t>(p));
      std::vector<Permutation> gens = derived.generators();
      gens.insert(gens.end(), cur.begin(), cur.end());
      v.push_back(valuation(PermGroup(g.degree(), gens).order() / derived.order(), p));
    }
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

inline AbelianType abelianization(const PermGroup& g) { return abelianization(g, derived_subgroup(g)); }

}  // namespace integrals
