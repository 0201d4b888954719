#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <tuple>
#include <string>
#include <vector>

#include "integrals/abelian.hpp"
#include "integrals/error.hpp"
#include "integrals/group_table.hpp"
#include "integrals/homomorphism.hpp"
#include "integrals/lattice.hpp"
#include "integrals/limits.hpp"
#include "integrals/parallel.hpp"
#include "integrals/perm_group.hpp"
#include "integrals/structure.hpp"

namespace integrals {

// ---------------------------------------------------------------------------
// Fingerprints

struct Fingerprint {
  BigInt order;
  std::map<std::uint64_t, std::uint64_t> order_histogram;
  std::vector<std::uint64_t> class_sizes;  // sorted
  BigInt centre_order;
  BigInt derived_order;
  std::vector<BigInt> derived_series_orders;
  std::uint64_t exponent = 1;
  AbelianType abelianization;

  bool operator==(const Fingerprint&) const = default;
  auto operator<=>(const Fingerprint& o) const {
    return std::tie(order, order_histogram, class_sizes, centre_order, derived_order, derived_series_orders, exponent,
                    abelianization.factors) <=> std::tie(o.order, o.order_histogram, o.class_sizes, o.centre_order,
                                                         o.derived_order, o.derived_series_orders, o.exponent,
                                                         o.abelianization.factors);
  }

  std::string to_string() const {
    std::string s = "order=" + order.str() + " orders={";
    bool first = true;
    for (auto [o, c] : order_histogram) {
      if (!first) s += ',';
      first = false;
      s += std::to_string(o) + ':' + std::to_string(c);
    }
    s += "} classes=" + std::to_string(class_sizes.size()) + " centre=" + centre_order.str() +
         " derived=" + derived_order.str() + " series=";
    for (std::size_t i = 0; i < derived_series_orders.size(); ++i) {
      if (i) s += '>';
      s += derived_series_orders[i].str();
    }
    s += " exponent=" + std::to_string(exponent) + " abelianization=" + abelianization.to_string();
    return s;
  }
};

/// Computes the fingerprint; element statistics need enumeration.
inline Fingerprint fingerprint(const PermGroup& g, const Limits& limits = {}) {
  g.require_enumerable(limits, "fingerprint");
  Fingerprint f;
  f.order = g.order();
  g.for_each_element([&](const Permutation& x) {
    const auto o = x.order();
    ++f.order_histogram[o];
    f.exponent = std::lcm(f.exponent, o);
    return true;
  });
  for (const auto& c : conjugacy_classes(g, limits)) f.class_sizes.push_back(c.size);
  std::sort(f.class_sizes.begin(), f.class_sizes.end());
  f.centre_order = centre(g, limits).order();
  auto series = derived_series(g);
  for (const auto& s : series) f.derived_series_orders.push_back(s.order());
  f.derived_order = series.size() > 1 ? series[1].order() : series[0].order();
  f.abelianization = abelianization(g, series.size() > 1 ? series[1] : series[0]);
  return f;
}

// ---------------------------------------------------------------------------
// Per-element invariants used to prune isomorphism searches

/// Table plus automorphism-invariant data on each element. Two elements can
/// only correspond under an isomorphism when their codes agree.
class IsoProfile {
 public:
  using Index = GroupTable::Index;

  IsoProfile(const PermGroup& g, std::shared_ptr<const GroupTable> table) : table_(std::move(table)) {
    const GroupTable& t = *table_;
    const std::size_t n = t.size();
    order_.resize(n);
    for (Index a = 0; a < n; ++a) order_[a] = t.order(a);
    primes_ = prime_divisors(BigInt(n), n);

    // conjugacy classes
    class_of_.assign(n, -1);
    std::vector<std::vector<Index>> classes;
    for (Index a = 0; a < n; ++a) {
      if (class_of_[a] >= 0) continue;
      const int id = static_cast<int>(classes.size());
      std::vector<Index> cls{a};
      class_of_[a] = id;
      for (std::size_t i = 0; i < cls.size(); ++i)
        for (Index s : t.generator_indices()) {
          Index c = t.conjugate(cls[i], s);
          if (class_of_[c] < 0) {
            class_of_[c] = id;
            cls.push_back(c);
          }
        }
      classes.push_back(std::move(cls));
    }
    PermGroup d = derived_subgroup(g);
    std::vector<std::uint64_t> base_code(classes.size());
    for (std::size_t c = 0; c < classes.size(); ++c) {
      const Index x = classes[c][0];
      std::uint64_t h = mix(0, order_[x]);
      h = mix(h, classes[c].size());
      h = mix(h, d.contains(t.element(x)) ? 1 : 2);
      // centralizer order histogram
      std::map<std::uint64_t, std::uint64_t> hist;
      for (Index y = 0; y < n; ++y)
        if (t.mul(x, y) == t.mul(y, x)) ++hist[order_[y]];
      for (auto [o, k] : hist) h = mix(mix(h, o), k);
      base_code[c] = h;
    }
    // numbers of p-th roots
    for (std::uint64_t p : primes_) {
      std::vector<std::uint64_t> roots(n, 0);
      for (Index y = 0; y < n; ++y) ++roots[t.pow(y, static_cast<std::int64_t>(p))];
      for (std::size_t c = 0; c < classes.size(); ++c) base_code[c] = mix(mix(base_code[c], p), roots[classes[c][0]]);
    }
    code_.resize(n);
    for (Index a = 0; a < n; ++a) code_[a] = base_code[class_of_[a]];
    // refine by the codes of p-th powers
    for (int round = 0; round < 2; ++round) {
      std::vector<std::uint64_t> next(n);
      for (Index a = 0; a < n; ++a) {
        std::uint64_t h = code_[a];
        for (std::uint64_t p : primes_) h = mix(h, code_[t.pow(a, static_cast<std::int64_t>(p))]);
        next[a] = h;
      }
      code_ = std::move(next);
    }
    for (Index a = 0; a < n; ++a) ++code_count_[code_[a]];
    for (auto [c, k] : code_count_) code_multiset_.emplace_back(c, k);
  }

  const GroupTable& table() const { return *table_; }
  std::shared_ptr<const GroupTable> table_ptr() const { return table_; }
  std::uint64_t code(Index a) const { return code_[a]; }
  std::uint64_t element_order(Index a) const { return order_[a]; }
  std::size_t code_count(std::uint64_t c) const {
    auto it = code_count_.find(c);
    return it == code_count_.end() ? 0 : it->second;
  }
  const std::vector<std::pair<std::uint64_t, std::size_t>>& code_multiset() const { return code_multiset_; }
  std::size_t class_count() const {
    return static_cast<std::size_t>(*std::max_element(class_of_.begin(), class_of_.end()) + 1);
  }

 private:
  static std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h *= 0xff51afd7ed558ccdull;
    return h ^ (h >> 29);
  }

  std::shared_ptr<const GroupTable> table_;
  std::vector<std::uint64_t> order_;
  std::vector<std::uint64_t> primes_;
  std::vector<int> class_of_;
  std::vector<std::uint64_t> code_;
  std::map<std::uint64_t, std::size_t> code_count_;
  std::vector<std::pair<std::uint64_t, std::size_t>> code_multiset_;
};

inline std::shared_ptr<const IsoProfile> profile_of(const PermGroup& g, const Limits& limits = {}) {
  auto table = table_of(g, limits);
  auto& memo = g.memo();
  {
    std::lock_guard lock(memo.mutex);
    if (memo.profile) return memo.profile;
  }
  auto prof = std::make_shared<const IsoProfile>(g, table);
  std::lock_guard lock(memo.mutex);
  if (!memo.profile) memo.profile = prof;
  return memo.profile;
}

namespace detail {

/// Incremental partial map G -> H defined on the subgroup generated by a
/// prefix of a generating sequence, extended by right multiplication.
class PartialMap {
 public:
  using Index = GroupTable::Index;
  static constexpr Index none = ~Index{0};

  PartialMap(const IsoProfile& pg, const IsoProfile& ph, std::vector<Index> seq)
      : pg_(pg), ph_(ph), seq_(std::move(seq)) {
    const std::size_t n = pg.table().size();
    phi_.assign(n, none);
    used_.assign(ph.table().size(), false);
    phi_[0] = 0;
    used_[0] = true;
    mapped_.push_back(0);
  }

  const std::vector<Index>& sequence() const { return seq_; }
  std::size_t depth() const { return images_.size(); }
  const std::vector<Index>& phi() const { return phi_; }

  /// Maps seq[depth()] to h and closes; false (with no change) on conflict.
  bool push(Index h) {
    const std::size_t i = images_.size();
    const Index g = seq_[i];
    if (pg_.code(g) != ph_.code(h)) return false;
    const std::size_t old = mapped_.size();
    marks_.push_back(old);
    images_.push_back(h);
    if (phi_[g] != none) {
      if (phi_[g] == h) return true;
      pop();
      return false;
    }
    if (used_[h] || !assign(g, h)) {
      pop();
      return false;
    }
    const auto& tg = pg_.table();
    const auto& th = ph_.table();
    for (std::size_t k = 0; k < mapped_.size(); ++k) {
      const Index x = mapped_[k];
      const std::size_t first_gen = k < old ? i : 0;
      for (std::size_t j = first_gen; j <= i; ++j) {
        const Index y = tg.mul(x, seq_[j]);
        const Index want = th.mul(phi_[x], images_[j]);
        if (phi_[y] == none) {
          if (used_[want] || !assign(y, want)) {
            pop();
            return false;
          }
        } else if (phi_[y] != want) {
          pop();
          return false;
        }
      }
    }
    return true;
  }

  void pop() {
    const std::size_t old = marks_.back();
    marks_.pop_back();
    images_.pop_back();
    while (mapped_.size() > old) {
      used_[phi_[mapped_.back()]] = false;
      phi_[mapped_.back()] = none;
      mapped_.pop_back();
    }
  }

 private:
  bool assign(Index g, Index h) {
    if (pg_.code(g) != ph_.code(h)) return false;
    phi_[g] = h;
    used_[h] = true;
    mapped_.push_back(g);
    return true;
  }

  const IsoProfile& pg_;
  const IsoProfile& ph_;
  std::vector<Index> seq_;
  std::vector<Index> phi_;
  std::vector<bool> used_;
  std::vector<Index> mapped_;
  std::vector<std::size_t> marks_;
  std::vector<Index> images_;
};

/// Generating sequence chosen greedily: each step takes the element outside
/// the current subgroup whose code is rarest.
inline std::vector<GroupTable::Index> generating_sequence(const IsoProfile& p) {
  const GroupTable& t = p.table();
  std::vector<GroupTable::Index> seq;
  std::vector<bool> in = t.closure(seq);
  std::size_t count = 1;
  while (count < t.size()) {
    GroupTable::Index best = 0;
    std::size_t best_count = SIZE_MAX;
    std::size_t best_gain = 0;
    for (GroupTable::Index a = 1; a < t.size(); ++a) {
      if (in[a]) continue;
      const std::size_t c = p.code_count(p.code(a));
      // rarest code first; among equals prefer larger element order
      if (c < best_count || (c == best_count && p.element_order(a) > best_gain)) {
        best = a;
        best_count = c;
        best_gain = p.element_order(a);
      }
    }
    seq.push_back(best);
    in = t.closure(seq);
    count = static_cast<std::size_t>(std::count(in.begin(), in.end(), true));
  }
  return seq;
}

inline std::vector<GroupTable::Index> candidates(const IsoProfile& ph, std::uint64_t code) {
  std::vector<GroupTable::Index> out;
  for (GroupTable::Index a = 0; a < ph.table().size(); ++a)
    if (ph.code(a) == code) out.push_back(a);
  return out;
}

inline bool extend_search(PartialMap& m, const IsoProfile& pg, const IsoProfile& ph) {
  const std::size_t i = m.depth();
  if (i == m.sequence().size()) return true;
  for (GroupTable::Index h : candidates(ph, pg.code(m.sequence()[i]))) {
    if (!m.push(h)) continue;
    if (extend_search(m, pg, ph)) return true;
    m.pop();
  }
  return false;
}

inline void require_table(const PermGroup& g, const Limits& limits, const char* what) {
  if (g.order() > limits.table_threshold)
    throw SizeGateExceeded(std::string(what) + ": nonabelian group above table threshold", g.order().str(),
                           std::to_string(limits.table_threshold));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Isomorphism

/// An isomorphism G -> H if one exists. Abelian groups are compared by
/// their invariants (no size gate); the witness is then built for groups
/// that fit a table. Nonabelian groups are searched by backtracking over
/// images of a generating sequence.
inline std::optional<Homomorphism> find_isomorphism(const PermGroup& g, const PermGroup& h, const Limits& limits = {}) {
  if (g.order() != h.order()) return std::nullopt;
  if (g.is_abelian() != h.is_abelian()) return std::nullopt;
  if (g.is_abelian() && abelian_invariants(g) != abelian_invariants(h)) return std::nullopt;
  detail::require_table(g, limits, "isomorphism");
  auto pg = profile_of(g, limits), ph = profile_of(h, limits);
  if (pg->code_multiset() != ph->code_multiset()) return std::nullopt;
  auto seq = detail::generating_sequence(*pg);
  if (seq.empty()) return Homomorphism(g, h, std::vector<Permutation>(g.generators().size(), h.identity()));
  auto first = detail::candidates(*ph, pg->code(seq[0]));
  std::vector<std::optional<std::vector<GroupTable::Index>>> found(first.size());
  const std::size_t hit = parallel_find_first(first.size(), limits.workers, [&](std::size_t k) {
    detail::PartialMap m(*pg, *ph, seq);
    if (!m.push(first[k])) return false;
    if (!detail::extend_search(m, *pg, *ph)) return false;
    found[k] = m.phi();
    return true;
  });
  if (hit == first.size()) return std::nullopt;
  const auto& phi = *found[hit];
  std::vector<Permutation> imgs;
  for (const auto& x : g.generators()) imgs.push_back(ph->table().element(phi[pg->table().index_of(x)]));
  Homomorphism w(g, h, imgs);
  if (!w.is_injective() || !w.is_surjective()) throw Error("isomorphism witness failed verification");
  return w;
}

inline bool is_isomorphic(const PermGroup& g, const PermGroup& h, const Limits& limits = {}) {
  if (g.order() != h.order()) return false;
  if (g.is_abelian() || h.is_abelian()) {
    if (g.is_abelian() != h.is_abelian()) return false;
    return abelian_invariants(g) == abelian_invariants(h);
  }
  return find_isomorphism(g, h, limits).has_value();
}

// ---------------------------------------------------------------------------
// Automorphisms

/// Aut(G) acting on G's elements (table indices), with Inn(G) inside it.
struct AutGroup {
  std::shared_ptr<const GroupTable> table;
  PermGroup carrier;
  PermGroup inner;

  /// The automorphism as a homomorphism of G (images of G's generators).
  Homomorphism to_homomorphism(const PermGroup& g, const Permutation& a) const {
    std::vector<Permutation> imgs;
    for (const auto& x : g.generators()) imgs.push_back(table->element(a[table->index_of(x)]));
    return Homomorphism(g, g, imgs);
  }
};

/// Full automorphism group. Generators are found level by level along a
/// generating sequence (g1, ..., gr): at level i, every possible image of
/// gi under automorphisms fixing g1..g(i-1) is either reached by the
/// automorphisms already found or tested once by a backtrack search; failed
/// images rule out their whole orbit.
inline AutGroup automorphism_group(const PermGroup& g, const Limits& limits = {}) {
  if (g.order() > limits.aut_gate)
    throw SizeGateExceeded("automorphism group", g.order().str(), std::to_string(limits.aut_gate));
  auto prof = profile_of(g, limits);
  const GroupTable& t = prof->table();
  const std::size_t n = t.size();
  AutGroup out;
  out.table = prof->table_ptr();

  std::vector<Permutation> inner_gens;
  for (GroupTable::Index s : t.generator_indices()) {
    std::vector<Point> img(n);
    for (GroupTable::Index x = 0; x < n; ++x) img[x] = t.conjugate(x, s);
    Permutation p(std::move(img));
    if (!p.is_identity()) inner_gens.push_back(std::move(p));
  }
  out.inner = inner_gens.empty() ? PermGroup::trivial(n) : PermGroup(n, inner_gens);
  if (n == 1) {
    out.carrier = PermGroup::trivial(1);
    return out;
  }

  const auto seq = detail::generating_sequence(*prof);
  const std::size_t r = seq.size();
  std::vector<Permutation> found = inner_gens;
  PermGroup k = out.inner;
  for (std::size_t lev = r; lev-- > 0;) {
    // stabilizer of g1..g(lev-1) in the automorphisms found so far
    std::vector<Point> prefix(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(lev));
    auto orbit_ids = [&] {
      StabChain ch(n, k.generators(), prefix);
      auto sg = ch.stabilizer_generators(prefix.size());
      std::vector<int> id(n, -1);
      int next = 0;
      for (Point p = 0; p < n; ++p) {
        if (id[p] >= 0) continue;
        std::vector<Point> orb{p};
        id[p] = next;
        for (std::size_t i = 0; i < orb.size(); ++i)
          for (const auto& s : sg)
            if (id[s[orb[i]]] < 0) {
              id[s[orb[i]]] = next;
              orb.push_back(s[orb[i]]);
            }
        ++next;
      }
      return id;
    };
    auto id = orbit_ids();
    std::vector<bool> dead(n, false);
    for (GroupTable::Index h : detail::candidates(*prof, prof->code(seq[lev]))) {
      if (id[h] == id[seq[lev]] || dead[h]) continue;
      detail::PartialMap m(*prof, *prof, seq);
      bool ok = true;
      for (std::size_t j = 0; j < lev && ok; ++j) ok = m.push(seq[j]);
      if (!ok) throw Error("automorphism search: identity prefix rejected");
      if (m.push(h) && detail::extend_search(m, *prof, *prof)) {
        std::vector<Point> img(m.phi().begin(), m.phi().end());
        found.emplace_back(std::move(img));
        k = PermGroup(n, found);
        id = orbit_ids();
      } else {
        for (Point p = 0; p < n; ++p)
          if (id[p] == id[h]) dead[p] = true;
      }
    }
  }
  out.carrier = k;
  return out;
}

enum class NecessaryCondition { fails, holds };

inline const char* to_string(NecessaryCondition c) { return c == NecessaryCondition::fails ? "fails" : "holds"; }

/// Inn(G) <= Aut(G)'. `fails` certifies that G has no integral.
inline NecessaryCondition necessary_condition(const PermGroup& g, const Limits& limits = {}) {
  if (g.is_abelian()) return NecessaryCondition::holds;
  AutGroup a = automorphism_group(g, limits);
  PermGroup d = derived_subgroup(a.carrier);
  return d.contains(a.inner) ? NecessaryCondition::holds : NecessaryCondition::fails;
}

/// Inn(G) <= Φ(Aut(G)): G is the Frattini subgroup of some group.
inline bool eick_test(const PermGroup& g, const Limits& limits = {}) {
  if (g.is_abelian()) return true;
  AutGroup a = automorphism_group(g, limits);
  PermGroup phi = frattini(a.carrier, limits);
  return phi.contains(a.inner);
}

/// For an integral H of G, the image of H in Aut(H') under conjugation:
/// H / C_H(H'). Its derived subgroup is isomorphic to G/Z(G).
inline Quotient inn_integral(const PermGroup& g, const PermGroup& h, const Limits& limits = {}) {
  PermGroup d = derived_subgroup(h);
  if (!is_isomorphic(d, g, limits)) throw PreconditionError("inn_integral: H is not an integral of G");
  PermGroup c = centralizer(h, d, limits);
  return quotient(h, c, limits);
}

}  // namespace integrals
