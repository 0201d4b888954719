#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "integrals/catalog.hpp"
#include "integrals/constructors.hpp"
#include "integrals/error.hpp"
#include "integrals/group_io.hpp"
#include "integrals/homomorphism.hpp"
#include "integrals/integrability.hpp"
#include "integrals/iso_aut.hpp"
#include "integrals/lattice.hpp"
#include "integrals/limits.hpp"
#include "integrals/parallel.hpp"
#include "integrals/structure.hpp"

namespace integrals {

/// Default cap on the number of levels in a tower.
inline constexpr std::size_t tower_level_cap = 4;
/// Levels above this order are only matched through the identity map; the
/// isomorphism and fibre searches are skipped for them.
inline constexpr std::uint64_t tower_order_gate = 1'000'000;

/// A finite inverse system G_1 <- G_2 <- ... <- G_L. Consecutive
/// epimorphisms down(i): G_(i+1) -> G_i are stored; longer maps are their
/// composites. Extra explicit maps (i > j+1) may be given and must agree
/// with the composite on generators.
class InverseSystem {
 public:
  InverseSystem(std::vector<PermGroup> levels, std::vector<Homomorphism> down,
                std::map<std::pair<std::size_t, std::size_t>, Homomorphism> extra = {},
                std::size_t max_levels = tower_level_cap)
      : levels_(std::move(levels)), down_(std::move(down)), extra_(std::move(extra)) {
    if (levels_.empty()) throw PreconditionError("inverse system: no levels");
    if (levels_.size() > max_levels)
      throw SizeGateExceeded("tower levels", std::to_string(levels_.size()), std::to_string(max_levels));
    if (down_.size() + 1 != levels_.size()) throw PreconditionError("inverse system: need one map per consecutive pair");
    verify();
  }

  std::size_t size() const { return levels_.size(); }
  /// Level i, counted from 1.
  const PermGroup& level(std::size_t i) const { return levels_.at(i - 1); }
  const std::vector<PermGroup>& levels() const { return levels_; }
  /// G_(i+1) -> G_i, counted from 1.
  const Homomorphism& down(std::size_t i) const { return down_.at(i - 1); }
  const std::map<std::pair<std::size_t, std::size_t>, Homomorphism>& extra() const { return extra_; }

  /// Image of x in G_j for x in G_i, i >= j.
  Permutation project(Permutation x, std::size_t i, std::size_t j) const {
    if (j > i || j == 0 || i > size()) throw PreconditionError("inverse system: bad level pair");
    for (std::size_t k = i; k > j; --k) x = down(k - 1).apply(x);
    return x;
  }

  /// Rechecks surjectivity of every connecting map and coherence of the
  /// extra maps with composites.
  void verify() const {
    for (std::size_t i = 0; i < down_.size(); ++i) {
      const Homomorphism& h = down_[i];
      if (h.domain().degree() != levels_[i + 1].degree() || h.domain().order() != levels_[i + 1].order() ||
          !levels_[i + 1].contains(h.domain()))
        throw PreconditionError("inverse system: map " + std::to_string(i + 2) + "->" + std::to_string(i + 1) +
                                " has the wrong domain");
      if (h.codomain().degree() != levels_[i].degree() || h.codomain().order() != levels_[i].order() ||
          !levels_[i].contains(h.codomain()))
        throw PreconditionError("inverse system: map " + std::to_string(i + 2) + "->" + std::to_string(i + 1) +
                                " has the wrong codomain");
      if (!h.is_surjective())
        throw PreconditionError("inverse system: map " + std::to_string(i + 2) + "->" + std::to_string(i + 1) +
                                " is not surjective");
    }
    for (const auto& [key, h] : extra_) {
      const auto [i, j] = key;
      if (!(i > j && j >= 1 && i <= size())) throw PreconditionError("inverse system: bad extra map indices");
      for (const auto& x : levels_[i - 1].generators())
        if (h.apply(x) != project(x, i, j))
          throw PreconditionError("inverse system: map " + std::to_string(i) + "->" + std::to_string(j) +
                                  " disagrees with the composite of connecting maps");
    }
  }

 private:
  std::vector<PermGroup> levels_;
  std::vector<Homomorphism> down_;
  std::map<std::pair<std::size_t, std::size_t>, Homomorphism> extra_;
};

/// Projection of a direct product onto its first `keep` factors, as a map
/// between the product groups built by direct_product.
inline Homomorphism product_projection(const std::vector<PermGroup>& factors, std::size_t keep) {
  if (keep == 0 || keep > factors.size()) throw PreconditionError("product_projection: bad factor count");
  const PermGroup big = direct_product(factors);
  const PermGroup small = direct_product(std::vector<PermGroup>(factors.begin(), factors.begin() + keep));
  std::size_t small_deg = 0;
  for (std::size_t i = 0; i < keep; ++i) small_deg += factors[i].degree();
  std::vector<Permutation> imgs;
  for (const auto& g : big.generators()) {
    std::vector<Point> im(small_deg);
    for (Point p = 0; p < small_deg; ++p) im[p] = g[p];
    imgs.emplace_back(std::move(im));
  }
  return Homomorphism(big, small, std::move(imgs));
}

/// The tower of partial products F_1, F_1 x F_2, ... with the projections.
inline InverseSystem product_tower(const std::vector<PermGroup>& factors, std::size_t max_levels = tower_level_cap) {
  std::vector<PermGroup> levels;
  std::vector<Homomorphism> down;
  for (std::size_t i = 1; i <= factors.size(); ++i) {
    levels.push_back(direct_product(std::vector<PermGroup>(factors.begin(), factors.begin() + i)));
    if (i > 1) down.push_back(product_projection(std::vector<PermGroup>(factors.begin(), factors.begin() + i), i - 1));
  }
  return InverseSystem(std::move(levels), std::move(down), {}, max_levels);
}

struct LevelResult {
  bool derived_isomorphic = false;
  bool square_commutes = false;  // with the level below; true on level 1
  std::optional<Homomorphism> tau;  // G_i -> K_i'
  std::string note;
};

struct LevelwiseReport {
  bool holds = false;
  std::vector<LevelResult> levels;
};

namespace detail {

// K' as a group of the same degree as K.
inline PermGroup derived_of_level(const PermGroup& k) { return derived_subgroup(k); }

// tau: G -> D is compatible when down_K(tau(g)) = tau_below(down_G(g)) on
// generators of G.
inline bool compatible(const Homomorphism& tau, const Homomorphism& tau_below, const Homomorphism& down_g,
                       const Homomorphism& down_k) {
  for (const auto& g : tau.domain().generators())
    if (down_k.apply(tau.apply(g)) != tau_below.apply(down_g.apply(g))) return false;
  return true;
}

inline std::optional<Homomorphism> try_isomorphism(const PermGroup& g, const PermGroup& d, std::vector<Permutation> imgs) {
  try {
    Homomorphism h(g, d, std::move(imgs));
    if (h.is_injective() && h.is_surjective()) return h;
  } catch (const PreconditionError&) {
  }
  return std::nullopt;
}

// The identity map, when G is literally D and it commutes with the level below.
inline std::optional<Homomorphism> identity_match(const PermGroup& g, const PermGroup& d, const Homomorphism* tau_below,
                                                  const Homomorphism* down_g, const Homomorphism* down_k) {
  if (g.degree() != d.degree() || g.order() != d.order() || !d.contains(g)) return std::nullopt;
  auto h = try_isomorphism(g, d, g.generators());
  if (h && tau_below && !compatible(*h, *tau_below, *down_g, *down_k)) return std::nullopt;
  return h;
}

// An isomorphism G -> D compatible with the level below, choosing the
// generator images inside the forced fibres of down_k. The fibre product
// is bounded by the coset budget.
inline std::optional<Homomorphism> compatible_isomorphism(const PermGroup& g, const PermGroup& d,
                                                          const Homomorphism* tau_below, const Homomorphism* down_g,
                                                          const Homomorphism* down_k, const Limits& limits,
                                                          std::string& note) {
  const bool bottom = tau_below == nullptr;
  auto any = find_isomorphism(g, d, limits);
  if (!any) return std::nullopt;
  if (bottom || compatible(*any, *tau_below, *down_g, *down_k)) return any;
  // fibre search
  if (d.order() > limits.enumeration_threshold) {
    note = "compatible isomorphism not searched: |K'| exceeds the enumeration threshold";
    return std::nullopt;
  }
  const auto& gens = g.generators();
  std::vector<std::vector<Permutation>> fibres(gens.size());
  const auto els = d.elements(limits);
  BigInt space = 1;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const Permutation target = tau_below->apply(down_g->apply(gens[i]));
    for (const auto& y : els)
      if (y.order() == gens[i].order() && down_k->apply(y) == target) fibres[i].push_back(y);
    space *= fibres[i].size();
  }
  if (space > limits.coset_budget) {
    note = "compatible isomorphism not searched: fibre product " + space.str() + " exceeds the coset budget";
    return std::nullopt;
  }
  std::vector<Permutation> imgs(gens.size(), Permutation(d.degree()));
  std::optional<Homomorphism> found;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (found) return;
    if (i == gens.size()) {
      found = try_isomorphism(g, d, imgs);
      return;
    }
    for (const auto& y : fibres[i]) {
      imgs[i] = y;
      rec(i + 1);
      if (found) return;
    }
  };
  rec(0);
  if (!found) note = "no isomorphism commutes with the connecting maps";
  return found;
}

}  // namespace detail

/// For every level, K_i' is isomorphic to G_i through maps tau_i that
/// commute with the connecting maps on generators. Levels are matched from
/// the bottom up, each tau_i chosen compatible with tau_(i-1).
inline LevelwiseReport levelwise_integral_report(const InverseSystem& gsys, const InverseSystem& ksys,
                                                 const Limits& limits = {}) {
  if (gsys.size() != ksys.size()) throw PreconditionError("levelwise check: systems have different lengths");
  gsys.verify();
  ksys.verify();
  const std::size_t L = gsys.size();
  std::vector<PermGroup> derived(L, PermGroup::trivial(1));
  parallel_for(L, limits.workers, [&](std::size_t i) { derived[i] = detail::derived_of_level(ksys.levels()[i]); });
  LevelwiseReport r;
  r.levels.resize(L);
  r.holds = true;
  for (std::size_t i = 0; i < L; ++i) {
    LevelResult& lr = r.levels[i];
    const PermGroup& g = gsys.levels()[i];
    if (i > 0 && !r.levels[i - 1].tau) {
      lr.derived_isomorphic = is_isomorphic(g, derived[i], limits);
      lr.note = "level below has no isomorphism";
      r.holds = false;
      continue;
    }
    std::optional<Homomorphism> down_k;
    if (i > 0) {
      // K_(i+1)' -> K_i' restricted from the connecting map
      const Homomorphism& full = ksys.down(i);
      std::vector<Permutation> imgs;
      for (const auto& x : derived[i].generators()) imgs.push_back(full.apply(x));
      down_k.emplace(derived[i], derived[i - 1], std::move(imgs));
    }
    const Homomorphism* tau_below = i ? &*r.levels[i - 1].tau : nullptr;
    const Homomorphism* down_g = i ? &gsys.down(i) : nullptr;
    lr.tau = detail::identity_match(g, derived[i], tau_below, down_g, i ? &*down_k : nullptr);
    if (lr.tau) {
      lr.derived_isomorphic = lr.square_commutes = true;
      continue;
    }
    if (g.order() > tower_order_gate || derived[i].order() > tower_order_gate) {
      lr.note = "level order exceeds " + std::to_string(tower_order_gate) + ": only the identity map was tried";
      r.holds = false;
      continue;
    }
    if (!is_isomorphic(g, derived[i], limits)) {
      lr.note = "K' is not isomorphic to G";
      r.holds = false;
      continue;
    }
    lr.derived_isomorphic = true;
    lr.tau = detail::compatible_isomorphism(g, derived[i], tau_below, down_g, i ? &*down_k : nullptr, limits, lr.note);
    lr.square_commutes = lr.tau.has_value();
    if (!lr.tau) r.holds = false;
  }
  return r;
}

inline bool levelwise_integral_check(const InverseSystem& gsys, const InverseSystem& ksys, const Limits& limits = {}) {
  return levelwise_integral_report(gsys, ksys, limits).holds;
}

// ---------------------------------------------------------------------------
// Minimal integrals

struct IntermediateSubgroup {
  PermGroup group;
  BigInt derived_order;
};

/// Every R with A < R < H (H/A must be small enough for its subgroup
/// lattice), with |R'|.
inline std::vector<IntermediateSubgroup> intermediate_subgroups(const PermGroup& h, const PermGroup& a,
                                                                const Limits& limits = {}) {
  Quotient q = quotient(h, a, limits);
  SubgroupLattice lat(q.group, limits);
  const GroupTable& t = lat.table();
  const BigInt qo = q.group.order();
  std::vector<IntermediateSubgroup> out;
  for (const auto& e : lat.subgroups()) {
    if (e.size == 1 || BigInt(e.size) == qo) continue;
    std::vector<Permutation> gens;
    for (auto i : e.gens) gens.push_back(t.element(i));
    PermGroup r = preimage(q, PermGroup(q.group.degree(), gens));
    out.push_back({r, derived_subgroup(r).order()});
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.group.order() < y.group.order(); });
  return out;
}

/// H' = A and every R with A < R < H has R' < A.
inline bool is_minimal_integral(const PermGroup& h, const PermGroup& a, const Limits& limits = {}) {
  if (derived_subgroup(h).order() != a.order() || !derived_subgroup(h).contains(a)) return false;
  for (const auto& r : intermediate_subgroups(h, a, limits))
    if (r.derived_order >= a.order()) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Dihedral powers

/// N_G(S) by listing G.
inline PermGroup normalizer(const PermGroup& g, const PermGroup& s, const Limits& limits = {}) {
  std::vector<Permutation> gens;
  PermGroup cur = s;
  g.for_each_element([&](const Permutation& x) {
    if (cur.contains(x)) return true;
    for (const auto& y : s.generators())
      if (!s.contains(conjugate(y, x))) return true;
    gens = cur.generators();
    gens.push_back(x);
    cur = PermGroup(g.degree(), gens);
    return true;
  });
  (void)limits;
  return cur;
}

/// (D_2n)^m as a permutation group on m*n points.
inline PermGroup dihedral_power(std::uint64_t n, std::uint64_t m) {
  if (n < 3 || m < 1) throw PreconditionError("dihedral power: need n >= 3 and m >= 1");
  return direct_product(std::vector<PermGroup>(m, dihedral_group(2 * n)));
}

/// B wr S_m in the product action on m copies of B's points: the base B^m
/// and the block permutations.
inline PermGroup wreath_with_symmetric(const PermGroup& b, std::uint64_t m) {
  PermGroup base = direct_product(std::vector<PermGroup>(m, b));
  std::vector<Permutation> gens = base.generators();
  const std::size_t k = b.degree(), deg = k * m;
  if (m > 1) {
    for (std::size_t s = 0; s + 1 < m; ++s) {
      std::vector<Point> im(deg);
      std::iota(im.begin(), im.end(), 0u);
      for (std::size_t x = 0; x < k; ++x) std::swap(im[s * k + x], im[(s + 1) * k + x]);
      gens.emplace_back(std::move(im));
    }
  }
  return PermGroup(deg, gens);
}

/// Whether G ∩ H' < G for G ≅ (D_2n)^m normal in H. The answer is always
/// true when the hypotheses hold, so false means a bug.
inline bool dihedral_power_obstruction(std::uint64_t n, std::uint64_t m, const PermGroup& h, const PermGroup& g,
                                       const Limits& limits = {}) {
  if (!h.contains(g)) throw PreconditionError("dihedral obstruction: G is not a subgroup of H");
  if (!is_normal(h, g)) throw PreconditionError("dihedral obstruction: G is not normal in H");
  if (!is_isomorphic(g, dihedral_power(n, m), limits))
    throw PreconditionError("dihedral obstruction: G is not isomorphic to (D_" + std::to_string(2 * n) + ")^" +
                            std::to_string(m));
  return !derived_subgroup(h).contains(g);
}

/// Catalog search for an integral of (D_2n)^m. Whatever the catalog says,
/// the obstruction shows none exists, so the report carries that note.
inline IntegralReport search_no_integral_of_dihedral_power(std::uint64_t n, std::uint64_t m, std::uint64_t bound,
                                                           CatalogStore& store) {
  const PermGroup g = dihedral_power(n, m);
  const std::string text = m == 1 ? "dihedral(" + std::to_string(2 * n) + ")"
                                  : "direct(" + [&] {
                                      std::string s;
                                      for (std::uint64_t i = 0; i < m; ++i)
                                        s += (i ? "," : "") + std::string("dihedral(") + std::to_string(2 * n) + ")";
                                      return s;
                                    }() + ")";
  const std::uint64_t order = g.small_order();
  IntegralReport r;
  const Limits& limits = store.limits();
  std::uint64_t reach = bound;
  while (reach >= order && reach > std::min<std::uint64_t>(limits.catalog_bound, catalog_hard_limit)) reach -= order;
  if (reach < bound) {
    // orders past the catalog cannot be searched; report what can be
    r = search_integral(g, std::max(reach, order - 1), std::nullopt, store, text);
    r.bound = bound;
    r.notes.push_back("orders above " + std::to_string(std::min<std::uint64_t>(limits.catalog_bound, catalog_hard_limit)) +
                      " not searched: beyond the catalogs");
  } else {
    r = search_integral(g, bound, std::nullopt, store, text);
  }
  if (!r.findings.empty()) throw Error("dihedral power search: found an integral, contradicting the obstruction");
  r.notes.push_back("the dihedral-power obstruction (G meets H' in a proper subgroup whenever G is normal in H) "
                    "rules out every integral");
  return r;
}

// ---------------------------------------------------------------------------
// Tower files
//
//   tower levels=L
//   level 1
//   permgroup degree=d
//   <generators>
//   (blank)
//   ...
//   map 2 1
//   <image of each generator of level 2, in order>
//   (blank)

inline std::string format_tower(const InverseSystem& s) {
  std::ostringstream o;
  o << "tower levels=" << s.size() << "\n";
  for (std::size_t i = 1; i <= s.size(); ++i) o << "level " << i << "\n" << format_group(s.level(i)) << "\n";
  auto put_map = [&](std::size_t i, std::size_t j, const Homomorphism& h) {
    o << "map " << i << " " << j << "\n";
    for (const auto& x : h.images()) o << x.to_string() << "\n";
    o << "\n";
  };
  for (std::size_t i = 1; i < s.size(); ++i) put_map(i + 1, i, s.down(i));
  for (const auto& [key, h] : s.extra()) put_map(key.first, key.second, h);
  return o.str();
}

inline InverseSystem parse_tower(std::string_view text, std::size_t max_levels = tower_level_cap) {
  const auto lines = split_lines(text);
  std::size_t i = 0;
  auto blank = [&](std::size_t k) { return lines[k].find_first_not_of(" \t\r") == std::string::npos; };
  auto skip_blank = [&] {
    while (i < lines.size() && blank(i)) ++i;
  };
  auto read_count = [&](const std::string& line, std::size_t from, std::size_t line_no) {
    std::size_t k = from, v = 0;
    if (k >= line.size() || !std::isdigit(static_cast<unsigned char>(line[k])))
      throw ParseError("expected a number", line_no, k + 1);
    for (; k < line.size() && std::isdigit(static_cast<unsigned char>(line[k])); ++k) {
      v = v * 10 + static_cast<std::size_t>(line[k] - '0');
      if (v > 1'000'000) throw ParseError("number too large", line_no, k + 1);
    }
    return std::pair{v, k};
  };
  skip_blank();
  const std::string head = "tower levels=";
  if (i >= lines.size() || lines[i].rfind(head, 0) != 0) throw ParseError("expected 'tower levels=<L>'", i + 1, 1);
  const auto [L, end] = read_count(lines[i], head.size(), i + 1);
  if (end != lines[i].find_last_not_of(" \r") + 1) throw ParseError("trailing characters", i + 1, end + 1);
  if (L == 0) throw ParseError("a tower needs at least one level", i + 1, head.size() + 1);
  if (L > max_levels) throw SizeGateExceeded("tower levels", std::to_string(L), std::to_string(max_levels));
  ++i;
  std::vector<PermGroup> levels;
  for (std::size_t lv = 1; lv <= L; ++lv) {
    skip_blank();
    const std::string want = "level " + std::to_string(lv);
    if (i >= lines.size() || lines[i].substr(0, lines[i].find_last_not_of(" \r") + 1) != want)
      throw ParseError("expected '" + want + "'", i + 1, 1);
    ++i;
    ParsedGroup pg = parse_group_block(lines, i);
    levels.push_back(pg.group());
    i += pg.lines_consumed;
  }
  std::vector<std::optional<Homomorphism>> down(L - 1);
  std::map<std::pair<std::size_t, std::size_t>, Homomorphism> extra;
  while (true) {
    skip_blank();
    if (i >= lines.size()) break;
    const std::size_t line_no = i + 1;
    if (lines[i].rfind("map ", 0) != 0) throw ParseError("expected 'map <from> <to>'", line_no, 1);
    const auto [from, e1] = read_count(lines[i], 4, line_no);
    if (e1 >= lines[i].size() || lines[i][e1] != ' ') throw ParseError("expected a space", line_no, e1 + 1);
    const auto [to, e2] = read_count(lines[i], e1 + 1, line_no);
    if (!(from > to && to >= 1 && from <= L)) throw ParseError("map levels out of range", line_no, 5);
    ++i;
    const PermGroup& dom = levels[from - 1];
    const PermGroup& cod = levels[to - 1];
    std::vector<Permutation> imgs;
    while (i < lines.size() && !blank(i) && imgs.size() < dom.generators().size()) {
      std::string_view l = lines[i];
      if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
      imgs.push_back(parse_permutation(l, cod.degree(), i + 1));
      ++i;
    }
    if (imgs.size() != dom.generators().size())
      throw ParseError("map " + std::to_string(from) + " " + std::to_string(to) + " needs " +
                           std::to_string(dom.generators().size()) + " images",
                       i + 1, 1);
    Homomorphism h(dom, cod, std::move(imgs));
    if (from == to + 1) {
      if (down[to - 1]) throw ParseError("duplicate map", line_no, 1);
      down[to - 1].emplace(std::move(h));
    } else if (!extra.emplace(std::pair{from, to}, std::move(h)).second) {
      throw ParseError("duplicate map", line_no, 1);
    }
  }
  std::vector<Homomorphism> ds;
  for (std::size_t k = 0; k + 1 < L; ++k) {
    if (!down[k]) throw ParseError("missing map " + std::to_string(k + 2) + " " + std::to_string(k + 1), lines.size(), 1);
    ds.push_back(std::move(*down[k]));
  }
  return InverseSystem(std::move(levels), std::move(ds), std::move(extra), max_levels);
}

}  // namespace integrals
