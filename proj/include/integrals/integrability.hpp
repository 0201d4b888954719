#pragma once

// Integrals: groups H with H' isomorphic to a target G. Catalog search,
// non-integrability certificates, reductions, and explicit constructions.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "integrals/abelian.hpp"
#include "integrals/catalog.hpp"
#include "integrals/constructors.hpp"
#include "integrals/error.hpp"
#include "integrals/group_io.hpp"
#include "integrals/group_table.hpp"
#include "integrals/iso_aut.hpp"
#include "integrals/limits.hpp"
#include "integrals/parallel.hpp"
#include "integrals/structure.hpp"

namespace integrals {

/// True when H' is isomorphic to G.
inline bool check_is_integral(const PermGroup& h, const PermGroup& g, const Limits& limits = {}) {
  return is_isomorphic(derived_subgroup(h), g, limits);
}

// ---------------------------------------------------------------------------
// Certificates

/// A reason G has no integral (or, with a prime, no p-group integral), if
/// one of the available tests proves it.
inline std::optional<std::string> certify_non_integrable(const PermGroup& g, std::optional<std::uint64_t> p = std::nullopt,
                                                         const Limits& limits = {}) {
  if (necessary_condition(g, limits) == NecessaryCondition::fails)
    return std::string("not integrable: Inn(G) is not contained in Aut(G)'");
  if (!p) return std::nullopt;
  const BigInt n = g.order();
  BigInt m = n;
  while (m % *p == 0) m /= *p;
  if (m != 1) return "not " + std::to_string(*p) + "-integrable: G is not a " + std::to_string(*p) + "-group";
  if (g.is_abelian()) return std::nullopt;
  if (abelian_invariants(centre(g, limits)).rank() <= 1)
    return "not " + std::to_string(*p) + "-integrable: nonabelian with cyclic centre";
  if (n / derived_subgroup(g).order() == BigInt(*p) * *p)
    return "not " + std::to_string(*p) + "-integrable: nonabelian with derived subgroup of index p^2";
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Catalog search

struct IntegralFinding {
  std::uint64_t order = 0;
  std::size_t index = 0;  // position in the catalog of that order
  bool canonical = false;  // first finding of its order
  PermGroup group;
  Homomorphism witness;  // H' -> G, bijective
};

enum class Verdict { found_smallest_within_bound, none_within_bound, certified_non_integrable };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::found_smallest_within_bound: return "found-smallest-within-bound";
    case Verdict::none_within_bound: return "none-within-bound";
    case Verdict::certified_non_integrable: return "certified-non-integrable";
  }
  return "?";
}

struct IntegralReport {
  std::string target;  // how the target was given
  std::optional<PermGroup> target_group;
  Fingerprint target_fingerprint;
  std::uint64_t bound = 0;
  std::optional<std::uint64_t> prime;
  std::vector<std::uint64_t> searched;
  std::vector<IntegralFinding> findings;  // sorted by order, then index
  Verdict verdict = Verdict::none_within_bound;
  std::string reason;
  std::vector<std::string> notes;
};

/// Orders |G|, 2|G|, ... up to the bound, restricted to powers of p when a
/// prime is given.
inline std::vector<std::uint64_t> integral_search_orders(std::uint64_t n, std::uint64_t bound, std::optional<std::uint64_t> p) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t m = n; m <= bound; m += n) {
    if (p) {
      std::uint64_t x = m;
      while (x % *p == 0) x /= *p;
      if (x != 1) continue;
    }
    out.push_back(m);
  }
  return out;
}

/// Scans every catalog group of each candidate order for H' ≅ G. All
/// findings are reported; `none-within-bound` is inconclusive unless a
/// certificate applies.
inline IntegralReport search_integral(const PermGroup& g, std::uint64_t bound, std::optional<std::uint64_t> p,
                                      CatalogStore& store, std::string target_text = {}) {
  const Limits& limits = store.limits();
  IntegralReport r;
  r.target = std::move(target_text);
  r.target_group = g;
  r.target_fingerprint = fingerprint(g, limits);
  r.bound = bound;
  r.prime = p;
  const std::uint64_t n = g.small_order();
  r.searched = integral_search_orders(n, bound, p);
  for (std::uint64_t m : r.searched) {
    const Catalog& c = store.get(m);
    std::vector<std::optional<Homomorphism>> hits(c.entries.size());
    parallel_for(c.entries.size(), limits.workers, [&](std::size_t i) {
      if (c.fingerprints[i].derived_order != BigInt(n)) return;
      PermGroup d = derived_subgroup(c.entries[i]);
      Limits l = limits;
      l.workers = 1;
      hits[i] = find_isomorphism(d, g, l);
    });
    bool first = true;
    for (std::size_t i = 0; i < hits.size(); ++i) {
      if (!hits[i]) continue;
      r.findings.push_back({m, i, first, c.entries[i], std::move(*hits[i])});
      first = false;
    }
  }
  std::optional<std::string> cert;
  try {
    cert = certify_non_integrable(g, p, limits);
  } catch (const SizeGateExceeded& e) {
    r.notes.push_back(std::string("certificate tests skipped: ") + e.what());
  }
  if (!r.findings.empty()) {
    if (cert) throw Error("search_integral: found an integral of a certified non-integrable group (" + *cert + ")");
    r.verdict = Verdict::found_smallest_within_bound;
  } else if (cert) {
    r.verdict = Verdict::certified_non_integrable;
    r.reason = *cert;
  } else {
    r.verdict = Verdict::none_within_bound;
    r.notes.push_back("no integral up to the bound; this does not prove non-integrability");
  }
  return r;
}

/// Machine-readable form: one `key=value` per line.
inline std::string format_report(const IntegralReport& r) {
  std::ostringstream o;
  o << "integral-report v1\n";
  if (!r.target.empty()) o << "target=" << r.target << "\n";
  o << "target.order=" << r.target_fingerprint.order << "\n";
  o << "target.fingerprint=" << r.target_fingerprint.to_string() << "\n";
  if (r.target_group) {
    o << "target.degree=" << r.target_group->degree() << "\n";
    o << "target.generators=";
    for (std::size_t j = 0; j < r.target_group->generators().size(); ++j)
      o << (j ? ";" : "") << r.target_group->generators()[j].to_string();
    o << "\n";
  }
  o << "bound=" << r.bound << "\n";
  o << "prime=" << (r.prime ? std::to_string(*r.prime) : std::string("none")) << "\n";
  o << "searched=";
  for (std::size_t i = 0; i < r.searched.size(); ++i) o << (i ? "," : "") << r.searched[i];
  o << "\n";
  o << "findings=" << r.findings.size() << "\n";
  for (std::size_t i = 0; i < r.findings.size(); ++i) {
    const auto& f = r.findings[i];
    const std::string k = "finding." + std::to_string(i) + ".";
    o << k << "order=" << f.order << "\n";
    o << k << "catalog-index=" << f.index << "\n";
    o << k << "canonical=" << (f.canonical ? "yes" : "no") << "\n";
    o << k << "degree=" << f.group.degree() << "\n";
    o << k << "generators=";
    for (std::size_t j = 0; j < f.group.generators().size(); ++j) o << (j ? ";" : "") << f.group.generators()[j].to_string();
    o << "\n" << k << "witness=";
    const auto& gens = f.witness.domain().generators();
    for (std::size_t j = 0; j < gens.size(); ++j)
      o << (j ? ";" : "") << gens[j].to_string() << "->" << f.witness.images()[j].to_string();
    o << "\n";
  }
  o << "verdict=" << to_string(r.verdict) << "\n";
  if (!r.reason.empty()) o << "reason=" << r.reason << "\n";
  for (const auto& n : r.notes) o << "note=" << n << "\n";
  return o.str();
}

/// Short human-readable summary.
inline std::string summarize_report(const IntegralReport& r) {
  std::ostringstream o;
  o << "target of order " << r.target_fingerprint.order;
  if (!r.target.empty()) o << " (" << r.target << ")";
  o << ", bound " << r.bound;
  if (r.prime) o << ", " << *r.prime << "-groups only";
  o << "\n";
  if (r.findings.empty()) {
    o << "no integral found";
  } else {
    o << "smallest integral order " << r.findings.front().order << "; " << r.findings.size() << " finding(s) at orders";
    std::uint64_t last = 0;
    for (const auto& f : r.findings)
      if (f.order != last) o << " " << (last = f.order);
  }
  o << "\nverdict: " << to_string(r.verdict);
  if (!r.reason.empty()) o << " (" << r.reason << ")";
  o << "\n";
  for (const auto& n : r.notes) o << "note: " << n << "\n";
  return o.str();
}

/// Re-reads a report written by format_report and checks every finding
/// again from the text alone: H' is generated by the witness domain and
/// the witness is a bijective homomorphism onto the target. Returns the
/// number of findings checked.
inline std::size_t reverify_report(std::string_view text, const Limits& limits = {}) {
  const auto lines = split_lines(text);
  std::map<std::string, std::pair<std::string, std::size_t>> kv;  // value, line number
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    if (i == 0) {
      if (lines[0] != "integral-report v1") throw ParseError("expected 'integral-report v1'", 1, 1);
      continue;
    }
    const auto eq = lines[i].find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value", i + 1, 1);
    const std::string key = lines[i].substr(0, eq);
    if (key == "note") continue;
    kv[key] = {lines[i].substr(eq + 1), i + 1};
  }
  auto get = [&](const std::string& key) -> const std::pair<std::string, std::size_t>& {
    auto it = kv.find(key);
    if (it == kv.end()) throw ParseError("missing key '" + key + "'", lines.size(), 1);
    return it->second;
  };
  auto number = [&](const std::string& key) {
    const auto& [v, line] = get(key);
    try {
      std::size_t used = 0;
      const unsigned long long n = std::stoull(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return static_cast<std::uint64_t>(n);
    } catch (const std::logic_error&) {
      throw ParseError("expected a number", line, key.size() + 2);
    }
  };
  auto perms = [&](const std::string& key, std::size_t degree) {
    const auto& [v, line] = get(key);
    std::vector<Permutation> out;
    std::size_t start = 0;
    while (start <= v.size()) {
      std::size_t end = v.find(';', start);
      if (end == std::string::npos) end = v.size();
      out.push_back(parse_permutation(std::string_view(v).substr(start, end - start), degree, line, key.size() + 2 + start));
      start = end + 1;
    }
    return out;
  };
  const std::size_t tdeg = number("target.degree");
  const PermGroup target(tdeg, perms("target.generators", tdeg));
  if (target.order() != BigInt(number("target.order"))) throw Error("report: target order does not match its generators");
  const std::size_t count = number("findings");
  for (std::size_t i = 0; i < count; ++i) {
    const std::string k = "finding." + std::to_string(i) + ".";
    const std::size_t deg = number(k + "degree");
    const PermGroup h(deg, perms(k + "generators", deg));
    if (h.order() != BigInt(number(k + "order"))) throw Error("report: finding " + std::to_string(i) + " has the wrong order");
    const auto& [w, line] = get(k + "witness");
    std::vector<Permutation> dom, img;
    std::size_t start = 0;
    while (start <= w.size()) {
      std::size_t end = w.find(';', start);
      if (end == std::string::npos) end = w.size();
      const std::string_view part = std::string_view(w).substr(start, end - start);
      const auto arrow = part.find("->");
      if (arrow == std::string_view::npos) throw ParseError("expected '->'", line, k.size() + 9 + start);
      dom.push_back(parse_permutation(part.substr(0, arrow), deg, line, k.size() + 9 + start));
      img.push_back(parse_permutation(part.substr(arrow + 2), tdeg, line, k.size() + 11 + start + arrow));
      start = end + 1;
    }
    const PermGroup d = derived_subgroup(h);
    const PermGroup wd(deg, dom);
    if (wd.order() != d.order() || !d.contains(wd))
      throw Error("report: witness domain of finding " + std::to_string(i) + " is not H'");
    Homomorphism phi(wd, target, img);
    if (!phi.is_injective() || !phi.is_surjective())
      throw Error("report: witness of finding " + std::to_string(i) + " is not bijective");
    (void)limits;
  }
  return count;
}

// ---------------------------------------------------------------------------
// Reductions

namespace detail {

inline unsigned p_rank(const PermGroup& abelian, std::uint64_t p) { return abelian_invariants(abelian).p_rank(p); }

inline void require_integral(const PermGroup& h, const PermGroup& g, const Limits& limits, const char* what) {
  if (!check_is_integral(h, g, limits)) throw PreconditionError(std::string(what) + ": H is not an integral of G");
}

}  // namespace detail

/// Divides H by central subgroups meeting H' trivially until, for every
/// prime p, the p-rank of Z(H) is at most that of Z(G). Each step keeps
/// H' ≅ G.
inline PermGroup reduce_integral(PermGroup h, const PermGroup& g, const Limits& limits = {}) {
  detail::require_integral(h, g, limits, "reduce_integral");
  const PermGroup zg = centre(g, limits);
  while (true) {
    const PermGroup zh = centre(h, limits);
    const PermGroup d = derived_subgroup(h);
    std::optional<Permutation> kill;
    for (std::uint64_t p : prime_divisors(zh.order(), h.degree())) {
      if (detail::p_rank(zh, p) <= detail::p_rank(zg, p)) continue;
      // an element of order p in Z(H) outside H' spans N with N ∩ H' = 1
      zh.for_each_element([&](const Permutation& z) {
        if (z.order() == p && !d.contains(z)) {
          kill = z;
          return false;
        }
        return true;
      });
      if (kill) break;
      throw Error("reduce_integral: no central element of order " + std::to_string(p) + " outside H'");
    }
    if (!kill) return h;
    PermGroup next = quotient(h, subgroup(h, {*kill}), limits).group;
    if (!check_is_integral(next, g, limits)) throw Error("reduce_integral: reduction step lost the integral property");
    h = std::move(next);
  }
}

/// For an integral H of G and N characteristic in G containing Z(G):
/// H / (N C_H(G)), whose derived subgroup is G/N. G may be H' itself or any
/// group isomorphic to it; N is a subgroup of G.
inline PermGroup quotient_integral(const PermGroup& h, const PermGroup& g, const PermGroup& n, const Limits& limits = {}) {
  if (!g.contains(n)) throw PreconditionError("quotient_integral: N is not a subgroup of G");
  if (!n.contains(centre(g, limits))) throw PreconditionError("quotient_integral: Z(G) is not contained in N");
  AutGroup aut = automorphism_group(g, limits);
  for (const auto& a : aut.carrier.generators()) {
    Homomorphism phi = aut.to_homomorphism(g, a);
    for (const auto& x : n.generators())
      if (!n.contains(phi.apply(x))) throw PreconditionError("quotient_integral: N is not characteristic in G");
  }
  const PermGroup d = derived_subgroup(h);
  auto iso = find_isomorphism(g, d, limits);
  if (!iso) throw PreconditionError("quotient_integral: H is not an integral of G");
  std::vector<Permutation> ngens;
  for (const auto& x : n.generators()) ngens.push_back(iso->apply(x));
  PermGroup n_in_h = subgroup(h, ngens);
  PermGroup k = join(n_in_h, centralizer(h, d, limits));
  return quotient(h, k, limits).group;
}

// ---------------------------------------------------------------------------
// Constructions

namespace detail {

/// <λ(G), α> acting on the elements of G, for automorphisms α given as
/// permutations of table indices. Its order is |G| times the order of
/// <α> when no nontrivial power of α is inner-by-translation (always, as
/// α fixes the identity).
inline PermGroup extend_by_automorphisms(const GroupTable& t, const std::vector<Permutation>& alphas) {
  PermGroup reg = t.regular_group(t.greedy_generators());
  std::vector<Permutation> gens = reg.generators();
  gens.insert(gens.end(), alphas.begin(), alphas.end());
  return PermGroup(t.size(), gens);
}

/// Greedily extends `start` by elements of `pool` (in order) until the
/// generated subgroup contains every element of `pool`.
inline std::vector<GroupTable::Index> greedy_basis(const GroupTable& t, const std::vector<GroupTable::Index>& start,
                                                   const std::vector<GroupTable::Index>& pool) {
  std::vector<GroupTable::Index> chosen, all = start;
  std::vector<bool> in = t.closure(all);
  for (auto x : pool) {
    if (in[x]) continue;
    chosen.push_back(x);
    all.push_back(x);
    in = t.closure(all);
  }
  return chosen;
}

}  // namespace detail

/// For G of odd prime exponent p and class at most 2: the automorphism α of
/// order 2 that negates a complement of [L,L] in the associated Lie ring
/// (x + y = x y [x,y]^(-1/2)) and fixes [L,L]. Returns <λ(G), α>, of order
/// 2|G|, whose derived subgroup is G.
inline PermGroup malcev_integral(const PermGroup& g, const Limits& limits = {}) {
  const std::uint64_t p = exponent(g, limits);
  if (p == 1) return PermGroup::trivial(1);
  if (p == 2 || !detail::is_prime(p)) throw PreconditionError("malcev_integral: exponent must be an odd prime");
  auto cls = nilpotency_class(g);
  if (!cls || *cls > 2) throw PreconditionError("malcev_integral: nilpotency class must be at most 2");
  auto tp = table_of(g, limits);
  const GroupTable& t = *tp;
  const std::size_t n = t.size();
  const PermGroup d = derived_subgroup(g);
  std::vector<GroupTable::Index> d_idx, rest;
  for (GroupTable::Index x = 0; x < n; ++x) (d.contains(t.element(x)) ? d_idx : rest).push_back(x);
  const auto cbasis = detail::greedy_basis(t, {}, d_idx);
  const auto xbasis = detail::greedy_basis(t, d_idx, rest);
  // [x,y]^(1/2) inside the cyclic group <[x,y]>: c^((p+1)/2)
  auto lie_add = [&](GroupTable::Index x, GroupTable::Index y) {
    const GroupTable::Index c = t.commutator(x, y);
    return t.mul(t.mul(x, y), t.inv(t.pow(c, (p + 1) / 2)));
  };
  auto lie_scale = [&](GroupTable::Index x, std::uint64_t k) { return t.pow(x, k); };  // k·x = x^k
  // element for coefficient vector (a | b) over the basis (x_i | c_j)
  const std::size_t dim = xbasis.size() + cbasis.size();
  std::vector<GroupTable::Index> basis = xbasis;
  basis.insert(basis.end(), cbasis.begin(), cbasis.end());
  std::vector<GroupTable::Index> alpha(n, 0);
  std::vector<bool> seen(n, false);
  std::vector<std::uint64_t> coef(dim, 0);
  std::size_t count = 0;
  while (true) {
    GroupTable::Index e = 0, a = 0;
    for (std::size_t i = 0; i < dim; ++i) {
      e = lie_add(e, lie_scale(basis[i], coef[i]));
      a = lie_add(a, lie_scale(basis[i], i < xbasis.size() ? (p - coef[i]) % p : coef[i]));
    }
    if (seen[e]) throw Error("malcev_integral: Lie coordinates are not unique");
    seen[e] = true;
    alpha[e] = a;
    ++count;
    std::size_t i = 0;
    while (i < dim && ++coef[i] == p) coef[i++] = 0;
    if (i == dim) break;
  }
  if (count != n) throw Error("malcev_integral: Lie coordinates do not cover G");
  // cross-check: the group map x_i -> x_i^-1 on the generators
  std::vector<Permutation> imgs;
  std::vector<Permutation> xgens;
  for (auto x : xbasis) {
    xgens.push_back(t.element(x));
    imgs.push_back(t.element(t.inv(x)));
  }
  PermGroup gx(g.degree(), xgens);
  Homomorphism hom(gx, g, imgs);  // throws if not well defined
  for (GroupTable::Index x = 0; x < n; ++x)
    if (t.index_of(hom.apply(t.element(x))) != alpha[x]) throw Error("malcev_integral: Lie and group automorphisms differ");
  std::vector<Point> img(alpha.begin(), alpha.end());
  return detail::extend_by_automorphisms(t, {Permutation(std::move(img))});
}

namespace detail {

inline std::uint64_t multiplicative_order(std::uint64_t a, std::uint64_t m) {
  std::uint64_t x = a % m, k = 1;
  while (x != 1) {
    x = x * a % m;
    ++k;
    if (k > m) throw PreconditionError("multiplicative order: not a unit");
  }
  return k;
}

/// Integral of an abelian group: the double integral for A ≅ B×B, and the
/// prime-power construction otherwise.
inline PermGroup abelian_integral(const PermGroup& a) {
  AbelianType t = abelian_invariants(a);
  if (t.factors.empty()) return PermGroup::trivial(1);
  // B×B when every invariant factor occurs an even number of times
  std::map<std::uint64_t, unsigned> mult;
  for (auto f : t.factors) ++mult[f];
  bool even = true;
  for (auto& [f, c] : mult) even = even && c % 2 == 0;
  if (even) {
    AbelianType half;
    for (auto& [f, c] : mult) half.factors.insert(half.factors.end(), c / 2, f);
    return double_integral(half, false);
  }
  std::vector<PermGroup> parts;
  std::map<std::uint64_t, std::vector<unsigned>> ed;
  for (auto f : t.factors)
    for (std::uint64_t q = 2; f > 1; ++q) {
      unsigned e = 0;
      while (f % q == 0) {
        f /= q;
        ++e;
      }
      if (e) ed[q].push_back(e);
    }
  for (auto& [q, es] : ed) {
    AbelianType pt = AbelianType::from_elementary_divisors({{q, es}});
    parts.push_back(lemma00_integral(pt, q));
  }
  return parts.size() == 1 ? parts[0] : direct_product(parts);
}

}  // namespace detail

/// Integral of G with a normal elementary abelian q-subgroup Q and G/Q
/// elementary abelian of exponent p, where p does not divide q-1. G splits
/// as G1 × C_Q(P) for a Sylow p-subgroup P and G1 = [Q,P]P; the abelian
/// factor is integrated directly and G1 by G1 ⋊ <α> for an automorphism α of
/// order ord_p(q) that stabilizes P and acts on G1/Q as a nontrivial power.
inline PermGroup aqap_integral(const PermGroup& g, std::uint64_t q, std::uint64_t p, const Limits& limits = {}) {
  if (!detail::is_prime(q) || !detail::is_prime(p) || p == q) throw PreconditionError("aqap_integral: need distinct primes q, p");
  if ((q - 1) % p == 0) throw PreconditionError("aqap_integral: p divides q-1");
  g.require_enumerable(limits, "aqap_integral");
  auto is_power_of = [](std::uint64_t x, std::uint64_t r) {
    while (x % r == 0) x /= r;
    return x == 1;
  };
  std::vector<Permutation> qel, pel;
  g.for_each_element([&](const Permutation& x) {
    const std::uint64_t o = x.order();
    if (o > 1 && is_power_of(o, q)) qel.push_back(x);
    if (o == p) pel.push_back(x);
    return true;
  });
  PermGroup qq = subgroup(g, qel);
  BigInt qpart = g.order();
  while (qpart % q == 0) qpart /= q;
  if (qq.order() * qpart != g.order() || !is_normal(g, qq))
    throw PreconditionError("aqap_integral: no normal Sylow q-subgroup");
  if (!qq.is_abelian() || (!qq.is_trivial() && exponent(qq, limits) != q))
    throw PreconditionError("aqap_integral: Q is not elementary abelian");
  Quotient gq = quotient(g, qq, limits);
  if (!gq.group.is_abelian() || (!gq.group.is_trivial() && exponent(gq.group, limits) != p))
    throw PreconditionError("aqap_integral: G/Q is not elementary abelian of exponent p");
  // Sylow p-subgroup, grown one commuting element at a time
  const BigInt ppart = qpart;
  std::vector<Permutation> pgens;
  PermGroup pp = PermGroup::trivial(g.degree());
  for (const auto& x : pel) {
    if (pp.order() == ppart) break;
    if (pp.contains(x)) continue;
    bool commutes = true;
    for (const auto& y : pgens) commutes = commutes && x * y == y * x;
    if (!commutes) continue;
    pgens.push_back(x);
    pp = subgroup(g, pgens);
  }
  if (pp.order() != ppart) throw Error("aqap_integral: could not find a Sylow p-subgroup");

  PermGroup cqp = centralizer(qq, pp, limits);
  if (pp.is_trivial()) return detail::abelian_integral(qq);
  PermGroup qp = commutator_subgroup(g, qq, pp);
  PermGroup g1 = join(qp, pp);
  if (g1.order() * cqp.order() != g.order()) throw Error("aqap_integral: G is not [Q,P]P × C_Q(P)");

  // α ∈ Aut(G1) of order m, α(P) = P, α(x) ≡ x^k mod Q1 with k ≠ 1 mod p
  const std::uint64_t m = detail::multiplicative_order(q, p);
  Limits l = limits;
  AutGroup aut = automorphism_group(g1, l);
  const GroupTable& t = *aut.table;
  const PermGroup q1 = subgroup(g1, qp.generators());
  std::vector<bool> in_p(t.size()), in_q1(t.size());
  for (GroupTable::Index x = 0; x < t.size(); ++x) {
    in_p[x] = pp.contains(t.element(x));
    in_q1[x] = q1.contains(t.element(x));
  }
  std::vector<GroupTable::Index> g1gens;
  for (const auto& x : g1.generators()) g1gens.push_back(t.index_of(x));
  std::optional<Permutation> found;
  aut.carrier.for_each_element([&](const Permutation& a) {
    if (a.order() != m) return true;
    for (GroupTable::Index x = 0; x < t.size(); ++x)
      if (in_p[x] && !in_p[a[x]]) return true;
    // the power k, read off a generator outside Q1
    std::optional<std::uint64_t> k;
    for (auto x : g1gens) {
      if (in_q1[x]) continue;
      for (std::uint64_t e = 0; e < p && !k; ++e)
        if (in_q1[t.mul(t.inv(t.pow(x, e)), a[x])]) k = e;
      break;
    }
    if (!k || *k == 1 % p || *k == 0) return true;
    for (auto x : g1gens)
      if (!in_q1[t.mul(t.inv(t.pow(x, *k)), a[x])]) return true;
    found = a;
    return false;
  });
  if (!found) throw Error("aqap_integral: no automorphism of order " + std::to_string(m) + " acting as a power was found");
  PermGroup h1 = detail::extend_by_automorphisms(t, {*found});
  if (cqp.is_trivial()) return h1;
  return direct_product({h1, detail::abelian_integral(cqp)});
}

}  // namespace integrals
