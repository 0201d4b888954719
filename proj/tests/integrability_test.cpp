#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>

#include "integrals/integrability.hpp"

using namespace integrals;

namespace {

CatalogStore& store() {
  static CatalogStore s = [] {
    Limits l;
    l.catalog_bound = 81;
    std::optional<std::filesystem::path> dir;
    if (const char* e = std::getenv(cache_dir_env); e && *e) dir = e;
    return CatalogStore(l, dir);
  }();
  return s;
}

std::uint64_t ord(const PermGroup& g) { return g.small_order(); }

std::optional<std::uint64_t> smallest(const IntegralReport& r) {
  if (r.findings.empty()) return std::nullopt;
  return r.findings.front().order;
}

PermGroup c5sq_c3() { return construct("semidirect(abelian(5,5),cyclic(3),action=[[g2,g1^-1*g2^-1]])"); }

}  // namespace

TEST(CheckIsIntegral, Examples) {
  PermGroup q8 = quaternion_group(8);
  EXPECT_TRUE(check_is_integral(sl23_group(), q8));
  EXPECT_TRUE(check_is_integral(symmetric_group(4), alternating_group(4)));
  EXPECT_FALSE(check_is_integral(dihedral_group(8), elementary_abelian(2, 2)));
  EXPECT_TRUE(check_is_integral(dihedral_group(8), cyclic_group(2)));
}

TEST(SearchIntegral, QuaternionHasIntegralOfOrder24) {
  PermGroup q8 = quaternion_group(8);
  IntegralReport r = search_integral(q8, 24, std::nullopt, store());
  EXPECT_EQ(r.searched, (std::vector<std::uint64_t>{8, 16, 24}));
  ASSERT_FALSE(r.findings.empty());
  EXPECT_EQ(smallest(r), 24u);
  EXPECT_TRUE(r.findings.front().canonical);
  EXPECT_EQ(r.verdict, Verdict::found_smallest_within_bound);
  bool has_sl23 = false;
  for (const auto& f : r.findings) has_sl23 = has_sl23 || is_isomorphic(f.group, sl23_group());
  EXPECT_TRUE(has_sl23);
}

TEST(SearchIntegral, SmallestTwoIntegrals) {
  EXPECT_EQ(smallest(search_integral(cyclic_group(8), 32, 2, store())), 32u);
  EXPECT_EQ(smallest(search_integral(abelian_group({4, 2}), 64, 2, store())), 64u);
  EXPECT_EQ(smallest(search_integral(elementary_abelian(2, 3), 64, 2, store())), 64u);
  EXPECT_EQ(smallest(search_integral(elementary_abelian(2, 2), 64, 2, store())), 32u);
}

TEST(SearchIntegral, SmallestThreeIntegrals) {
  EXPECT_EQ(smallest(search_integral(cyclic_group(3), 81, 3, store())), 27u);
  EXPECT_EQ(smallest(search_integral(elementary_abelian(3, 2), 81, 3, store())), 81u);
}

TEST(SearchIntegral, FindingsReverify) {
  for (const auto& [g, bound] : std::vector<std::pair<PermGroup, std::uint64_t>>{
           {quaternion_group(8), 48}, {cyclic_group(3), 24}, {alternating_group(4), 48}, {cyclic_group(4), 32}}) {
    IntegralReport r = search_integral(g, bound, std::nullopt, store());
    EXPECT_FALSE(r.findings.empty());
    for (const auto& f : r.findings) {
      EXPECT_EQ(ord(f.group), f.order);
      EXPECT_TRUE(check_is_integral(f.group, g));
      EXPECT_TRUE(f.witness.is_injective() && f.witness.is_surjective());
    }
    EXPECT_TRUE(std::is_sorted(r.findings.begin(), r.findings.end(),
                               [](const auto& a, const auto& b) { return a.order < b.order; }));
  }
}

TEST(SearchIntegral, EnlargingTheBoundKeepsFindings) {
  PermGroup q8 = quaternion_group(8);
  auto small = search_integral(q8, 24, std::nullopt, store());
  auto big = search_integral(q8, 48, std::nullopt, store());
  for (const auto& f : small.findings) {
    bool kept = false;
    for (const auto& g : big.findings) kept = kept || (g.order == f.order && g.index == f.index);
    EXPECT_TRUE(kept);
  }
  EXPECT_GT(big.findings.size(), small.findings.size());
}

TEST(SearchIntegral, DihedralHasNoneAndIsCertified) {
  IntegralReport r = search_integral(dihedral_group(8), 64, std::nullopt, store());
  EXPECT_TRUE(r.findings.empty());
  EXPECT_EQ(r.verdict, Verdict::certified_non_integrable);
  EXPECT_NE(r.reason.find("Aut(G)'"), std::string::npos);
}

TEST(SearchIntegral, NoneWithinBoundIsInconclusive) {
  IntegralReport r = search_integral(cyclic_group(2), 4, std::nullopt, store());
  EXPECT_TRUE(r.findings.empty());
  EXPECT_EQ(r.verdict, Verdict::none_within_bound);
  ASSERT_FALSE(r.notes.empty());
  EXPECT_EQ(smallest(search_integral(cyclic_group(2), 8, std::nullopt, store())), 8u);
}

TEST(SearchIntegral, CatalogUnavailable) {
  CatalogStore low;  // bound 64, no disk
  EXPECT_THROW(search_integral(cyclic_group(3), 81, 3, low), SizeGateExceeded);
}

TEST(SearchIntegral, ReportFormat) {
  IntegralReport r = search_integral(quaternion_group(8), 24, std::nullopt, store(), "quaternion(8)");
  const std::string s = format_report(r);
  EXPECT_EQ(s.rfind("integral-report v1\n", 0), 0u);
  EXPECT_NE(s.find("\ntarget=quaternion(8)\n"), std::string::npos);
  EXPECT_NE(s.find("\nsearched=8,16,24\n"), std::string::npos);
  EXPECT_NE(s.find("\nfinding.0.order=24\n"), std::string::npos);
  EXPECT_NE(s.find("\nfinding.0.canonical=yes\n"), std::string::npos);
  EXPECT_NE(s.find("\nverdict=found-smallest-within-bound\n"), std::string::npos);
  EXPECT_NE(summarize_report(r).find("smallest integral order 24"), std::string::npos);
}

TEST(SearchIntegral, ReportReverifiesFromText) {
  IntegralReport r = search_integral(cyclic_group(3), 27, 3, store(), "cyclic(3)");
  const std::string s = format_report(r);
  EXPECT_EQ(reverify_report(s), r.findings.size());
  EXPECT_GT(r.findings.size(), 0u);
  // tamper with a witness image
  std::string bad = s;
  const auto at = bad.find("->", bad.find("finding.0.witness="));
  ASSERT_NE(at, std::string::npos);
  bad.replace(at + 2, bad.find_first_of(";\n", at) - at - 2, "()");
  EXPECT_THROW(reverify_report(bad), Error);
  EXPECT_THROW(reverify_report("integral-report v2\n"), ParseError);
}

TEST(Certify, Examples) {
  EXPECT_TRUE(certify_non_integrable(dihedral_group(8)).has_value());
  auto q = certify_non_integrable(quaternion_group(8), 2);
  ASSERT_TRUE(q.has_value());
  EXPECT_NE(q->find("2-integrable"), std::string::npos);
  EXPECT_FALSE(certify_non_integrable(quaternion_group(8)).has_value());
  EXPECT_FALSE(certify_non_integrable(extraspecial_group(3, 9)).has_value());
  EXPECT_FALSE(certify_non_integrable(elementary_abelian(2, 3), 2).has_value());
}

TEST(Reduce, Examples) {
  PermGroup q8 = quaternion_group(8);
  PermGroup h = direct_product({sl23_group(), cyclic_group(5)});
  PermGroup r = reduce_integral(h, q8);
  EXPECT_EQ(ord(r), 24u);
  EXPECT_TRUE(check_is_integral(r, q8));
  PermGroup again = reduce_integral(r, q8);
  EXPECT_EQ(ord(again), 24u);

  PermGroup a4 = alternating_group(4);
  PermGroup s = reduce_integral(direct_product({symmetric_group(4), cyclic_group(3)}), a4);
  EXPECT_EQ(ord(s), 24u);
  EXPECT_TRUE(check_is_integral(s, a4));

  PermGroup fixed = reduce_integral(symmetric_group(4), a4);
  EXPECT_EQ(format_group(fixed), format_group(symmetric_group(4)));

  EXPECT_THROW(reduce_integral(symmetric_group(4), q8), PreconditionError);
}

TEST(Reduce, NeverGrowsAndKeepsIntegral) {
  PermGroup c3 = cyclic_group(3);
  for (const auto& h : {direct_product({symmetric_group(3), cyclic_group(2), cyclic_group(2)}),
                        direct_product({symmetric_group(3), cyclic_group(6)}), symmetric_group(3),
                        direct_product({symmetric_group(3), symmetric_group(3)})}) {
    if (!check_is_integral(h, c3)) continue;
    PermGroup r = reduce_integral(h, c3);
    EXPECT_LE(r.order(), h.order());
    EXPECT_TRUE(check_is_integral(r, c3));
    EXPECT_LE(abelian_invariants(centre(r)).rank(), 1u);
  }
}

TEST(QuotientIntegral, Examples) {
  PermGroup sl = sl23_group();
  PermGroup q8 = derived_subgroup(sl);
  PermGroup r = quotient_integral(sl, q8, centre(q8));
  EXPECT_TRUE(is_isomorphic(derived_subgroup(r), elementary_abelian(2, 2)));

  EXPECT_TRUE(derived_subgroup(quotient_integral(sl, q8, q8)).is_trivial());

  PermGroup s4 = symmetric_group(4);
  PermGroup a4 = alternating_group(4);
  PermGroup v4 = derived_subgroup(a4);
  PermGroup t = quotient_integral(s4, a4, v4);
  EXPECT_EQ(abelian_invariants(derived_subgroup(t)).to_string(), "(3)");

  // an abstract copy of G works too
  PermGroup rq = quotient_integral(sl, quaternion_group(8), centre(quaternion_group(8)));
  EXPECT_TRUE(is_isomorphic(derived_subgroup(rq), elementary_abelian(2, 2)));

  // an order-2 subgroup of V4 is not characteristic in A4
  PermGroup one = subgroup(a4, {v4.generators()[0]});
  EXPECT_THROW(quotient_integral(s4, a4, one), PreconditionError);
  // Z(Q8) not contained in N
  EXPECT_THROW(quotient_integral(sl, q8, PermGroup::trivial(q8.degree())), PreconditionError);
}

TEST(Malcev, HeisenbergGroups) {
  for (std::uint64_t p : {3u, 5u}) {
    PermGroup g = heisenberg_group(p);
    PermGroup h = malcev_integral(g);
    EXPECT_EQ(ord(h), 2 * ord(g));
    EXPECT_TRUE(check_is_integral(h, g));
  }
}

TEST(Malcev, AbelianCaseIsInversion) {
  PermGroup g = elementary_abelian(3, 2);
  PermGroup h = malcev_integral(g);
  EXPECT_EQ(ord(h), 18u);
  EXPECT_TRUE(check_is_integral(h, g));
  EXPECT_EQ(ord(malcev_integral(elementary_abelian(5, 3))), 250u);
}

TEST(Malcev, RejectsBadInput) {
  EXPECT_THROW(malcev_integral(cyclic_group(4)), PreconditionError);
  EXPECT_THROW(malcev_integral(cyclic_group(9)), PreconditionError);
  EXPECT_THROW(malcev_integral(elementary_abelian(2, 2)), PreconditionError);
}

TEST(Aqap, AlternatingFour) {
  PermGroup a4 = alternating_group(4);
  PermGroup h = aqap_integral(a4, 2, 3);
  EXPECT_EQ(ord(h), 24u);
  EXPECT_TRUE(check_is_integral(h, a4));
  EXPECT_TRUE(is_isomorphic(h, symmetric_group(4)));
}

TEST(Aqap, FrobeniusSeventyFive) {
  PermGroup g = c5sq_c3();
  PermGroup h = aqap_integral(g, 5, 3);
  EXPECT_EQ(ord(h), 150u);
  EXPECT_TRUE(check_is_integral(h, g));
}

TEST(Aqap, WithCentralFactor) {
  // A4 × C2: C_Q(P) = C2 is split off and integrated on its own
  PermGroup g = direct_product({alternating_group(4), cyclic_group(2)});
  PermGroup h = aqap_integral(g, 2, 3);
  EXPECT_TRUE(check_is_integral(h, g));
}

TEST(Aqap, PureQGroup) {
  PermGroup g = elementary_abelian(2, 2);
  PermGroup h = aqap_integral(g, 2, 3);
  EXPECT_TRUE(check_is_integral(h, g));
  PermGroup c = elementary_abelian(5, 3);
  EXPECT_TRUE(check_is_integral(aqap_integral(c, 5, 3), c));
}

TEST(Aqap, RejectsBadHypotheses) {
  EXPECT_THROW(aqap_integral(construct("semidirect(cyclic(7),cyclic(3),action=[[g1^2]])"), 7, 3), PreconditionError);
  EXPECT_THROW(aqap_integral(symmetric_group(4), 2, 3), PreconditionError);
  EXPECT_THROW(aqap_integral(alternating_group(4), 2, 2), PreconditionError);
}

// For every catalog group H of order <= 48, G = H' has Inn(G) <= Aut(G)'.
TEST(Sweep, DerivedGroupsSatisfyNecessaryCondition) {
  std::size_t checked = 0;
  for (std::uint64_t n = 1; n <= 48; ++n)
    for (const auto& h : store().get(n).entries) {
      PermGroup g = derived_subgroup(h);
      EXPECT_EQ(necessary_condition(g), NecessaryCondition::holds) << "n=" << n;
      ++checked;
    }
  EXPECT_GT(checked, 200u);
}

// No 3-group of order below 27 has derived subgroup C3; one of order 27 does.
TEST(Sweep, CyclicDerivedOfOrderThreeNeedsOrder27) {
  for (std::uint64_t n : {3u, 9u})
    for (const auto& h : store().get(n).entries) EXPECT_NE(ord(derived_subgroup(h)), 3u);
  std::size_t hits = 0;
  for (const auto& h : store().get(27).entries) hits += ord(derived_subgroup(h)) == 3;
  EXPECT_GT(hits, 0u);
  EXPECT_EQ(ord(lemma00_integral(AbelianType{{3}}, 3)), 27u);
}

// For H generated by t elements, K = C_H(H') satisfies |K/Z(H)| <= |Z(H')|^t.
TEST(Sweep, CentralizerOverCentreBound) {
  for (std::uint64_t n = 2; n <= 48; ++n)
    for (const auto& h : store().get(n).entries) {
      PermGroup g = derived_subgroup(h);
      PermGroup k = centralizer(h, g);
      const BigInt lhs = k.order() / centre(h).order();
      const std::size_t t = table_of(h)->greedy_generators().size();
      BigInt rhs = 1;
      for (std::size_t i = 0; i < t; ++i) rhs *= centre(g).order();
      EXPECT_LE(lhs, rhs) << "n=" << n;
    }
}
