#include <gtest/gtest.h>

#include <functional>

#include "integrals/constructors.hpp"
#include "integrals/iso_aut.hpp"
#include "integrals/lattice.hpp"
#include "integrals/structure.hpp"
#include "oracle.hpp"

using namespace integrals;

namespace {

std::uint64_t ord(const PermGroup& g) { return g.small_order(); }

oracle::Perm raw(const Permutation& p) { return {p.images().begin(), p.images().end()}; }

// Number of automorphisms, by trying every tuple of images of the
// generators and checking the induced map on all elements.
std::size_t brute_aut_count(const PermGroup& g) {
  std::vector<oracle::Perm> els, gens;
  for (const auto& x : g.elements()) els.push_back(raw(x));
  for (const auto& x : g.generators()) gens.push_back(raw(x));
  const oracle::Perm e = oracle::identity(gens[0].size());
  std::vector<oracle::Perm> imgs(gens.size());
  std::size_t count = 0;
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k < gens.size()) {
      for (const auto& y : els) {
        imgs[k] = y;
        rec(k + 1);
      }
      return;
    }
    // BFS over words: phi(w*s_i) = phi(w)*t_i
    std::map<oracle::Perm, oracle::Perm> phi{{e, e}};
    std::vector<oracle::Perm> todo{e};
    while (!todo.empty()) {
      oracle::Perm w = todo.back();
      todo.pop_back();
      for (std::size_t i = 0; i < gens.size(); ++i) {
        oracle::Perm ws = oracle::mul(w, gens[i]), im = oracle::mul(phi[w], imgs[i]);
        auto it = phi.find(ws);
        if (it == phi.end()) {
          phi[ws] = im;
          todo.push_back(ws);
        } else if (it->second != im) {
          return;
        }
      }
    }
    std::set<oracle::Perm> s;
    for (const auto& [k2, v] : phi) s.insert(v);
    if (s.size() == els.size()) ++count;
  };
  rec(0);
  return count;
}

}  // namespace

TEST(Isomorphism, Examples) {
  EXPECT_FALSE(is_isomorphic(quaternion_group(8), dihedral_group(8)));
  PermGroup c6a = cyclic_group(6);
  PermGroup c6b = direct_product({cyclic_group(2), cyclic_group(3)});
  EXPECT_TRUE(is_isomorphic(regular_representation(c6a), regular_representation(c6b)));
  EXPECT_TRUE(is_isomorphic(derived_subgroup(sl23_group()), quaternion_group(8)));
  EXPECT_FALSE(is_isomorphic(cyclic_group(4), elementary_abelian(2, 2)));
  EXPECT_FALSE(is_isomorphic(symmetric_group(3), cyclic_group(6)));
}

TEST(Isomorphism, WitnessIsBijective) {
  const std::vector<std::pair<PermGroup, PermGroup>> pairs{
      {symmetric_group(4), regular_representation(symmetric_group(4))},
      {heisenberg_group(3), extraspecial_group(3)},
      {dihedral_group(12), direct_product({symmetric_group(3), cyclic_group(2)})},
      {sl23_group(), regular_representation(sl23_group())},
      {alternating_group(5), regular_representation(alternating_group(5))}};
  for (const auto& [g, h] : pairs) {
    auto w = find_isomorphism(g, h);
    ASSERT_TRUE(w.has_value());
    EXPECT_TRUE(w->is_injective());
    EXPECT_TRUE(w->is_surjective());
  }
}

TEST(Isomorphism, HardNonIsomorphicPairs) {
  // same order statistics, different groups
  EXPECT_FALSE(is_isomorphic(heisenberg_group(3), elementary_abelian(3, 3)));
  EXPECT_FALSE(is_isomorphic(direct_product({quaternion_group(8), cyclic_group(2)}),
                             construct("semidirect(cyclic(4),cyclic(4),action=[[g1^-1]])")));
  EXPECT_FALSE(is_isomorphic(direct_product({heisenberg_group(3), cyclic_group(3)}),
                             direct_product({extraspecial_group(3, 9), cyclic_group(3)})));
}

TEST(Isomorphism, WorkerCountDoesNotChangeWitness) {
  Limits one, four;
  four.workers = 4;
  PermGroup g = symmetric_group(4), h = regular_representation(symmetric_group(4));
  auto a = find_isomorphism(g, h, one), b = find_isomorphism(g, h, four);
  ASSERT_TRUE(a && b);
  EXPECT_EQ(a->images(), b->images());
}

TEST(Isomorphism, Gate) {
  Limits l;
  l.table_threshold = 50;
  EXPECT_THROW(is_isomorphic(symmetric_group(5), regular_representation(symmetric_group(5)), l), SizeGateExceeded);
  // abelian groups are compared by invariants, without the gate
  EXPECT_TRUE(is_isomorphic(abelian_group({4, 25, 3}), cyclic_group(300), l));
}

TEST(Automorphisms, Examples) {
  PermGroup g = extraspecial_group(3, 9);
  AutGroup a = automorphism_group(g);
  EXPECT_EQ(ord(a.carrier), 54u);
  EXPECT_EQ(ord(derived_subgroup(a.carrier)), 27u);

  AutGroup v = automorphism_group(elementary_abelian(2, 2));
  EXPECT_EQ(ord(v.carrier), 6u);
  EXPECT_TRUE(is_isomorphic(v.carrier, symmetric_group(3)));

  EXPECT_EQ(ord(automorphism_group(quaternion_group(8)).carrier), 24u);
}

TEST(Automorphisms, CountsMatchBruteForce) {
  for (const auto& g : {quaternion_group(8), dihedral_group(8), symmetric_group(3), dihedral_group(10), modular_group(4),
                        quaternion_group(16), extraspecial_group(3, 9), heisenberg_group(3)}) {
    EXPECT_EQ(ord(automorphism_group(g).carrier), brute_aut_count(g));
  }
}

TEST(Automorphisms, InnerIsNormalQuotientByCentre) {
  for (const auto& g : {symmetric_group(4), sl23_group(), dihedral_group(16), heisenberg_group(3), abelian_group({2, 4})}) {
    AutGroup a = automorphism_group(g);
    EXPECT_TRUE(a.carrier.contains(a.inner));
    EXPECT_TRUE(is_normal(a.carrier, a.inner));
    EXPECT_EQ(a.inner.order() * centre(g).order(), g.order());
    EXPECT_EQ(a.carrier.order() % a.inner.order(), 0);
  }
}

TEST(Automorphisms, ToHomomorphismIsAutomorphism) {
  PermGroup g = sl23_group();
  AutGroup a = automorphism_group(g);
  for (const auto& x : a.carrier.generators()) {
    Homomorphism h = a.to_homomorphism(g, x);
    EXPECT_TRUE(h.is_injective());
    EXPECT_TRUE(h.is_surjective());
  }
}

TEST(Automorphisms, DeterministicAcrossWorkers) {
  Limits one, three;
  three.workers = 3;
  PermGroup g = direct_product({dihedral_group(8), cyclic_group(2)});
  EXPECT_EQ(automorphism_group(g, one).carrier.generators(), automorphism_group(g, three).carrier.generators());
}

TEST(Automorphisms, Gate) {
  Limits l;
  l.aut_gate = 100;
  EXPECT_THROW(automorphism_group(symmetric_group(5), l), SizeGateExceeded);
}

TEST(NecessaryCondition, Examples) {
  EXPECT_EQ(necessary_condition(dihedral_group(8)), NecessaryCondition::fails);
  EXPECT_EQ(necessary_condition(extraspecial_group(3, 9)), NecessaryCondition::holds);
  EXPECT_EQ(necessary_condition(abelian_group({2, 6})), NecessaryCondition::holds);
  EXPECT_EQ(necessary_condition(quaternion_group(8)), NecessaryCondition::holds);
  EXPECT_STREQ(to_string(NecessaryCondition::fails), "fails");
}

TEST(EickTest, Examples) {
  EXPECT_TRUE(eick_test(elementary_abelian(2, 2)));
  EXPECT_FALSE(eick_test(symmetric_group(3)));
  // Inn(Q8) = V4 while Aut(Q8) = S4 has trivial Frattini subgroup
  EXPECT_FALSE(eick_test(quaternion_group(8)));
  EXPECT_TRUE(frattini(automorphism_group(quaternion_group(8)).carrier).is_trivial());
}

TEST(InnIntegral, Examples) {
  PermGroup q8 = derived_subgroup(sl23_group());
  Quotient r = inn_integral(q8, sl23_group());
  EXPECT_EQ(ord(r.group), 12u);
  EXPECT_TRUE(is_isomorphic(derived_subgroup(r.group), elementary_abelian(2, 2)));

  PermGroup s3 = symmetric_group(3);
  EXPECT_TRUE(derived_subgroup(inn_integral(derived_subgroup(s3), s3).group).is_trivial());

  PermGroup s4 = symmetric_group(4);
  Quotient t = inn_integral(derived_subgroup(s4), s4);
  EXPECT_TRUE(is_isomorphic(t.group, s4));
  EXPECT_TRUE(is_isomorphic(derived_subgroup(t.group), alternating_group(4)));

  EXPECT_THROW(inn_integral(cyclic_group(3), symmetric_group(4)), PreconditionError);
}

TEST(Fingerprint, EqualForIsomorphic) {
  EXPECT_EQ(fingerprint(symmetric_group(4)), fingerprint(regular_representation(symmetric_group(4))));
  EXPECT_FALSE(fingerprint(quaternion_group(8)) == fingerprint(dihedral_group(8)));
  Fingerprint f = fingerprint(sl23_group());
  EXPECT_EQ(f.order, 24u);
  EXPECT_EQ(f.centre_order, 2u);
  EXPECT_EQ(f.derived_order, 8u);
  EXPECT_EQ(f.exponent, 12u);
}
