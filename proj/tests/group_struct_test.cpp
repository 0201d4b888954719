#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "integrals/abelian.hpp"
#include "integrals/constructors.hpp"
#include "integrals/iso_aut.hpp"
#include "integrals/lattice.hpp"
#include "integrals/structure.hpp"
#include "oracle.hpp"

using namespace integrals;

namespace {

oracle::Perm raw(const Permutation& p) { return {p.images().begin(), p.images().end()}; }

std::set<oracle::Perm> raw_set(const PermGroup& g) {
  std::set<oracle::Perm> s;
  for (const auto& x : g.elements()) s.insert(raw(x));
  return s;
}

std::uint64_t ord(const PermGroup& g) { return g.small_order(); }

}  // namespace

TEST(Derived, MatchesBruteForce) {
  for (const auto& g : {symmetric_group(4), alternating_group(4), sl23_group(), dihedral_group(8), quaternion_group(8),
                        heisenberg_group(3), symmetric_group(3)}) {
    EXPECT_EQ(raw_set(derived_subgroup(g)), oracle::derived(raw_set(g)));
  }
}

TEST(Derived, Examples) {
  EXPECT_TRUE(is_isomorphic(derived_subgroup(sl23_group()), quaternion_group(8)));
  EXPECT_TRUE(derived_subgroup(abelian_group({2, 4, 6})).is_trivial());
  EXPECT_EQ(ord(derived_subgroup(symmetric_group(4))), 12u);
  EXPECT_TRUE(is_isomorphic(derived_subgroup(symmetric_group(4)), alternating_group(4)));
  EXPECT_TRUE(is_isomorphic(derived_subgroup(alternating_group(4)), elementary_abelian(2, 2)));
}

TEST(Derived, NormalWithAbelianQuotient) {
  for (const auto& g : {symmetric_group(5), sl23_group(), modular_group(5), wreath_product(cyclic_group(3), cyclic_group(2))}) {
    PermGroup d = derived_subgroup(g);
    EXPECT_TRUE(is_normal(g, d));
    EXPECT_TRUE(quotient(g, d).group.is_abelian());
  }
}

TEST(Centre, Examples) {
  EXPECT_EQ(ord(centre(quaternion_group(8))), 2u);
  EXPECT_TRUE(centre(symmetric_group(3)).is_trivial());
  for (std::uint64_t n : {4u, 5u}) {
    PermGroup z = centre(modular_group(n));
    EXPECT_EQ(ord(z), 1u << (n - 2));
    EXPECT_EQ(abelian_invariants(z).rank(), 1u);
  }
}

TEST(Centre, BothPathsAgreeWithOracle) {
  for (const auto& g : {quaternion_group(16), sl23_group(), heisenberg_group(4), modular_group(5), dihedral_group(12),
                        direct_product({sl23_group(), cyclic_group(5)}), symmetric_group(4),
                        wreath_product(cyclic_group(2), cyclic_group(4))}) {
    auto want = oracle::centre(raw_set(g));
    EXPECT_EQ(raw_set(centre_by_elements(g)), want);
    EXPECT_EQ(raw_set(centre_by_backtrack(g)), want);
  }
}

TEST(Centre, BacktrackAboveEnumerationThreshold) {
  Limits l;
  l.enumeration_threshold = 100;
  PermGroup g = direct_product({symmetric_group(5), cyclic_group(4)});
  EXPECT_EQ(ord(centre(g, l)), 4u);
  EXPECT_THROW(centre_by_elements(g, l), SizeGateExceeded);
}

TEST(Quotient, Examples) {
  PermGroup q8 = quaternion_group(8);
  auto q = quotient(q8, centre(q8));
  EXPECT_TRUE(is_isomorphic(q.group, elementary_abelian(2, 2)));
  EXPECT_EQ(ord(q.projection.kernel()), 2u);

  PermGroup sl = sl23_group(), c5 = cyclic_group(5);
  PermGroup g = direct_product({sl, c5});
  // the C5 factor is generated by the last generator
  PermGroup n = subgroup(g, {g.generators().back()});
  ASSERT_EQ(ord(n), 5u);
  auto r = quotient(g, n);
  EXPECT_TRUE(is_isomorphic(r.group, sl));

  auto t = quotient(g, g);
  EXPECT_TRUE(t.group.is_trivial());
}

TEST(Quotient, KernelIsExactlyN) {
  PermGroup s4 = symmetric_group(4);
  PermGroup v4 = derived_subgroup(alternating_group(4));
  auto q = quotient(s4, v4);
  EXPECT_EQ(ord(q.group), 6u);
  EXPECT_EQ(raw_set(q.projection.kernel()), raw_set(v4));
  EXPECT_EQ(q.projection.kernel().order() * q.projection.image().order(), s4.order());
}

TEST(Quotient, RejectsNonNormal) {
  PermGroup s3 = symmetric_group(3);
  PermGroup h = subgroup(s3, {Permutation::from_cycles(3, {{0, 1}})});
  EXPECT_THROW(quotient(s3, h), PreconditionError);
}

TEST(Quotient, CosetBudget) {
  Limits l;
  l.coset_budget = 10;
  PermGroup s5 = symmetric_group(5);
  EXPECT_THROW(quotient(s5, PermGroup::trivial(5), l), SizeGateExceeded);
}

TEST(AbelianInvariants, Examples) {
  AbelianType t = abelian_invariants(abelian_group({4, 2, 4}));
  EXPECT_EQ(t.factors, (std::vector<std::uint64_t>{2, 4, 4}));
  EXPECT_EQ(t.rank(), 3u);
  EXPECT_TRUE(abelian_invariants(PermGroup::trivial(3)).factors.empty());
  EXPECT_EQ(abelian_invariants(PermGroup::trivial(3)).rank(), 0u);

  PermGroup w = wreath_product(cyclic_group(2), regular_representation(elementary_abelian(2, 2)));
  EXPECT_EQ(abelian_invariants(derived_subgroup(w)).factors, (std::vector<std::uint64_t>{2, 2, 2}));
  EXPECT_THROW(abelian_invariants(symmetric_group(3)), PreconditionError);
}

TEST(AbelianInvariants, RebuildsIsomorphicGroup) {
  std::mt19937_64 rng(7);
  const std::vector<std::uint64_t> pool{2, 3, 4, 5, 6, 8, 9, 12};
  for (int i = 0; i < 40; ++i) {
    std::vector<std::uint64_t> fs;
    std::uint64_t n = 1;
    while (true) {
      std::uint64_t d = pool[rng() % pool.size()];
      if (n * d > 256) break;
      fs.push_back(d);
      n *= d;
    }
    PermGroup a = abelian_group(fs);
    AbelianType t = abelian_invariants(a);
    EXPECT_EQ(t.order(), a.order());
    for (std::size_t k = 1; k < t.factors.size(); ++k) EXPECT_EQ(t.factors[k] % t.factors[k - 1], 0u);
    EXPECT_TRUE(is_isomorphic(abelian_from_type(t), a)) << t.to_string();
  }
}

TEST(Series, Examples) {
  PermGroup h3 = heisenberg_group(3);
  EXPECT_EQ(exponent(h3), 3u);
  EXPECT_EQ(nilpotency_class(h3), std::optional<std::size_t>(2));
  EXPECT_FALSE(nilpotency_class(symmetric_group(3)).has_value());
  EXPECT_EQ(nilpotency_class(heisenberg_group(4)), std::optional<std::size_t>(2));
  EXPECT_EQ(nilpotency_class(cyclic_group(7)), std::optional<std::size_t>(1));
  EXPECT_EQ(nilpotency_class(PermGroup::trivial(2)), std::optional<std::size_t>(0));
  EXPECT_EQ(nilpotency_class(dihedral_group(16)), std::optional<std::size_t>(3));

  auto ds = derived_series(symmetric_group(4));
  std::vector<std::uint64_t> orders;
  for (const auto& g : ds) orders.push_back(ord(g));
  EXPECT_EQ(orders, (std::vector<std::uint64_t>{24, 12, 4, 1}));
  EXPECT_FALSE(is_solvable(symmetric_group(5)));
}

TEST(Series, ClassTwoIffDerivedCentralNontrivial) {
  for (const auto& g : {heisenberg_group(3), heisenberg_group(4), quaternion_group(8), dihedral_group(16),
                        modular_group(4), sl23_group(), extraspecial_group(3, 9)}) {
    PermGroup d = derived_subgroup(g);
    bool class2 = !d.is_trivial() && centre(g).contains(d);
    EXPECT_EQ(class2, nilpotency_class(g) == std::optional<std::size_t>(2));
  }
}

TEST(Series, ConjugacyClassesPartitionGroup) {
  PermGroup s4 = symmetric_group(4);
  auto cl = conjugacy_classes(s4);
  std::multiset<std::uint64_t> sizes;
  std::uint64_t total = 0;
  for (const auto& c : cl) {
    sizes.insert(c.size);
    total += c.size;
  }
  EXPECT_EQ(total, 24u);
  EXPECT_EQ(sizes, (std::multiset<std::uint64_t>{1, 3, 6, 6, 8}));
}

TEST(Frattini, Examples) {
  PermGroup q8 = quaternion_group(8);
  PermGroup f = frattini(q8);
  EXPECT_EQ(ord(f), 2u);
  EXPECT_EQ(raw_set(f), raw_set(centre(q8)));
  EXPECT_TRUE(frattini(elementary_abelian(2, 2)).is_trivial());
  EXPECT_EQ(ord(frattini(cyclic_group(8))), 4u);
  EXPECT_TRUE(frattini(symmetric_group(4)).is_trivial());
  EXPECT_EQ(ord(frattini(dihedral_group(16))), 4u);
}

TEST(Frattini, Gate) {
  Limits l;
  l.lattice_gate = 100;
  EXPECT_THROW(frattini(symmetric_group(5), l), SizeGateExceeded);
}

namespace {

// Automorphism of C2^k (elementary_abelian(2,k), generator i a transposition)
// given by the columns of a GF(2) matrix.
Homomorphism matrix_action(const PermGroup& a, const std::vector<std::uint32_t>& cols) {
  std::vector<Permutation> imgs;
  for (std::uint32_t c : cols) {
    Permutation x = a.identity();
    for (std::size_t j = 0; j < a.generators().size(); ++j)
      if (c >> j & 1) x = x * a.generators()[j];
    imgs.push_back(x);
  }
  return Homomorphism(a, a, imgs);
}

}  // namespace

TEST(Coinvariants, Examples) {
  PermGroup a = elementary_abelian(2, 3);
  EXPECT_TRUE(coinvariants(a, {identity_hom(a)}).is_trivial());

  PermGroup c5 = cyclic_group(5);
  Homomorphism inv(c5, c5, {c5.generators()[0].inverse()});
  EXPECT_EQ(ord(coinvariants(c5, {inv})), 5u);

  PermGroup v = elementary_abelian(2, 2);
  Homomorphism swap = matrix_action(v, {0b10, 0b01});
  PermGroup c = coinvariants(v, {swap});
  EXPECT_EQ(ord(c), 2u);
  // |A/[A,H]| = 2 >= 4^(1/2)
  EXPECT_GE(std::pow(double(ord(v) / ord(c)), 2.0), double(ord(v)));

  EXPECT_THROW(coinvariants(symmetric_group(3), {}), PreconditionError);
}

// For H a 2-group of automorphisms of an elementary abelian 2-group A:
// |A/[A,H]| >= |A|^(1/|H|).
TEST(Coinvariants, TwoGroupActionSweep) {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 200; ++trial) {
    const unsigned k = 1 + static_cast<unsigned>(rng() % 10);
    PermGroup a = elementary_abelian(2, k);
    // random invertible change of basis s (as columns), and its inverse
    std::vector<std::uint32_t> s, sinv;
    while (true) {
      s.clear();
      for (unsigned i = 0; i < k; ++i) s.push_back(static_cast<std::uint32_t>(rng() & ((1u << k) - 1)));
      std::vector<std::uint32_t> m = s, e(k);
      for (unsigned i = 0; i < k; ++i) e[i] = 1u << i;
      bool ok = true;
      for (unsigned col = 0; col < k && ok; ++col) {
        unsigned piv = col;
        while (piv < k && !(m[piv] >> col & 1)) ++piv;
        if (piv == k) {
          ok = false;
          break;
        }
        std::swap(m[piv], m[col]);
        std::swap(e[piv], e[col]);
        for (unsigned r = 0; r < k; ++r)
          if (r != col && (m[r] >> col & 1)) {
            m[r] ^= m[col];
            e[r] ^= e[col];
          }
      }
      if (!ok) continue;
      // m = I now; e holds, as column-combination records, the inverse
      sinv = e;
      break;
    }
    auto apply = [&](const std::vector<std::uint32_t>& cols, std::uint32_t v) {
      std::uint32_t r = 0;
      for (unsigned j = 0; j < k; ++j)
        if (v >> j & 1) r ^= cols[j];
      return r;
    };
    // a few random unitriangular matrices, conjugated by s
    std::vector<Homomorphism> action;
    std::vector<std::vector<std::uint32_t>> mats;
    const int ngens = 1 + static_cast<int>(rng() % 3);
    for (int g = 0; g < ngens; ++g) {
      std::vector<std::uint32_t> u(k);
      for (unsigned j = 0; j < k; ++j) u[j] = (1u << j) | (static_cast<std::uint32_t>(rng()) & ((1u << j) - 1));
      std::vector<std::uint32_t> conj(k);
      for (unsigned j = 0; j < k; ++j) conj[j] = apply(s, apply(u, apply(sinv, 1u << j)));
      mats.push_back(conj);
      action.push_back(matrix_action(a, conj));
    }
    // sanity: sinv really inverts s
    for (unsigned j = 0; j < k; ++j) ASSERT_EQ(apply(s, apply(sinv, 1u << j)), 1u << j);
    // |H| from the matrix group acting on the 2^k vectors
    std::vector<Permutation> hp;
    for (const auto& m : mats) {
      std::vector<Point> img(std::size_t(1) << k);
      for (std::uint32_t v = 0; v < img.size(); ++v) img[v] = apply(m, v);
      hp.emplace_back(std::move(img));
    }
    const BigInt h = PermGroup(std::size_t(1) << k, hp).order();
    ASSERT_EQ(h & (h - 1), 0) << "H must be a 2-group";
    const double log_h = double(msb(h));

    PermGroup c = coinvariants(a, action);
    const double log_quot = double(k) - std::log2(double(ord(c)));
    // log|A/[A,H]| >= log|A| / |H|
    EXPECT_GE(log_quot + 1e-9, double(k) / std::pow(2.0, log_h)) << "k=" << k;
  }
}
