#include <gtest/gtest.h>

#include "integrals/towers.hpp"

using namespace integrals;

namespace {

CatalogStore& store() {
  static CatalogStore s = [] {
    std::optional<std::filesystem::path> dir;
    if (const char* e = std::getenv(cache_dir_env); e && *e) dir = e;
    return CatalogStore(Limits{}, dir);
  }();
  return s;
}

PermGroup cyclic_product(const std::vector<std::uint64_t>& ps) {
  std::vector<PermGroup> fs;
  for (auto p : ps) fs.push_back(cyclic_group(p));
  return direct_product(fs);
}

const std::vector<std::uint64_t> primes2{3, 5, 7};
const std::vector<std::uint64_t> primes3{11, 13, 17, 19, 23, 29, 31};

}  // namespace

TEST(InverseSystem, ProductTowerIsCoherent) {
  InverseSystem s = product_tower({symmetric_group(3), symmetric_group(3), symmetric_group(3)});
  EXPECT_EQ(s.size(), 3u);
  EXPECT_EQ(s.level(3).order(), 216);
  for (const auto& x : s.level(3).generators()) {
    Permutation y = s.project(x, 3, 1);
    EXPECT_EQ(y, s.down(1).apply(s.down(2).apply(x)));
    EXPECT_TRUE(s.level(1).contains(y));
  }
}

TEST(InverseSystem, IncoherentExtraMapRejected) {
  InverseSystem s = product_tower({symmetric_group(3), symmetric_group(3), symmetric_group(3)});
  // a 3 -> 1 map that swaps the roles of the factors
  std::vector<Permutation> imgs;
  for (const auto& x : s.level(3).generators()) {
    std::vector<Point> im(3);
    for (Point p = 0; p < 3; ++p) im[p] = x[3 + p] - 3;
    imgs.emplace_back(im);
  }
  Homomorphism wrong(s.level(3), s.level(1), imgs);
  std::map<std::pair<std::size_t, std::size_t>, Homomorphism> extra;
  extra.emplace(std::pair{3u, 1u}, wrong);
  std::vector<Homomorphism> down{s.down(1), s.down(2)};
  EXPECT_THROW(InverseSystem(s.levels(), down, extra), PreconditionError);
  // the composite itself is accepted
  std::vector<Permutation> good;
  for (const auto& x : s.level(3).generators()) good.push_back(s.project(x, 3, 1));
  std::map<std::pair<std::size_t, std::size_t>, Homomorphism> ok;
  ok.emplace(std::pair{3u, 1u}, Homomorphism(s.level(3), s.level(1), good));
  EXPECT_NO_THROW(InverseSystem(s.levels(), down, ok));
}

TEST(InverseSystem, NonSurjectiveMapRejected) {
  PermGroup c6 = cyclic_group(6), s3 = symmetric_group(3);
  // C6 -> S3 onto the 3-cycles only
  Homomorphism h(c6, s3, {Permutation::from_cycles(3, {{0, 1, 2}})});
  EXPECT_THROW(InverseSystem({s3, c6}, {h}), PreconditionError);
  EXPECT_THROW(product_tower(std::vector<PermGroup>(5, cyclic_group(2))), SizeGateExceeded);
}

TEST(Levelwise, CyclicInsideSymmetricPowers) {
  InverseSystem g = product_tower({cyclic_group(3), cyclic_group(3), cyclic_group(3)});
  InverseSystem k = product_tower({symmetric_group(3), symmetric_group(3), symmetric_group(3)});
  LevelwiseReport r = levelwise_integral_report(g, k);
  EXPECT_TRUE(r.holds);
  for (const auto& l : r.levels) {
    EXPECT_TRUE(l.derived_isomorphic);
    EXPECT_TRUE(l.square_commutes);
  }
}

TEST(Levelwise, RegularLevelsNeedCompatibleChoices) {
  // G-levels in a different permutation representation from K'
  PermGroup c3 = regular_representation(cyclic_group(3));
  InverseSystem g = product_tower({c3, c3});
  InverseSystem k = product_tower({symmetric_group(3), symmetric_group(3)});
  LevelwiseReport r = levelwise_integral_report(g, k);
  EXPECT_TRUE(r.holds);
  ASSERT_TRUE(r.levels[1].tau);
  // the square commutes on generators
  const Homomorphism& t1 = *r.levels[0].tau;
  const Homomorphism& t2 = *r.levels[1].tau;
  for (const auto& x : g.level(2).generators())
    EXPECT_EQ(k.down(1).apply(t2.apply(x)), t1.apply(g.down(1).apply(x)));
}

TEST(Levelwise, MinimalIntegralTower) {
  PermGroup h2 = hn_minimal_integral(2, primes2);
  PermGroup h3 = hn_minimal_integral(3, primes3);
  InverseSystem k = product_tower({h2, h3});
  InverseSystem g = product_tower({cyclic_product(primes2), cyclic_product(primes3)});
  EXPECT_TRUE(levelwise_integral_check(g, k));
  EXPECT_EQ(derived_subgroup(k.level(2)).order(), g.level(2).order());
}

TEST(Levelwise, LargeLevelsUseTheIdentityOnly) {
  // A5^4 has order 60^4 > 10^6; K' = K, so the identity matches every level
  InverseSystem k = product_tower(std::vector<PermGroup>(4, alternating_group(5)));
  LevelwiseReport same = levelwise_integral_report(k, k);
  EXPECT_TRUE(same.holds);
  // the top G-level with its last block moved to fresh points 20..24
  auto moved = [](const Permutation& x) {
    std::vector<Point> im(25);
    for (Point p = 0; p < 25; ++p) {
      if (p >= 15 && p < 20) {
        im[p] = p;
        continue;
      }
      const Point y = x[p < 15 ? p : p - 5];
      im[p] = y < 15 ? y : y + 5;
    }
    return Permutation(std::move(im));
  };
  std::vector<Permutation> gens, imgs;
  for (const auto& x : k.level(4).generators()) {
    gens.push_back(moved(x));
    imgs.push_back(k.down(3).apply(x));
  }
  PermGroup top(25, gens);
  std::vector<PermGroup> levels{k.level(1), k.level(2), k.level(3), top};
  InverseSystem g(levels, {k.down(1), k.down(2), Homomorphism(top, k.level(3), imgs)});
  LevelwiseReport r = levelwise_integral_report(g, k);
  EXPECT_FALSE(r.holds);
  EXPECT_TRUE(r.levels[2].square_commutes);
  EXPECT_NE(r.levels[3].note.find("only the identity map was tried"), std::string::npos);
}

TEST(Levelwise, MismatchedLevels) {
  InverseSystem g = product_tower({cyclic_group(3), cyclic_group(3)});
  InverseSystem k = product_tower({dihedral_group(8), dihedral_group(8)});
  LevelwiseReport r = levelwise_integral_report(g, k);
  EXPECT_FALSE(r.holds);
  EXPECT_FALSE(r.levels[0].derived_isomorphic);
  InverseSystem shorter = product_tower({symmetric_group(3)});
  EXPECT_THROW(levelwise_integral_check(g, shorter), PreconditionError);
}

TEST(MinimalIntegral, SecondExample) {
  PermGroup h = hn_minimal_integral(2, primes2);
  EXPECT_EQ(h.order(), 420);
  PermGroup a = derived_subgroup(h);
  EXPECT_EQ(a.order(), 105);
  EXPECT_TRUE(is_isomorphic(a, cyclic_product(primes2)));
  auto rs = intermediate_subgroups(h, a);
  ASSERT_EQ(rs.size(), 3u);
  for (const auto& r : rs) {
    EXPECT_EQ(r.group.order(), 210);
    EXPECT_LT(r.derived_order, a.order());
  }
  EXPECT_TRUE(is_minimal_integral(h, a));
  // S3 x C2 is an integral of C3 but S3 inside it already is one
  PermGroup s3c2 = direct_product({symmetric_group(3), cyclic_group(2)});
  EXPECT_FALSE(is_minimal_integral(s3c2, derived_subgroup(s3c2)));
}

TEST(DihedralObstruction, Instances) {
  PermGroup d8sq = dihedral_power(4, 2);
  EXPECT_TRUE(dihedral_power_obstruction(4, 2, wreath_with_symmetric(dihedral_group(8), 2), d8sq));
  EXPECT_TRUE(dihedral_power_obstruction(4, 2, d8sq, d8sq));
  EXPECT_TRUE(dihedral_power_obstruction(4, 1, dihedral_group(8), dihedral_group(8)));

  PermGroup d12sq = dihedral_power(6, 2);
  PermGroup n6 = normalizer(symmetric_group(6), dihedral_group(12));
  EXPECT_TRUE(n6.contains(dihedral_group(12)));
  EXPECT_TRUE(is_normal(n6, dihedral_group(12)));
  EXPECT_TRUE(dihedral_power_obstruction(6, 2, wreath_with_symmetric(n6, 2), d12sq));
  EXPECT_TRUE(dihedral_power_obstruction(6, 2, wreath_with_symmetric(dihedral_group(12), 2), d12sq));
  EXPECT_TRUE(dihedral_power_obstruction(6, 1, n6, dihedral_group(12)));
  EXPECT_TRUE(dihedral_power_obstruction(3, 2, wreath_with_symmetric(dihedral_group(6), 2), dihedral_power(3, 2)));
  EXPECT_TRUE(dihedral_power_obstruction(4, 3, wreath_with_symmetric(dihedral_group(8), 3), dihedral_power(4, 3)));
}

TEST(DihedralObstruction, RejectsBadEmbeddings) {
  // D8 x D8 is not normal in S8
  EXPECT_THROW(dihedral_power_obstruction(4, 2, symmetric_group(8), dihedral_power(4, 2)), PreconditionError);
  EXPECT_THROW(dihedral_power_obstruction(4, 1, symmetric_group(4), alternating_group(4)), PreconditionError);
}

TEST(DihedralSearch, NoIntegralsFound) {
  IntegralReport d8 = search_no_integral_of_dihedral_power(4, 1, 64, store());
  EXPECT_TRUE(d8.findings.empty());
  EXPECT_EQ(d8.searched, (std::vector<std::uint64_t>{8, 16, 24, 32, 40, 48, 56, 64}));
  IntegralReport d12 = search_no_integral_of_dihedral_power(6, 1, 48, store());
  EXPECT_TRUE(d12.findings.empty());
  IntegralReport sq = search_no_integral_of_dihedral_power(4, 2, 128, store());
  EXPECT_TRUE(sq.findings.empty());
  EXPECT_EQ(sq.searched, (std::vector<std::uint64_t>{64}));
  bool beyond = false;
  for (const auto& n : sq.notes) beyond |= n.find("beyond the catalogs") != std::string::npos;
  EXPECT_TRUE(beyond);
}

TEST(TowerFile, RoundTrip) {
  InverseSystem s = product_tower({symmetric_group(3), cyclic_group(4), dihedral_group(8)});
  const std::string text = format_tower(s);
  EXPECT_EQ(text.rfind("tower levels=3\nlevel 1\npermgroup degree=3\n", 0), 0u);
  InverseSystem t = parse_tower(text);
  EXPECT_EQ(format_tower(t), text);
  for (std::size_t i = 1; i <= 3; ++i) EXPECT_EQ(t.level(i).order(), s.level(i).order());
}

TEST(TowerFile, Errors) {
  try {
    parse_tower("tower levels=2\nlevel 1\npermgroup degree=3\n(1 2)\n\nlevel 2\npermgroup degree=3\n(1 2\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 8u);
  }
  try {
    parse_tower("tower levels=2\nlevel 1\npermgroup degree=2\n(1 2)\n\nlevel 2\npermgroup degree=2\n(1 2)\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("missing map"), std::string::npos);
  }
  EXPECT_THROW(parse_tower("tower levels=9\n"), SizeGateExceeded);
  EXPECT_THROW(parse_tower("levels=1\n"), ParseError);
  // a map that is not a homomorphism
  EXPECT_THROW(parse_tower("tower levels=2\nlevel 1\npermgroup degree=3\n(1 2)\n\nlevel 2\npermgroup degree=3\n(1 2 3)\n\n"
                           "map 2 1\n(1 2)\n"),
               PreconditionError);
}
