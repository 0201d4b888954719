#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "integrals/catalog.hpp"
#include "integrals/structure.hpp"
#include "table_oracle.hpp"

using namespace integrals;

namespace {

// Published numbers of groups of order n (the small-groups counts).
const std::map<std::uint64_t, std::size_t> known_counts{
    {1, 1},   {2, 1},   {3, 1},  {4, 2},  {5, 1},  {6, 2},  {7, 1},  {8, 5},   {9, 2},  {10, 2}, {11, 1},
    {12, 5},  {13, 1},  {14, 2}, {15, 1}, {16, 14}, {17, 1}, {18, 5}, {19, 1},  {20, 5}, {21, 2}, {22, 2},
    {23, 1},  {24, 15}, {25, 2}, {26, 2}, {27, 5},  {28, 4}, {29, 1}, {30, 4},  {31, 1}, {32, 51}, {33, 1},
    {34, 2},  {35, 1},  {36, 14}, {37, 1}, {38, 2}, {39, 2}, {40, 14}, {41, 1}, {42, 6}, {43, 1}, {44, 4},
    {45, 2},  {46, 2},  {47, 1}, {48, 52}, {49, 2}, {50, 5}, {51, 1}, {52, 5},  {53, 1}, {54, 15}, {55, 2},
    {56, 13}, {57, 2},  {58, 2}, {59, 1}, {60, 13}, {61, 1}, {62, 2}, {63, 4},  {64, 267}};

// One store for the whole binary, backed by the cache directory when the
// environment names one.
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

bool is_two_power(std::uint64_t n) { return n && !(n & (n - 1)); }

std::filesystem::path temp_file(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / "integrals-small-enum-test";
  std::filesystem::create_directories(d);
  return d / name;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

void write_file(const std::filesystem::path& p, const std::string& s) {
  std::ofstream f(p, std::ios::binary);
  f << s;
}

}  // namespace

TEST(TableOracle, GroupsOfOrderEightAreDistinct) {
  auto qs = oracle::groups_of_order_8();
  ASSERT_EQ(qs.size(), 5u);
  for (const auto& q : qs) EXPECT_EQ(q.n, 8u);
  for (std::size_t i = 0; i < qs.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) EXPECT_FALSE(oracle::isomorphic(qs[i], qs[j]));
}

TEST(Enumerate, OrderSixteenMatchesCocycleOracle) {
  auto oracle16 = oracle::central_extensions(oracle::groups_of_order_8(), 2);
  EXPECT_EQ(oracle16.size(), 14u);
  const Catalog& c = store().get(16);
  ASSERT_EQ(c.entries.size(), oracle16.size());
  // each catalog entry matches exactly one oracle group
  std::vector<int> hits(oracle16.size(), 0);
  for (const auto& g : c.entries) {
    auto t = table_of(g);
    oracle::Table ot;
    ot.n = t->size();
    ot.mul.resize(ot.n * ot.n);
    for (std::uint32_t a = 0; a < ot.n; ++a)
      for (std::uint32_t b = 0; b < ot.n; ++b) ot.mul[a * ot.n + b] = t->mul(a, b);
    int matches = 0;
    for (std::size_t k = 0; k < oracle16.size(); ++k)
      if (oracle::isomorphic(ot, oracle16[k])) {
        ++matches;
        ++hits[k];
      }
    EXPECT_EQ(matches, 1);
  }
  for (int h : hits) EXPECT_EQ(h, 1);
}

TEST(Enumerate, SmallOrdersMatchPublishedCounts) {
  for (std::uint64_t n = 1; n <= 32; ++n) EXPECT_EQ(store().get(n).entries.size(), known_counts.at(n)) << "n=" << n;
  EXPECT_EQ(store().get(60).entries.size(), 13u);
  EXPECT_EQ(store().get(27).entries.size(), 5u);
}

TEST(Enumerate, OrderSixtyFour) { EXPECT_EQ(store().get(64).entries.size(), 267u); }

TEST(Enumerate, AllOrdersUpToSixtyFour) {
  for (std::uint64_t n = 33; n <= 64; ++n) EXPECT_EQ(store().get(n).entries.size(), known_counts.at(n)) << "n=" << n;
}

TEST(Enumerate, OrderEightyOneAboveDefaultBound) {
  EXPECT_EQ(store().get(81).entries.size(), 15u);
  CatalogStore low;  // default bound 64, no disk
  EXPECT_THROW(low.get(81), SizeGateExceeded);
}

TEST(Enumerate, EntriesHaveOrderNAndDistinctClasses) {
  for (std::uint64_t n : {12u, 16u, 24u, 32u, 60u}) {
    const Catalog& c = store().get(n);
    ASSERT_EQ(c.fingerprints.size(), c.entries.size());
    for (std::size_t i = 0; i < c.entries.size(); ++i) {
      EXPECT_EQ(c.entries[i].order(), BigInt(n));
      for (std::size_t j = 0; j < i; ++j)
        if (c.fingerprints[i] == c.fingerprints[j]) EXPECT_FALSE(is_isomorphic(c.entries[i], c.entries[j]));
    }
    EXPECT_TRUE(std::is_sorted(c.fingerprints.begin(), c.fingerprints.end()));
  }
}

TEST(Enumerate, Deterministic) {
  CatalogStore a, b(Limits{}, std::nullopt);
  Limits three;
  three.workers = 3;
  CatalogStore c(three);
  const std::string sa = serialize_catalog(a.get(24));
  EXPECT_EQ(sa, serialize_catalog(b.get(24)));
  EXPECT_EQ(sa, serialize_catalog(c.get(24)));
}

TEST(Enumerate, DerivedSubgroupsAppearInSmallerCatalogs) {
  for (std::uint64_t n = 1; n <= 64; ++n) {
    for (const auto& g : store().get(n).entries) {
      PermGroup d = derived_subgroup(g);
      const Catalog& cd = store().get(d.small_order());
      bool found = false;
      for (const auto& e : cd.entries)
        if (is_isomorphic(e, d)) {
          found = true;
          break;
        }
      EXPECT_TRUE(found) << "n=" << n;
    }
  }
}

TEST(Enumerate, IsomorphismIsAnEquivalenceOnSamples) {
  std::mt19937_64 rng(3);
  const Catalog& c = store().get(32);
  for (int k = 0; k < 20; ++k) {
    const PermGroup& g = c.entries[rng() % c.entries.size()];
    // relabel the points at random
    std::vector<Point> img(g.degree());
    std::iota(img.begin(), img.end(), 0u);
    std::shuffle(img.begin(), img.end(), rng);
    Permutation s(img);
    std::vector<Permutation> gens;
    for (const auto& x : g.generators()) gens.push_back(s.inverse() * x * s);
    PermGroup h(g.degree(), gens);
    PermGroup r = regular_representation(h);
    EXPECT_TRUE(is_isomorphic(g, g));
    EXPECT_TRUE(is_isomorphic(g, h));
    EXPECT_TRUE(is_isomorphic(h, g));
    EXPECT_TRUE(is_isomorphic(h, r));
    EXPECT_TRUE(is_isomorphic(g, r));
  }
}

TEST(Enumerate, InnerAutomorphismsNormalInAut) {
  for (std::uint64_t n : {8u, 12u, 16u, 18u, 24u}) {
    for (const auto& g : store().get(n).entries) {
      AutGroup a = automorphism_group(g);
      EXPECT_TRUE(is_normal(a.carrier, a.inner));
      EXPECT_EQ(a.inner.order() * centre(g).order(), g.order());
    }
  }
}

// A 2-group H with H' nonabelian never has Z(H') cyclic, nor |H':H''| = 4.
TEST(Sweep, BurnsideTwoGroups) {
  for (std::uint64_t n = 1; n <= 64; n *= 2)
    for (const auto& h : store().get(n).entries) {
      PermGroup d = derived_subgroup(h);
      if (d.is_abelian()) continue;
      PermGroup z = centre(d);
      EXPECT_GT(abelian_invariants(z).rank(), 1u) << "n=" << n;
      EXPECT_NE(d.order() / derived_subgroup(d).order(), 4) << "n=" << n;
    }
}

// A 2-group G with A = G' elementary abelian and H = G/A satisfies
// |H| log^2 |H| >= 2 log |A| (base 2).
TEST(Sweep, ElementaryAbelianDerivedBound) {
  std::size_t checked = 0;
  for (std::uint64_t n = 1; n <= 64; n *= 2)
    for (const auto& g : store().get(n).entries) {
      PermGroup a = derived_subgroup(g);
      if (a.is_trivial() || exponent(a) != 2) continue;
      const double la = std::log2(a.small_order());
      const double h = double(g.small_order() / a.small_order()), lh = std::log2(h);
      EXPECT_GE(h * lh * lh, 2 * la) << "n=" << n;
      ++checked;
    }
  EXPECT_GT(checked, 50u);
}

TEST(CatalogFile, RoundTripIsBitExact) {
  const Catalog& c = store().get(16);
  auto path = temp_file("order-16.catalog");
  save_catalog(c, path);
  const std::string text = read_file(path);
  EXPECT_EQ(text.rfind("catalog order=16 count=14 method=cyclic-ext v1\n", 0), 0u);
  auto r = load_catalog(path);
  EXPECT_TRUE(r.warnings.empty());
  EXPECT_EQ(r.catalog.fingerprints, c.fingerprints);
  EXPECT_EQ(serialize_catalog(r.catalog), text);
}

TEST(CatalogFile, CorruptionIsDetected) {
  const std::string text = serialize_catalog(store().get(12));
  auto path = temp_file("bad.catalog");
  write_file(path, text.substr(0, text.size() / 2));
  EXPECT_THROW(load_catalog(path), Error);
  std::string flipped = text;
  flipped[text.size() / 2] = flipped[text.size() / 2] == '1' ? '2' : '1';
  write_file(path, flipped);
  EXPECT_THROW(load_catalog(path), Error);
  EXPECT_THROW(parse_catalog(""), Error);
}

TEST(CatalogFile, VersionMismatch) {
  std::string text = serialize_catalog(store().get(6));
  std::string body = text.substr(0, text.rfind('\n', text.size() - 2) + 1);
  body.replace(body.find(" v1\n"), 4, " v2\n");
  try {
    parse_catalog(body + integrals::detail::crc32_hex(body) + "\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("version"), std::string::npos);
  }
}

TEST(CatalogFile, RaisedBoundCatalogLoadsWithWarning) {
  auto path = temp_file("order-27.catalog");
  save_catalog(store().get(27), path);
  Limits low;
  low.catalog_bound = 16;
  auto r = load_catalog(path, low);
  EXPECT_EQ(r.catalog.entries.size(), 5u);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("exceeds"), std::string::npos);
}

TEST(CatalogFile, StoreUsesDiskCache) {
  auto dir = std::filesystem::temp_directory_path() / "integrals-small-enum-cache";
  std::filesystem::remove_all(dir);
  {
    CatalogStore s(Limits{}, dir);
    EXPECT_EQ(s.get(12).entries.size(), 5u);
  }
  EXPECT_TRUE(std::filesystem::exists(dir / "order-12.catalog"));
  EXPECT_TRUE(std::filesystem::exists(dir / "order-6.catalog"));
  CatalogStore again(Limits{}, dir);
  EXPECT_EQ(serialize_catalog(again.get(12)), read_file(dir / "order-12.catalog"));
}
