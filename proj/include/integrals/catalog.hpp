#pragma once

// Catalogs of all groups of a given order, up to isomorphism.
//
// Solvable groups are found as cyclic extensions: a group E with a normal
// subgroup N of prime index p is determined by α ∈ Aut(N) (conjugation by a
// chosen t ∉ N) and z = t^p ∈ N, subject to α(z) = z and α^p = (x -> z^-1 x z).
// Candidates use α up to Aut(N)-conjugacy and inner automorphisms, with
// every admissible z, and are then deduplicated by isomorphism.
// Nonsolvable groups up to order 120 come from a fixed list.
//
// File format:
//   catalog order=<n> count=<k> method=cyclic-ext v1
//   <group block>
//   ---
//   <group block>
//   <crc32 of all preceding bytes, 8 hex digits>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/crc.hpp>

#include "integrals/constructors.hpp"
#include "integrals/error.hpp"
#include "integrals/group_io.hpp"
#include "integrals/group_table.hpp"
#include "integrals/iso_aut.hpp"
#include "integrals/limits.hpp"
#include "integrals/parallel.hpp"
#include "integrals/perm_group.hpp"

namespace integrals {

/// Orders above this are never enumerated.
inline constexpr std::uint64_t catalog_hard_limit = 128;

struct Catalog {
  std::uint64_t order = 0;
  std::vector<PermGroup> entries;
  std::vector<Fingerprint> fingerprints;
  std::string method = "cyclic-ext";
  int version = 1;
};

namespace detail {

inline PermGroup regular_from_table(const GroupTable& t) {
  if (t.size() == 1) return PermGroup::trivial(1);
  return t.regular_group(t.greedy_generators());
}

/// Multiplication table of <N, t> with t^-1 x t = α(x) and t^p = z, on pairs
/// (i, x) standing for t^i x, indexed i*|N| + x.
inline GroupTable extension_table(const GroupTable& n, const Permutation& alpha, GroupTable::Index z, std::uint64_t p) {
  const std::size_t m = n.size(), size = m * p;
  std::vector<Permutation> apow{Permutation(m)};
  for (std::uint64_t j = 1; j < p; ++j) apow.push_back(apow.back() * alpha);
  std::vector<GroupTable::Index> mul(size * size);
  for (std::uint64_t i = 0; i < p; ++i)
    for (std::size_t x = 0; x < m; ++x)
      for (std::uint64_t j = 0; j < p; ++j)
        for (std::size_t y = 0; y < m; ++y) {
          GroupTable::Index w = n.mul(apow[j][static_cast<Point>(x)], static_cast<GroupTable::Index>(y));
          std::uint64_t k = i + j;
          if (k >= p) {
            k -= p;
            w = n.mul(z, w);
          }
          mul[(i * m + x) * size + j * m + y] = static_cast<GroupTable::Index>(k * m + w);
        }
  return GroupTable::from_cayley(size, std::move(mul));
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    parent[b] = a;  // the smallest index represents the class
  }
};

/// All cyclic extensions of N by C_p, one per admissible (α, z) with α up
/// to Aut(N)-conjugacy and inner automorphisms.
inline std::vector<PermGroup> cyclic_extensions(const PermGroup& nn, std::uint64_t p, const Limits& limits) {
  Limits l = limits;
  l.aut_gate = std::max<std::uint64_t>(l.aut_gate, nn.order().convert_to<std::uint64_t>());
  auto prof = profile_of(nn, l);
  const GroupTable& t = prof->table();
  const std::size_t m = t.size();
  std::vector<PermGroup> out;
  if (m == 1) {
    out.push_back(cyclic_group(p));
    return out;
  }
  AutGroup aut = automorphism_group(nn, l);

  // X = {α : α^p inner}
  std::vector<Permutation> xs;
  std::unordered_map<Permutation, std::size_t, PermutationHash> xi;
  aut.carrier.for_each_element([&](const Permutation& a) {
    if (aut.inner.contains(a.pow(static_cast<std::int64_t>(p)))) {
      xi.emplace(a, xs.size());
      xs.push_back(a);
    }
    return true;
  });
  UnionFind uf(xs.size());
  std::vector<Permutation> moves_conj, moves_inner;
  for (const auto& b : aut.carrier.generators())
    if (!b.is_identity()) moves_conj.push_back(b);
  for (const auto& i : aut.inner.generators())
    if (!i.is_identity()) moves_inner.push_back(i);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    for (const auto& b : moves_conj) uf.unite(k, xi.at(b * xs[k] * b.inverse()));
    for (const auto& i : moves_inner) uf.unite(k, xi.at(xs[k] * i));
  }
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (uf.find(k) != k) continue;
    const Permutation& a = xs[k];
    const Permutation ap = a.pow(static_cast<std::int64_t>(p));
    for (GroupTable::Index z = 0; z < m; ++z) {
      if (a[z] != z) continue;
      bool ok = true;
      for (GroupTable::Index x = 0; x < m && ok; ++x) ok = t.conjugate(x, z) == ap[x];
      if (!ok) continue;
      GroupTable e = extension_table(t, a, z, p);
      PermGroup g = regular_from_table(e);
      if (g.order() != BigInt(m * p)) throw Error("cyclic extension: table is not a group of the expected order");
      out.push_back(std::move(g));
    }
  }
  return out;
}

/// Nonsolvable groups of order <= 120, as permutation groups.
inline std::vector<PermGroup> nonsolvable_groups(std::uint64_t n) {
  std::vector<PermGroup> out;
  if (n == 60) out.push_back(alternating_group(5));
  if (n == 120) {
    out.push_back(symmetric_group(5));
    out.push_back(direct_product({alternating_group(5), cyclic_group(2)}));
    // SL(2,5) acting on the 24 nonzero vectors of F_5^2
    auto idx = [](int u, int v) { return static_cast<Point>(5 * u + v - 1); };
    auto mat = [&](int a, int b, int c, int d) {
      std::vector<Point> img(24);
      for (int u = 0; u < 5; ++u)
        for (int v = 0; v < 5; ++v) {
          if (!u && !v) continue;
          img[idx(u, v)] = idx((a * u + b * v) % 5, (c * u + d * v) % 5);
        }
      return Permutation(std::move(img));
    };
    out.push_back(PermGroup(24, {mat(1, 1, 0, 1), mat(1, 0, 1, 1)}));
  }
  return out;
}

inline std::vector<std::uint64_t> primes_of(std::uint64_t n) {
  std::vector<std::uint64_t> ps;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    ps.push_back(p);
    while (n % p == 0) n /= p;
  }
  if (n > 1) ps.push_back(n);
  return ps;
}

inline std::string crc32_hex(const std::string& s) {
  boost::crc_32_type crc;
  crc.process_bytes(s.data(), s.size());
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08x", crc.checksum());
  return buf;
}

}  // namespace detail

/// Removes isomorphic duplicates. Candidates are bucketed by fingerprint and
/// compared by isomorphism only within a bucket; the result is sorted by
/// fingerprint, ties kept in input order.
inline Catalog dedupe_groups(std::uint64_t n, const std::vector<PermGroup>& cands, const Limits& limits) {
  std::vector<Fingerprint> fps(cands.size());
  parallel_for(cands.size(), limits.workers, [&](std::size_t i) { fps[i] = fingerprint(cands[i], limits); });
  std::vector<std::size_t> order(cands.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fps[a] < fps[b]; });
  Catalog c;
  c.order = n;
  Limits l = limits;
  l.workers = 1;
  std::size_t bucket_start = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t i = order[k];
    if (!c.fingerprints.empty() && !(c.fingerprints.back() == fps[i])) bucket_start = c.entries.size();
    if (c.fingerprints.empty()) bucket_start = 0;
    bool dup = false;
    for (std::size_t j = bucket_start; j < c.entries.size() && !dup; ++j)
      dup = c.fingerprints[j] == fps[i] && is_isomorphic(c.entries[j], cands[i], l);
    if (!dup) {
      c.entries.push_back(cands[i]);
      c.fingerprints.push_back(fps[i]);
    }
  }
  return c;
}

inline std::string serialize_catalog(const Catalog& c) {
  std::string s = "catalog order=" + std::to_string(c.order) + " count=" + std::to_string(c.entries.size()) +
                  " method=" + c.method + " v" + std::to_string(c.version) + "\n";
  for (std::size_t i = 0; i < c.entries.size(); ++i) {
    if (i) s += "---\n";
    s += format_group(c.entries[i]);
  }
  s += detail::crc32_hex(s) + "\n";
  return s;
}

struct LoadResult {
  Catalog catalog;
  std::vector<std::string> warnings;
};

/// Parses a catalog document; verifies the checksum, the header, and the
/// chains of five pseudo-randomly chosen entries.
inline LoadResult parse_catalog(const std::string& text, const Limits& limits = {}) {
  const std::size_t last_nl = text.empty() ? std::string::npos : text.rfind('\n', text.size() - 2);
  if (text.empty() || text.back() != '\n' || last_nl == std::string::npos)
    throw Error("catalog: corrupt file (truncated)");
  const std::string body = text.substr(0, last_nl + 1);
  const std::string sum = text.substr(last_nl + 1, text.size() - last_nl - 2);
  if (detail::crc32_hex(body) != sum) throw Error("catalog: corrupt file (checksum mismatch)");
  auto lines = split_lines(body);
  unsigned long long order = 0, count = 0;
  char method[64] = {0};
  int version = 0;
  if (lines.empty() ||
      std::sscanf(lines[0].c_str(), "catalog order=%llu count=%llu method=%63s v%d", &order, &count, method, &version) != 4)
    throw Error("catalog: bad header");
  if (std::string(method) != "cyclic-ext") throw Error("catalog: unknown method " + std::string(method));
  if (version != 1) throw Error("catalog: version mismatch (v" + std::to_string(version) + ")");
  LoadResult r;
  r.catalog.order = order;
  std::size_t i = 1;
  while (i < lines.size()) {
    if (lines[i] == "---") {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < lines.size() && lines[end] != "---") ++end;
    std::vector<std::string> block(lines.begin() + static_cast<std::ptrdiff_t>(i), lines.begin() + static_cast<std::ptrdiff_t>(end));
    auto pg = parse_group_block(block, 0, i);
    if (pg.lines_consumed != block.size()) throw Error("catalog: unexpected text after group block at line " + std::to_string(i + pg.lines_consumed + 1));
    r.catalog.entries.push_back(pg.group());
    i = end;
  }
  if (r.catalog.entries.size() != count) throw Error("catalog: corrupt file (entry count mismatch)");
  std::mt19937_64 rng(order * 1000003 + count);
  const std::size_t checks = std::min<std::size_t>(5, count);
  for (std::size_t k = 0; k < checks; ++k) {
    const std::size_t j = std::uniform_int_distribution<std::size_t>(0, count - 1)(rng);
    const auto& g = r.catalog.entries[j];
    PermGroup again(g.degree(), g.generators());
    if (again.order() != BigInt(order) || g.order() != BigInt(order))
      throw Error("catalog: entry " + std::to_string(j) + " does not have order " + std::to_string(order));
  }
  for (const auto& g : r.catalog.entries) r.catalog.fingerprints.push_back(fingerprint(g, limits));
  if (order > limits.catalog_bound)
    r.warnings.push_back("catalog of order " + std::to_string(order) + " exceeds the current catalog bound " +
                         std::to_string(limits.catalog_bound) + "; accepted");
  return r;
}

/// Full check of a loaded catalog: every entry has the catalog order,
/// fingerprints are sorted, and no two entries are isomorphic. Returns
/// the problems found.
inline std::vector<std::string> verify_catalog(const Catalog& c, const Limits& limits = {}) {
  std::vector<std::string> problems;
  for (std::size_t i = 0; i < c.entries.size(); ++i)
    if (c.entries[i].order() != BigInt(c.order))
      problems.push_back("entry " + std::to_string(i) + " has order " + c.entries[i].order().str());
  if (!std::is_sorted(c.fingerprints.begin(), c.fingerprints.end())) problems.push_back("fingerprints are not sorted");
  for (std::size_t i = 0; i < c.entries.size(); ++i)
    for (std::size_t j = i + 1; j < c.entries.size() && c.fingerprints[j] == c.fingerprints[i]; ++j)
      if (is_isomorphic(c.entries[i], c.entries[j], limits))
        problems.push_back("entries " + std::to_string(i) + " and " + std::to_string(j) + " are isomorphic");
  return problems;
}

inline void save_catalog(const Catalog& c, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw Error("catalog: cannot write " + tmp.string());
    f << serialize_catalog(c);
    if (!f) throw Error("catalog: write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline LoadResult load_catalog(const std::filesystem::path& path, const Limits& limits = {}) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("catalog: cannot open " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_catalog(ss.str(), limits);
}

/// Environment variable naming the catalog cache directory.
inline constexpr const char* cache_dir_env = "INTEGRALS_CACHE_DIR";

/// Cache directory: the override if nonempty, else $INTEGRALS_CACHE_DIR,
/// else $HOME/.cache/integrals, else ./.integrals-cache.
inline std::filesystem::path default_cache_dir(const std::string& override_dir = {}) {
  if (!override_dir.empty()) return override_dir;
  if (const char* e = std::getenv(cache_dir_env); e && *e) return e;
  if (const char* h = std::getenv("HOME"); h && *h) return std::filesystem::path(h) / ".cache" / "integrals";
  return ".integrals-cache";
}

/// Catalogs by order, computed on demand (recursively through the orders
/// dividing n) and cached in memory and, when a directory is set, on disk.
class CatalogStore {
 public:
  explicit CatalogStore(Limits limits = {}, std::optional<std::filesystem::path> dir = std::nullopt)
      : limits_(limits), dir_(std::move(dir)) {}

  const Limits& limits() const { return limits_; }
  const std::optional<std::filesystem::path>& directory() const { return dir_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  std::filesystem::path path_for(std::uint64_t n) const {
    return *dir_ / ("order-" + std::to_string(n) + ".catalog");
  }

  /// Catalog of order n; throws SizeGateExceeded above the catalog bound.
  const Catalog& get(std::uint64_t n) {
    if (n == 0) throw PreconditionError("catalog: order must be positive");
    if (auto it = mem_.find(n); it != mem_.end()) return it->second;
    if (dir_ && std::filesystem::exists(path_for(n))) {
      auto r = load_catalog(path_for(n), limits_);
      if (r.catalog.order != n) throw Error("catalog: file " + path_for(n).string() + " has the wrong order");
      for (auto& w : r.warnings) warnings_.push_back(std::move(w));
      return mem_.emplace(n, std::move(r.catalog)).first->second;
    }
    if (n > limits_.catalog_bound)
      throw SizeGateExceeded("catalog order", std::to_string(n), std::to_string(limits_.catalog_bound));
    if (n > catalog_hard_limit)
      throw SizeGateExceeded("catalog order", std::to_string(n), std::to_string(catalog_hard_limit));
    Catalog c = enumerate(n);
    if (dir_) save_catalog(c, path_for(n));
    return mem_.emplace(n, std::move(c)).first->second;
  }

  /// Inserts a catalog (e.g. one loaded from a file) into the memory cache.
  void put(Catalog c) { mem_[c.order] = std::move(c); }

 private:
  Catalog enumerate(std::uint64_t n) {
    if (n == 1) {
      Catalog c;
      c.order = 1;
      c.entries.push_back(PermGroup::trivial(1));
      c.fingerprints.push_back(fingerprint(c.entries[0], limits_));
      return c;
    }
    std::vector<std::pair<std::uint64_t, const PermGroup*>> work;
    for (std::uint64_t p : detail::primes_of(n)) {
      const Catalog& sub = get(n / p);
      for (const auto& g : sub.entries) work.emplace_back(p, &g);
    }
    std::vector<std::vector<PermGroup>> found(work.size());
    parallel_for(work.size(), limits_.workers,
                 [&](std::size_t i) { found[i] = detail::cyclic_extensions(*work[i].second, work[i].first, limits_); });
    std::vector<PermGroup> cands;
    for (auto& f : found)
      for (auto& g : f) cands.push_back(std::move(g));
    for (auto& g : detail::nonsolvable_groups(n)) cands.push_back(detail::regular_from_table(*table_of(g, limits_)));
    return dedupe_groups(n, cands, limits_);
  }

  Limits limits_;
  std::optional<std::filesystem::path> dir_;
  std::map<std::uint64_t, Catalog> mem_;
  std::vector<std::string> warnings_;
};

inline Catalog enumerate_order(std::uint64_t n, CatalogStore& store) { return store.get(n); }

}  // namespace integrals
