#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "integrals/error.hpp"
#include "integrals/group_table.hpp"
#include "integrals/limits.hpp"
#include "integrals/perm_group.hpp"

namespace integrals {

/// Subgroup of a tabulated group as a membership bitset.
struct SubgroupMask {
  std::vector<std::uint64_t> bits;

  bool has(std::size_t i) const { return (bits[i >> 6] >> (i & 63)) & 1; }
  void set(std::size_t i) { bits[i >> 6] |= std::uint64_t{1} << (i & 63); }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : bits) c += static_cast<std::size_t>(__builtin_popcountll(w));
    return c;
  }
  bool operator==(const SubgroupMask&) const = default;
};

struct SubgroupMaskHash {
  std::size_t operator()(const SubgroupMask& m) const {
    std::uint64_t h = 1469598103934665603ull;
    for (auto w : m.bits) {
      h ^= w;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

/// Every subgroup of a small group, found bottom-up: start from the trivial
/// subgroup and repeatedly adjoin one cyclic subgroup.
class SubgroupLattice {
 public:
  SubgroupLattice(const PermGroup& g, const Limits& limits = {}) : table_(nullptr) {
    const BigInt o = g.order();
    if (o > limits.lattice_gate)
      throw SizeGateExceeded("subgroup lattice", o.str(), std::to_string(limits.lattice_gate));
    Limits l = limits;
    l.table_threshold = std::max<std::uint64_t>(l.table_threshold, limits.lattice_gate);
    table_ = table_of(g, l);
    const GroupTable& t = *table_;
    const std::size_t n = t.size();
    const std::size_t words = (n + 63) / 64;

    // One generator per cyclic subgroup.
    std::vector<GroupTable::Index> cyc;
    {
      std::unordered_map<SubgroupMask, int, SubgroupMaskHash> seen;
      for (GroupTable::Index a = 1; a < n; ++a) {
        SubgroupMask m{std::vector<std::uint64_t>(words, 0)};
        GroupTable::Index x = 0;
        do {
          m.set(x);
          x = t.mul(x, a);
        } while (x != 0);
        if (seen.emplace(std::move(m), 0).second) cyc.push_back(a);
      }
    }

    SubgroupMask triv{std::vector<std::uint64_t>(words, 0)};
    triv.set(0);
    std::unordered_map<SubgroupMask, std::size_t, SubgroupMaskHash> index;
    index.emplace(triv, 0);
    subgroups_.push_back({triv, {}, 1});
    for (std::size_t s = 0; s < subgroups_.size(); ++s) {
      bool has_proper_extension = false;
      for (GroupTable::Index c : cyc) {
        if (subgroups_[s].mask.has(c)) continue;
        SubgroupMask m = extend(subgroups_[s], c);
        const std::size_t sz = m.count();
        if (sz < n) has_proper_extension = true;
        auto [it, fresh] = index.try_emplace(std::move(m), subgroups_.size());
        if (fresh) {
          if (subgroups_.size() >= limits.lattice_subgroup_cap)
            throw SizeGateExceeded("subgroup lattice size", std::to_string(subgroups_.size()),
                                   std::to_string(limits.lattice_subgroup_cap));
          std::vector<GroupTable::Index> gens = subgroups_[s].gens;
          gens.push_back(c);
          subgroups_.push_back({it->first, std::move(gens), sz});
        }
      }
      if (subgroups_[s].size < n && !has_proper_extension) maximal_.push_back(s);
    }
    if (n == 1) maximal_.clear();
  }

  struct Entry {
    SubgroupMask mask;
    std::vector<GroupTable::Index> gens;
    std::size_t size = 0;
  };

  const GroupTable& table() const { return *table_; }
  const std::vector<Entry>& subgroups() const { return subgroups_; }
  std::vector<const Entry*> maximal() const {
    std::vector<const Entry*> out;
    for (auto i : maximal_) out.push_back(&subgroups_[i]);
    return out;
  }

 private:
  SubgroupMask extend(const Entry& e, GroupTable::Index c) const {
    const GroupTable& t = *table_;
    SubgroupMask m = e.mask;
    std::vector<GroupTable::Index> gens = e.gens;
    gens.push_back(c);
    std::vector<GroupTable::Index> list;
    for (std::size_t i = 0; i < t.size(); ++i)
      if (m.has(i)) list.push_back(static_cast<GroupTable::Index>(i));
    for (std::size_t i = 0; i < list.size(); ++i)
      for (GroupTable::Index g : gens) {
        GroupTable::Index y = t.mul(list[i], g);
        if (!m.has(y)) {
          m.set(y);
          list.push_back(y);
        }
      }
    return m;
  }

  std::shared_ptr<const GroupTable> table_;
  std::vector<Entry> subgroups_;
  std::vector<std::size_t> maximal_;
};

/// Intersection of all maximal subgroups (the whole group when trivial).
inline PermGroup frattini(const PermGroup& g, const Limits& limits = {}) {
  if (g.is_trivial()) return g;
  SubgroupLattice lat(g, limits);
  const GroupTable& t = lat.table();
  std::vector<bool> in(t.size(), true);
  for (const auto* m : lat.maximal())
    for (std::size_t i = 0; i < t.size(); ++i)
      if (!m->mask.has(i)) in[i] = false;
  std::vector<Permutation> gens;
  for (std::size_t i = 1; i < t.size(); ++i)
    if (in[i]) gens.push_back(t.element(static_cast<GroupTable::Index>(i)));
  if (gens.empty()) return PermGroup::trivial(g.degree());
  return PermGroup(g.degree(), gens);
}

}  // namespace integrals
