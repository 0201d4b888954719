#pragma once

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "integrals/error.hpp"
#include "integrals/limits.hpp"
#include "integrals/perm_group.hpp"

namespace integrals {

/// Full multiplication table of a small group. Element 0 is the identity;
/// the remaining elements are listed in breadth-first order of words in the
/// generators, so element i's parent has a smaller index.
class GroupTable {
 public:
  using Index = std::uint32_t;

  /// Tabulates a permutation group. Throws SizeGateExceeded when the order
  /// exceeds `limits.table_threshold`.
  explicit GroupTable(const PermGroup& g, const Limits& limits = {}) {
    const BigInt o = g.order();
    if (o > limits.table_threshold)
      throw SizeGateExceeded("multiplication table", o.str(), std::to_string(limits.table_threshold));
    const std::size_t n = static_cast<std::size_t>(o);
    std::vector<Permutation> gens;
    for (const auto& s : g.generators())
      if (!s.is_identity()) gens.push_back(s);
    elems_.reserve(n);
    elems_.emplace_back(g.degree());
    index_.emplace(elems_[0], 0);
    parent_.push_back(0);
    gen_.push_back(0);
    std::vector<Index> rg;  // rg[x * k + s] = x * gens[s]
    const std::size_t k = gens.size();
    for (std::size_t x = 0; x < elems_.size(); ++x) {
      for (std::size_t s = 0; s < k; ++s) {
        Permutation y = elems_[x] * gens[s];
        auto [it, fresh] = index_.try_emplace(y, static_cast<Index>(elems_.size()));
        if (fresh) {
          elems_.push_back(std::move(y));
          parent_.push_back(static_cast<Index>(x));
          gen_.push_back(static_cast<Index>(s));
        }
        rg.push_back(it->second);
      }
    }
    if (elems_.size() != n) throw Error("group table: closure size disagrees with chain order");
    gen_idx_.resize(k);
    for (std::size_t s = 0; s < k; ++s) gen_idx_[s] = rg[s];
    fill_from_right_gens(rg, k);
  }

  /// Wraps an explicit Cayley table (row-major, `mul[a*n+b] = a·b`). The
  /// identity must be element 0. Elements are stored as their left-regular
  /// permutations.
  static GroupTable from_cayley(std::size_t n, std::vector<Index> mul) {
    if (n == 0 || mul.size() != n * n) throw PreconditionError("cayley table has wrong size");
    GroupTable t;
    t.mul_ = std::move(mul);
    t.n_ = n;
    for (std::size_t a = 0; a < n; ++a)
      if (t.mul_[a] != a || t.mul_[a * n] != a) throw PreconditionError("element 0 is not the identity");
    t.inv_.assign(n, 0);
    for (std::size_t a = 0; a < n; ++a) {
      std::vector<bool> seen(n, false);
      bool found = false;
      for (std::size_t b = 0; b < n; ++b) {
        const Index c = t.mul_[a * n + b];
        if (c >= n || seen[c]) throw PreconditionError("cayley table row is not a permutation");
        seen[c] = true;
        if (c == 0) {
          t.inv_[a] = static_cast<Index>(b);
          found = true;
        }
      }
      if (!found) throw PreconditionError("cayley table has no inverse");
    }
    for (std::size_t a = 0; a < n; ++a) {
      std::vector<Point> img(n);
      for (std::size_t x = 0; x < n; ++x) img[x] = t.mul_[a * n + x];
      t.elems_.emplace_back(std::move(img));
      t.index_.emplace(t.elems_.back(), static_cast<Index>(a));
    }
    t.parent_.assign(n, 0);
    t.gen_.assign(n, 0);
    return t;
  }

  std::size_t size() const { return n_; }
  Index mul(Index a, Index b) const { return mul_[static_cast<std::size_t>(a) * n_ + b]; }
  Index inv(Index a) const { return inv_[a]; }
  const Permutation& element(Index a) const { return elems_[a]; }
  const std::vector<Permutation>& elements() const { return elems_; }

  /// Index of a permutation, or size() when it is not an element.
  Index index_of(const Permutation& p) const {
    auto it = index_.find(p);
    return it == index_.end() ? static_cast<Index>(n_) : it->second;
  }

  /// Indices of the non-identity generators used for the BFS (tables built
  /// from a PermGroup only).
  const std::vector<Index>& generator_indices() const { return gen_idx_; }

  Index pow(Index a, std::int64_t k) const {
    if (k < 0) {
      a = inv(a);
      k = -k;
    }
    Index r = 0, b = a;
    while (k) {
      if (k & 1) r = mul(r, b);
      b = mul(b, b);
      k >>= 1;
    }
    return r;
  }

  std::uint64_t order(Index a) const {
    std::uint64_t o = 1;
    for (Index x = a; x != 0; x = mul(x, a)) ++o;
    return o;
  }

  Index commutator(Index a, Index b) const { return mul(mul(inv(a), inv(b)), mul(a, b)); }
  Index conjugate(Index a, Index b) const { return mul(mul(inv(b), a), b); }

  bool is_abelian() const {
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t b = a + 1; b < n_; ++b)
        if (mul_[a * n_ + b] != mul_[b * n_ + a]) return false;
    return true;
  }

  /// Closure of a set of elements, as a membership mask.
  std::vector<bool> closure(const std::vector<Index>& gens) const {
    std::vector<bool> in(n_, false);
    std::vector<Index> list{0};
    in[0] = true;
    for (std::size_t i = 0; i < list.size(); ++i)
      for (Index g : gens) {
        Index y = mul(list[i], g);
        if (!in[y]) {
          in[y] = true;
          list.push_back(y);
        }
      }
    return in;
  }

  /// Left-regular permutation group on {0..n-1}: element a acts as x -> a·x.
  PermGroup regular_group(const std::vector<Index>& gens) const {
    std::vector<Permutation> ps;
    for (Index a : gens) {
      std::vector<Point> img(n_);
      for (std::size_t x = 0; x < n_; ++x) img[x] = mul(a, static_cast<Index>(x));
      ps.emplace_back(std::move(img));
    }
    return PermGroup(n_, ps);
  }

  /// A small generating set found greedily (elements in index order whose
  /// addition enlarges the closure).
  std::vector<Index> greedy_generators() const {
    std::vector<Index> gens;
    std::vector<bool> in = closure(gens);
    std::size_t count = 1;
    // Prefer high-order elements first so the list stays short.
    std::vector<Index> order_idx(n_);
    for (std::size_t i = 0; i < n_; ++i) order_idx[i] = static_cast<Index>(i);
    std::vector<std::uint64_t> ord(n_);
    for (std::size_t i = 0; i < n_; ++i) ord[i] = order(static_cast<Index>(i));
    std::stable_sort(order_idx.begin(), order_idx.end(), [&](Index a, Index b) { return ord[a] > ord[b]; });
    for (Index a : order_idx) {
      if (count == n_) break;
      if (in[a]) continue;
      gens.push_back(a);
      in = closure(gens);
      count = static_cast<std::size_t>(std::count(in.begin(), in.end(), true));
    }
    return gens;
  }

 private:
  GroupTable() = default;

  void fill_from_right_gens(const std::vector<Index>& rg, std::size_t k) {
    n_ = elems_.size();
    mul_.assign(n_ * n_, 0);
    for (std::size_t a = 0; a < n_; ++a) {
      Index* row = &mul_[a * n_];
      row[0] = static_cast<Index>(a);
      for (std::size_t y = 1; y < n_; ++y) row[y] = rg[static_cast<std::size_t>(row[parent_[y]]) * k + gen_[y]];
    }
    inv_.assign(n_, 0);
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t b = 0; b < n_; ++b)
        if (mul_[a * n_ + b] == 0) {
          inv_[a] = static_cast<Index>(b);
          break;
        }
  }

  std::size_t n_ = 0;
  std::vector<Permutation> elems_;
  std::unordered_map<Permutation, Index, PermutationHash> index_;
  std::vector<Index> parent_, gen_;
  std::vector<Index> gen_idx_;
  std::vector<Index> mul_;
  std::vector<Index> inv_;
};

/// The memoized table of `g` (built once, shared by copies of `g`).
inline std::shared_ptr<const GroupTable> table_of(const PermGroup& g, const Limits& limits = {}) {
  auto& memo = g.memo();
  std::lock_guard lock(memo.mutex);
  if (!memo.table) memo.table = std::make_shared<const GroupTable>(g, limits);
  return memo.table;
}

}  // namespace integrals
