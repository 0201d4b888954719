#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <mutex>
#include <random>
#include <span>
#include <unordered_set>
#include <vector>

#include "integrals/error.hpp"
#include "integrals/limits.hpp"
#include "integrals/permutation.hpp"

namespace integrals {

/// Stabilizer chain built by the deterministic Schreier-Sims algorithm.
///
/// Base points are the caller's prefix (in order) followed by the lowest
/// point moved by each generator that fixes all earlier base points, so the
/// chain for a given generator list is reproducible.
class StabChain {
 public:
  struct Level {
    Point base = 0;
    std::vector<Permutation> gens;  // strong generators fixing the earlier base points
    std::vector<Point> orbit;
    std::vector<std::int32_t> slot;  // point -> index in orbit, -1 when outside
    std::vector<Permutation> transversal;      // transversal[k](base) == orbit[k]
    std::vector<Permutation> inv_transversal;  // inverses of the above
  };

  struct SiftResult {
    Permutation residue;
    std::size_t level;  // == levels().size() when every level was passed
  };

  StabChain() = default;

  StabChain(std::size_t degree, std::span<const Permutation> gens, std::span<const Point> base_prefix = {})
      : degree_(degree) {
    std::vector<Permutation> strong;
    std::unordered_set<Permutation, PermutationHash> seen;
    for (const auto& g : gens) {
      if (g.degree() != degree) throw DegreeMismatch(g.degree(), degree);
      if (!g.is_identity() && seen.insert(g).second) strong.push_back(g);
    }
    std::vector<Point> base(base_prefix.begin(), base_prefix.end());
    for (Point b : base)
      if (b >= degree) throw PreconditionError("base point outside degree");
    for (const auto& s : strong) {
      if (std::all_of(base.begin(), base.end(), [&](Point b) { return s[b] == b; }))
        base.push_back(static_cast<Point>(s.lowest_moved_point()));
    }
    for (std::size_t i = 0; i < base.size(); ++i) {
      Level lv;
      lv.base = base[i];
      for (const auto& s : strong) {
        bool fixes = true;
        for (std::size_t j = 0; j < i && fixes; ++j) fixes = s[base[j]] == base[j];
        if (fixes) lv.gens.push_back(s);
      }
      levels_.push_back(std::move(lv));
      rebuild_orbit(levels_.back());
    }
    schreier_sims();
  }

  std::size_t degree() const { return degree_; }
  const std::vector<Level>& levels() const { return levels_; }

  std::vector<Point> base() const {
    std::vector<Point> b;
    for (const auto& lv : levels_) b.push_back(lv.base);
    return b;
  }

  BigInt order() const {
    BigInt o = 1;
    for (const auto& lv : levels_) o *= lv.orbit.size();
    return o;
  }

  SiftResult sift(Permutation g, std::size_t from = 0) const {
    for (std::size_t l = from; l < levels_.size(); ++l) {
      const Level& lv = levels_[l];
      const std::int32_t k = lv.slot[g[lv.base]];
      if (k < 0) return {std::move(g), l};
      g = lv.inv_transversal[k] * g;
    }
    return {std::move(g), levels_.size()};
  }

  bool contains(const Permutation& g) const {
    if (g.degree() != degree_) throw DegreeMismatch(g.degree(), degree_);
    auto r = sift(g);
    return r.level == levels_.size() && r.residue.is_identity();
  }

  /// Generators of the pointwise stabilizer of the first `depth` base points.
  std::vector<Permutation> stabilizer_generators(std::size_t depth) const {
    if (depth >= levels_.size()) return {};
    return levels_[depth].gens;
  }

 private:
  void rebuild_orbit(Level& lv) const {
    lv.slot.assign(degree_, -1);
    lv.orbit.clear();
    lv.transversal.clear();
    lv.inv_transversal.clear();
    lv.orbit.push_back(lv.base);
    lv.slot[lv.base] = 0;
    lv.transversal.emplace_back(degree_);
    lv.inv_transversal.emplace_back(degree_);
    extend_orbit(lv, 0);
  }

  // BFS over the orbit; points before `from` only need the generators that
  // were appended after their first visit, which is all of them here.
  void extend_orbit(Level& lv, std::size_t from) const {
    for (std::size_t k = from; k < lv.orbit.size(); ++k) {
      for (const auto& s : lv.gens) {
        Point img = s[lv.orbit[k]];
        if (lv.slot[img] >= 0) continue;
        lv.slot[img] = static_cast<std::int32_t>(lv.orbit.size());
        lv.orbit.push_back(img);
        Permutation u = s * lv.transversal[k];
        lv.inv_transversal.push_back(u.inverse());
        lv.transversal.push_back(std::move(u));
      }
    }
  }

  void add_generator(std::size_t l, const Permutation& h) {
    Level& lv = levels_[l];
    lv.gens.push_back(h);
    const std::size_t old = lv.orbit.size();
    for (std::size_t k = 0; k < old; ++k) {
      Point img = h[lv.orbit[k]];
      if (lv.slot[img] >= 0) continue;
      lv.slot[img] = static_cast<std::int32_t>(lv.orbit.size());
      lv.orbit.push_back(img);
      Permutation u = h * lv.transversal[k];
      lv.inv_transversal.push_back(u.inverse());
      lv.transversal.push_back(std::move(u));
    }
    extend_orbit(lv, old);
  }

  void schreier_sims() {
    std::ptrdiff_t i = static_cast<std::ptrdiff_t>(levels_.size()) - 1;
    while (i >= 0) {
      bool added = false;
      for (std::size_t oi = 0; oi < levels_[i].orbit.size() && !added; ++oi) {
        for (std::size_t si = 0; si < levels_[i].gens.size() && !added; ++si) {
          const Level& lv = levels_[i];
          const Permutation& s = lv.gens[si];
          const Point img = s[lv.orbit[oi]];
          Permutation g = lv.inv_transversal[lv.slot[img]] * s * lv.transversal[oi];
          if (g.is_identity()) continue;
          auto [h, j] = sift(std::move(g), static_cast<std::size_t>(i) + 1);
          if (h.is_identity()) continue;
          if (j == levels_.size()) {
            Level nl;
            nl.base = static_cast<Point>(h.lowest_moved_point());
            levels_.push_back(std::move(nl));
            rebuild_orbit(levels_.back());
          }
          for (std::size_t l = static_cast<std::size_t>(i) + 1; l <= j; ++l) add_generator(l, h);
          i = static_cast<std::ptrdiff_t>(j);
          added = true;
        }
      }
      if (!added) --i;
    }
  }

  std::size_t degree_ = 0;
  std::vector<Level> levels_;
};

class GroupTable;
class IsoProfile;

namespace detail {
struct GroupMemo {
  std::mutex mutex;
  std::shared_ptr<const GroupTable> table;
  std::shared_ptr<const IsoProfile> profile;
};
}  // namespace detail

/// A finite permutation group given by generators, with a verified
/// stabilizer chain. Immutable after construction; copies share the chain
/// and the lazily built caches.
class PermGroup {
 public:
  PermGroup() : PermGroup(1, {Permutation(1)}) {}

  PermGroup(std::size_t degree, std::vector<Permutation> gens, std::span<const Point> base_prefix = {})
      : degree_(degree), gens_(std::move(gens)), memo_(std::make_shared<detail::GroupMemo>()) {
    if (degree == 0) throw PreconditionError("degree must be positive");
    if (gens_.empty()) gens_.emplace_back(degree);
    for (const auto& g : gens_)
      if (g.degree() != degree) throw DegreeMismatch(g.degree(), degree);
    chain_ = std::make_shared<const StabChain>(degree, gens_, base_prefix);
  }

  static PermGroup trivial(std::size_t degree) { return PermGroup(degree, {Permutation(degree)}); }

  std::size_t degree() const { return degree_; }
  const std::vector<Permutation>& generators() const { return gens_; }
  const StabChain& chain() const { return *chain_; }
  BigInt order() const { return chain_->order(); }

  /// Order as a 64-bit integer; throws SizeGateExceeded when it does not fit.
  std::uint64_t small_order() const {
    BigInt o = order();
    if (o > BigInt(UINT64_MAX)) throw SizeGateExceeded("group order", o.str(), "2^64");
    return static_cast<std::uint64_t>(o);
  }

  bool is_trivial() const {
    for (const auto& lv : chain_->levels())
      if (lv.orbit.size() > 1) return false;
    return true;
  }

  bool contains(const Permutation& p) const { return chain_->contains(p); }

  bool contains(const PermGroup& sub) const {
    return std::all_of(sub.gens_.begin(), sub.gens_.end(), [&](const Permutation& g) { return contains(g); });
  }

  bool is_abelian() const {
    for (std::size_t i = 0; i < gens_.size(); ++i)
      for (std::size_t j = i + 1; j < gens_.size(); ++j)
        if (gens_[i] * gens_[j] != gens_[j] * gens_[i]) return false;
    return true;
  }

  Permutation identity() const { return Permutation(degree_); }

  /// Calls `fn` once for every element; stops early when `fn` returns false.
  void for_each_element(const std::function<bool(const Permutation&)>& fn) const {
    const auto& lv = chain_->levels();
    std::vector<Permutation> prefix;
    prefix.reserve(lv.size() + 1);
    prefix.emplace_back(degree_);
    bool stop = false;
    std::function<void(std::size_t)> rec = [&](std::size_t d) {
      if (stop) return;
      if (d == lv.size()) {
        if (!fn(prefix.back())) stop = true;
        return;
      }
      for (const auto& u : lv[d].transversal) {
        prefix.push_back(prefix.back() * u);
        rec(d + 1);
        prefix.pop_back();
        if (stop) return;
      }
    };
    rec(0);
  }

  /// All elements; throws SizeGateExceeded above the enumeration threshold.
  std::vector<Permutation> elements(const Limits& limits = {}) const {
    require_enumerable(limits, "elements");
    std::vector<Permutation> out;
    for_each_element([&](const Permutation& g) {
      out.push_back(g);
      return true;
    });
    return out;
  }

  void require_enumerable(const Limits& limits, const char* what) const {
    BigInt o = order();
    if (o > limits.enumeration_threshold)
      throw SizeGateExceeded(std::string(what) + ": too large to enumerate", o.str(),
                             std::to_string(limits.enumeration_threshold));
  }

  template <class Rng>
  Permutation random_element(Rng& rng) const {
    Permutation g(degree_);
    for (const auto& lv : chain_->levels()) {
      std::uniform_int_distribution<std::size_t> pick(0, lv.transversal.size() - 1);
      g = g * lv.transversal[pick(rng)];
    }
    return g;
  }

  detail::GroupMemo& memo() const { return *memo_; }

 private:
  std::size_t degree_;
  std::vector<Permutation> gens_;
  std::shared_ptr<const StabChain> chain_;
  std::shared_ptr<detail::GroupMemo> memo_;
};

/// Builds the group generated by `gens`; throws on an empty list.
inline PermGroup build_group(const std::vector<Permutation>& gens) {
  if (gens.empty()) throw PreconditionError("build_group: empty generator list");
  return PermGroup(gens.front().degree(), gens);
}

/// Normal closure of `seeds` under conjugation by `group`'s generators.
inline PermGroup normal_closure(const PermGroup& group, std::vector<Permutation> seeds) {
  std::vector<Permutation> gens;
  for (auto& s : seeds)
    if (!s.is_identity()) gens.push_back(std::move(s));
  if (gens.empty()) return PermGroup::trivial(group.degree());
  PermGroup n(group.degree(), gens);
  std::size_t done = 0;
  while (done < gens.size()) {
    const std::size_t end = gens.size();
    std::vector<Permutation> fresh;
    for (std::size_t k = done; k < end; ++k)
      for (const auto& g : group.generators()) {
        Permutation c = conjugate(gens[k], g);
        if (!n.contains(c) && std::find(fresh.begin(), fresh.end(), c) == fresh.end()) fresh.push_back(std::move(c));
      }
    done = end;
    if (fresh.empty()) break;
    for (auto& c : fresh) gens.push_back(std::move(c));
    n = PermGroup(group.degree(), gens);
  }
  return n;
}

}  // namespace integrals
