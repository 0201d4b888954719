#pragma once

// Permutations of {0..n-1}.
//
// Composition convention, used everywhere in the library:
//   (a * b)(x) = a(b(x))        (right-to-left, b is applied first)
// Group products are written with this operator, so a*b means "b, then a".

#include <algorithm>
#include <compare>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "integrals/error.hpp"

namespace integrals {

using Point = std::uint32_t;

class Permutation {
 public:
  Permutation() = default;

  /// Identity of the given degree.
  explicit Permutation(std::size_t degree) : images_(degree) {
    std::iota(images_.begin(), images_.end(), Point{0});
  }

  /// Throws PreconditionError unless `images` is a bijection of {0..n-1}.
  explicit Permutation(std::vector<Point> images) : images_(std::move(images)) {
    std::vector<bool> seen(images_.size(), false);
    for (Point p : images_) {
      if (p >= images_.size() || seen[p]) throw PreconditionError("images do not form a bijection");
      seen[p] = true;
    }
  }

  /// Builds from disjoint cycles given with 0-based points.
  static Permutation from_cycles(std::size_t degree, const std::vector<std::vector<Point>>& cycles) {
    std::vector<Point> img(degree);
    std::iota(img.begin(), img.end(), Point{0});
    std::vector<bool> used(degree, false);
    for (const auto& cyc : cycles) {
      for (std::size_t i = 0; i < cyc.size(); ++i) {
        Point p = cyc[i];
        if (p >= degree) throw PreconditionError("cycle point " + std::to_string(p + 1) + " exceeds degree");
        if (used[p]) throw PreconditionError("cycles are not disjoint at point " + std::to_string(p + 1));
        used[p] = true;
        img[p] = cyc[(i + 1) % cyc.size()];
      }
    }
    Permutation r;
    r.images_ = std::move(img);
    return r;
  }

  std::size_t degree() const { return images_.size(); }
  Point operator[](Point x) const { return images_[x]; }
  std::span<const Point> images() const { return images_; }

  bool is_identity() const {
    for (std::size_t i = 0; i < images_.size(); ++i)
      if (images_[i] != i) return false;
    return true;
  }

  Permutation inverse() const {
    Permutation r;
    r.images_.resize(images_.size());
    for (std::size_t i = 0; i < images_.size(); ++i) r.images_[images_[i]] = static_cast<Point>(i);
    return r;
  }

  friend Permutation operator*(const Permutation& a, const Permutation& b) {
    if (a.degree() != b.degree()) throw DegreeMismatch(a.degree(), b.degree());
    Permutation r;
    r.images_.resize(a.images_.size());
    for (std::size_t i = 0; i < b.images_.size(); ++i) r.images_[i] = a.images_[b.images_[i]];
    return r;
  }

  Permutation& operator*=(const Permutation& b) { return *this = *this * b; }

  bool operator==(const Permutation&) const = default;
  auto operator<=>(const Permutation& o) const { return images_ <=> o.images_; }

  /// Lowest point moved, or degree() for the identity.
  std::size_t lowest_moved_point() const {
    for (std::size_t i = 0; i < images_.size(); ++i)
      if (images_[i] != i) return i;
    return images_.size();
  }

  std::vector<std::vector<Point>> cycles(bool include_fixed = false) const {
    std::vector<std::vector<Point>> out;
    std::vector<bool> seen(images_.size(), false);
    for (Point i = 0; i < images_.size(); ++i) {
      if (seen[i]) continue;
      std::vector<Point> cyc;
      for (Point j = i; !seen[j]; j = images_[j]) {
        seen[j] = true;
        cyc.push_back(j);
      }
      if (cyc.size() > 1 || include_fixed) out.push_back(std::move(cyc));
    }
    return out;
  }

  /// Order as lcm of cycle lengths; throws if it does not fit in 64 bits.
  std::uint64_t order() const {
    std::uint64_t l = 1;
    for (const auto& c : cycles()) {
      std::uint64_t len = c.size();
      std::uint64_t g = std::gcd(l, len);
      unsigned __int128 v = static_cast<unsigned __int128>(l / g) * len;
      if (v > UINT64_MAX) throw Error("permutation order overflows 64 bits");
      l = static_cast<std::uint64_t>(v);
    }
    return l;
  }

  /// k-th power; `reduce(len)` must return k mod len in [0, len).
  template <class Reduce>
  Permutation pow_by(Reduce reduce) const {
    Permutation r(degree());
    for (const auto& c : cycles()) {
      const std::size_t len = c.size();
      const std::size_t shift = reduce(len);
      for (std::size_t i = 0; i < len; ++i) r.images_[c[i]] = c[(i + shift) % len];
    }
    return r;
  }

  Permutation pow(std::int64_t k) const {
    return pow_by([k](std::size_t len) {
      std::int64_t m = k % static_cast<std::int64_t>(len);
      return static_cast<std::size_t>(m < 0 ? m + static_cast<std::int64_t>(len) : m);
    });
  }

  bool is_even() const {
    std::size_t transpositions = 0;
    for (const auto& c : cycles()) transpositions += c.size() - 1;
    return transpositions % 2 == 0;
  }

  /// Disjoint-cycle notation with 1-based points; the identity is "()".
  std::string to_string() const {
    auto cs = cycles();
    if (cs.empty()) return "()";
    std::string s;
    for (const auto& c : cs) {
      s += '(';
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) s += ' ';
        s += std::to_string(c[i] + 1);
      }
      s += ')';
    }
    return s;
  }

  std::size_t hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (Point p : images_) {
      h ^= p;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }

 private:
  std::vector<Point> images_;
};

inline Permutation compose(const Permutation& a, const Permutation& b) { return a * b; }

/// [a,b] = a^-1 b^-1 a b
inline Permutation commutator(const Permutation& a, const Permutation& b) {
  return a.inverse() * b.inverse() * a * b;
}

/// a^b = b^-1 a b
inline Permutation conjugate(const Permutation& a, const Permutation& b) { return b.inverse() * a * b; }

struct PermutationHash {
  std::size_t operator()(const Permutation& p) const { return p.hash(); }
};

}  // namespace integrals
