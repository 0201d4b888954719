#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "integrals/error.hpp"
#include "integrals/limits.hpp"
#include "integrals/parallel.hpp"
#include "integrals/perm_group.hpp"
#include "integrals/structure.hpp"

namespace integrals {

/// A group word in variables x1, x2, ... (also written x, y, z, w, u, v).
/// Letters are (variable, +1 or -1); the word is kept freely reduced.
class Word {
 public:
  struct Letter {
    std::uint32_t var;
    int exp;  // +1 or -1
    bool operator==(const Letter&) const = default;
  };

  Word() = default;
  explicit Word(std::vector<Letter> letters) : letters_(std::move(letters)) { reduce(); }

  static Word variable(std::uint32_t v) { return Word({{v, 1}}); }

  const std::vector<Letter>& letters() const { return letters_; }
  std::size_t length() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }

  /// One more than the largest variable index used (0 for the empty word).
  std::size_t rank() const {
    std::size_t r = 0;
    for (const auto& l : letters_) r = std::max<std::size_t>(r, l.var + 1);
    return r;
  }

  Word inverse() const {
    std::vector<Letter> out(letters_.rbegin(), letters_.rend());
    for (auto& l : out) l.exp = -l.exp;
    return Word(std::move(out));
  }

  friend Word operator*(const Word& a, const Word& b) {
    std::vector<Letter> out = a.letters_;
    out.insert(out.end(), b.letters_.begin(), b.letters_.end());
    return Word(std::move(out));
  }

  Word pow(std::int64_t k) const {
    Word base = k < 0 ? inverse() : *this, r;
    for (std::int64_t i = 0; i < (k < 0 ? -k : k); ++i) r = r * base;
    return r;
  }

  bool operator==(const Word&) const = default;

  std::string to_string() const {
    if (letters_.empty()) return "1";
    std::string s;
    for (std::size_t i = 0; i < letters_.size();) {
      std::size_t j = i;
      while (j < letters_.size() && letters_[j] == letters_[i]) ++j;
      if (!s.empty()) s += '*';
      s += variable_name(letters_[i].var);
      const std::int64_t e = static_cast<std::int64_t>(j - i) * letters_[i].exp;
      if (e != 1) s += '^' + std::to_string(e);
      i = j;
    }
    return s;
  }

  static std::string variable_name(std::uint32_t v) { return "x" + std::to_string(v + 1); }

 private:
  void reduce() {
    std::vector<Letter> out;
    for (const auto& l : letters_) {
      if (!out.empty() && out.back().var == l.var && out.back().exp == -l.exp)
        out.pop_back();
      else
        out.push_back(l);
    }
    letters_ = std::move(out);
  }

  std::vector<Letter> letters_;
};

/// Commutator u^-1 v^-1 u v.
inline Word commutator(const Word& u, const Word& v) { return u.inverse() * v.inverse() * u * v; }

/// Left-normed [w1, ..., wk] = [[w1, ..., w(k-1)], wk].
inline Word left_normed(const std::vector<Word>& ws) {
  if (ws.empty()) return {};
  Word r = ws[0];
  for (std::size_t i = 1; i < ws.size(); ++i) r = commutator(r, ws[i]);
  return r;
}

namespace detail {

class WordParser {
 public:
  explicit WordParser(const std::string& s) : s_(s) {}

  Word parse_relation() {
    Word lhs = product();
    skip();
    if (peek() == '=') {
      ++pos_;
      Word rhs = product();
      lhs = lhs * rhs.inverse();
    }
    skip();
    if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return lhs;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, 1, pos_ + 1); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  bool starts_factor() {
    const char c = peek();
    return c == '[' || c == '(' || c == '1' || std::isalpha(static_cast<unsigned char>(c));
  }

  Word product() {
    if (!starts_factor()) fail("expected a word");
    Word w = factor();
    while (true) {
      if (peek() == '*') {
        ++pos_;
        if (!starts_factor()) fail("expected a factor after '*'");
        w = w * factor();
      } else if (starts_factor()) {
        w = w * factor();
      } else {
        return w;
      }
    }
  }

  Word factor() {
    Word w = atom();
    while (peek() == '^') {
      ++pos_;
      skip();
      const std::size_t start = pos_;
      bool neg = false;
      if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) neg = s_[pos_++] == '-';
      if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        pos_ = start;
        fail("expected an integer exponent");
      }
      std::int64_t e = 0;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        e = e * 10 + (s_[pos_++] - '0');
        if (e > 1'000'000) fail("exponent too large");
      }
      w = w.pow(neg ? -e : e);
    }
    return w;
  }

  Word atom() {
    const char c = peek();
    if (c == '1') {
      ++pos_;
      return {};
    }
    if (c == '(') {
      ++pos_;
      Word w = product();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return w;
    }
    if (c == '[') {
      ++pos_;
      std::vector<Word> parts{product()};
      while (peek() == ',') {
        ++pos_;
        parts.push_back(product());
      }
      if (peek() != ']') fail("expected ',' or ']'");
      ++pos_;
      if (parts.size() < 2) fail("a commutator needs at least two entries");
      return left_normed(parts);
    }
    return Word::variable(variable());
  }

  std::uint32_t variable() {
    const std::size_t start = pos_;
    const char c = s_[pos_++];
    std::size_t digits_at = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ > digits_at) {
      if (c != 'x') {
        pos_ = start;
        fail("indexed variables are written x1, x2, ...");
      }
      const unsigned long k = std::stoul(s_.substr(digits_at, pos_ - digits_at));
      if (k == 0 || k > 64) {
        pos_ = start;
        fail("variable index must be in 1..64");
      }
      return static_cast<std::uint32_t>(k - 1);
    }
    static const std::string named = "xyzwuv";
    const auto at = named.find(c);
    if (at == std::string::npos) {
      pos_ = start;
      fail("unknown variable '" + std::string(1, c) + "'");
    }
    return static_cast<std::uint32_t>(at);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses "w" or "u = v" (read as u v^-1). Variables x,y,z,w,u,v are
/// x1..x6; products by juxtaposition or '*', powers by '^', commutators
/// [a,b] and left-normed [a,b,c].
inline Word parse_word(const std::string& text) { return detail::WordParser(text).parse_relation(); }

/// Substitutes assignment[i] for x(i+1) and multiplies out.
inline Permutation eval_word(const Word& w, const std::vector<Permutation>& assignment) {
  if (assignment.size() < w.rank())
    throw PreconditionError("word of rank " + std::to_string(w.rank()) + " needs " + std::to_string(w.rank()) +
                            " values, got " + std::to_string(assignment.size()));
  if (assignment.empty()) throw PreconditionError("cannot evaluate a word without a degree");
  const std::size_t deg = assignment[0].degree();
  for (const auto& g : assignment)
    if (g.degree() != deg) throw DegreeMismatch(g.degree(), deg);
  Permutation r(deg);
  for (const auto& l : w.letters()) r = r * (l.exp > 0 ? assignment[l.var] : assignment[l.var].inverse());
  return r;
}

struct IdentitySet {
  std::string name;
  std::vector<Word> laws;

  std::size_t rank() const {
    std::size_t r = 0;
    for (const auto& w : laws) r = std::max(r, w.rank());
    return r;
  }

  static IdentitySet from_strings(std::string name, const std::vector<std::string>& laws) {
    IdentitySet s{std::move(name), {}};
    for (const auto& l : laws) s.laws.push_back(parse_word(l));
    return s;
  }

  static IdentitySet abelian() { return from_strings("abelian", {"[x,y]"}); }
  /// Abelian of exponent dividing m.
  static IdentitySet abelian_exponent(std::uint64_t m) {
    if (m == 0) throw PreconditionError("exponent must be positive");
    return from_strings("A" + std::to_string(m), {"[x,y]", "x^" + std::to_string(m)});
  }
  /// Nilpotent of class at most c.
  static IdentitySet nilpotent(std::size_t c) {
    if (c == 0) throw PreconditionError("class must be positive");
    std::vector<Word> vs;
    for (std::uint32_t i = 0; i <= c; ++i) vs.push_back(Word::variable(i));
    return {"N" + std::to_string(c), {left_normed(vs)}};
  }
  static IdentitySet exponent_two() { return from_strings("exponent-2", {"x^2"}); }
  static IdentitySet metabelian() { return from_strings("metabelian", {"[[x,y],[z,w]]"}); }
  /// Basis of the variety generated by S3.
  static IdentitySet s3_basis() {
    return from_strings("s3", {"x^6", "[x^2,y^2]", "[x,y]^3", "[x^2,[y,z]]", "[[x,y],[z,w]]"});
  }

  /// Preset by name: abelian, A<m>, N<c>, exponent-2, metabelian, s3.
  static IdentitySet preset(const std::string& name) {
    if (name == "abelian") return abelian();
    if (name == "exponent-2") return exponent_two();
    if (name == "metabelian") return metabelian();
    if (name == "s3") return s3_basis();
    auto number = [&](std::size_t from) -> std::optional<std::uint64_t> {
      if (name.size() <= from || name.size() > from + 6) return std::nullopt;
      for (std::size_t i = from; i < name.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) return std::nullopt;
      return std::stoull(name.substr(from));
    };
    if (name[0] == 'A')
      if (auto m = number(1)) return abelian_exponent(*m);
    if (name[0] == 'N')
      if (auto c = number(1)) return nilpotent(*c);
    throw PreconditionError("unknown identity preset '" + name + "'");
  }
};

/// The ball B_k(S): all products of at most k elements of S, in canonical
/// (image-array) order. layer_sizes[i] = |B_i|.
struct Ball {
  std::vector<Permutation> generators;
  std::size_t radius = 0;
  std::vector<Permutation> elements;
  std::vector<std::size_t> layer_sizes;

  std::size_t size() const { return elements.size(); }
  bool contains(const Permutation& g) const { return std::binary_search(elements.begin(), elements.end(), g); }
};

namespace detail {

struct PermHash {
  std::size_t operator()(const Permutation& p) const { return p.hash(); }
};

inline void require_symmetric(const std::vector<Permutation>& s) {
  std::unordered_set<Permutation, PermHash> set(s.begin(), s.end());
  for (const auto& g : s)
    if (!set.count(g.inverse())) throw PreconditionError("generating set is not symmetric: " + g.to_string() + " has no inverse in it");
}

}  // namespace detail

/// S together with the inverses of its elements, duplicates and the
/// identity removed, in canonical order.
inline std::vector<Permutation> symmetrize(const std::vector<Permutation>& s) {
  std::vector<Permutation> out;
  for (const auto& g : s) {
    if (g.is_identity()) continue;
    out.push_back(g);
    out.push_back(g.inverse());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Breadth-first construction of B_k(S). S must be symmetric and lie in G.
inline Ball ball(const PermGroup& g, const std::vector<Permutation>& s, std::size_t k, const Limits& limits = {}) {
  for (const auto& x : s) {
    if (x.degree() != g.degree()) throw DegreeMismatch(x.degree(), g.degree());
    if (!g.contains(x)) throw PreconditionError("generator " + x.to_string() + " is not in the group");
  }
  detail::require_symmetric(s);
  Ball b;
  b.generators = s;
  b.radius = k;
  std::unordered_set<Permutation, detail::PermHash> seen;
  std::vector<Permutation> frontier{Permutation(g.degree())};
  seen.insert(frontier[0]);
  b.elements = frontier;
  b.layer_sizes.push_back(1);
  for (std::size_t r = 1; r <= k; ++r) {
    std::vector<Permutation> next;
    for (const auto& w : frontier)
      for (const auto& x : s) {
        Permutation y = w * x;
        if (seen.insert(y).second) {
          if (seen.size() > limits.ball_cap)
            throw SizeGateExceeded("ball of radius " + std::to_string(r), "> " + std::to_string(limits.ball_cap),
                                   std::to_string(limits.ball_cap));
          next.push_back(y);
          b.elements.push_back(std::move(y));
        }
      }
    frontier = std::move(next);
    b.layer_sizes.push_back(b.elements.size());
  }
  std::sort(b.elements.begin(), b.elements.end());
  return b;
}

/// Smallest k with B_k(S) = G (S must generate G).
inline std::size_t diameter(const PermGroup& g, const std::vector<Permutation>& s, const Limits& limits = {}) {
  detail::require_symmetric(s);
  const BigInt order = g.order();
  if (order > limits.ball_cap) throw SizeGateExceeded("diameter", to_string(order), std::to_string(limits.ball_cap));
  std::unordered_set<Permutation, detail::PermHash> seen{Permutation(g.degree())};
  std::vector<Permutation> frontier{Permutation(g.degree())};
  std::size_t k = 0;
  while (BigInt(seen.size()) < order) {
    std::vector<Permutation> next;
    for (const auto& w : frontier)
      for (const auto& x : s) {
        Permutation y = w * x;
        if (seen.insert(y).second) next.push_back(std::move(y));
      }
    if (next.empty()) throw PreconditionError("the set does not generate the group");
    frontier = std::move(next);
    ++k;
  }
  return k;
}

struct LawViolation {
  std::size_t law = 0;                   // index into the identity set
  std::vector<Permutation> assignment;   // value of x1, x2, ...
  Permutation value;                     // the nontrivial result
};

struct LawCheck {
  bool holds = true;
  std::optional<LawViolation> witness;
  std::size_t domain_size = 0;
  std::uint64_t assignments = 0;  // size of the assignment space
};

namespace detail {

// Evaluates words on tuples drawn from a fixed list, using flat image arrays.
class TupleEvaluator {
 public:
  TupleEvaluator(const std::vector<Permutation>& dom) : deg_(dom.empty() ? 0 : dom[0].degree()) {
    fwd_.reserve(dom.size() * deg_);
    inv_.reserve(dom.size() * deg_);
    for (const auto& g : dom) {
      fwd_.insert(fwd_.end(), g.images().begin(), g.images().end());
      const Permutation gi = g.inverse();
      inv_.insert(inv_.end(), gi.images().begin(), gi.images().end());
    }
  }

  // true iff w evaluates to the identity at idx
  bool trivial_at(const Word& w, const std::vector<std::size_t>& idx, std::vector<Point>& acc, std::vector<Point>& tmp) const {
    acc.resize(deg_);
    tmp.resize(deg_);
    std::iota(acc.begin(), acc.end(), Point{0});
    // (acc * g)(p) = acc(g(p))
    for (const auto& l : w.letters()) {
      const Point* g = (l.exp > 0 ? fwd_.data() : inv_.data()) + idx[l.var] * deg_;
      for (std::size_t p = 0; p < deg_; ++p) tmp[p] = acc[g[p]];
      acc.swap(tmp);
    }
    for (std::size_t p = 0; p < deg_; ++p)
      if (acc[p] != p) return false;
    return true;
  }

 private:
  std::size_t deg_;
  std::vector<Point> fwd_, inv_;
};

inline std::uint64_t checked_power(std::size_t base, std::size_t e, std::uint64_t cap) {
  BigInt r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= base;
  return r > cap ? cap + 1 : static_cast<std::uint64_t>(r);
}

}  // namespace detail

/// Checks every law on every assignment of values from `domain`. Laws are
/// tried in order; within a law, assignments run lexicographically in the
/// domain order (x1 most significant), so the reported witness is the
/// least violating one whatever the worker count.
inline LawCheck holds_on_set(const IdentitySet& ids, const std::vector<Permutation>& domain, const Limits& limits = {}) {
  LawCheck out;
  out.domain_size = domain.size();
  if (domain.empty()) throw PreconditionError("empty assignment domain");
  std::uint64_t total = 0;
  for (const auto& w : ids.laws) {
    total += detail::checked_power(domain.size(), w.rank(), limits.assignment_cap);
    if (total > limits.assignment_cap)
      throw SizeGateExceeded("law assignments", "> " + std::to_string(limits.assignment_cap),
                             std::to_string(limits.assignment_cap));
  }
  out.assignments = total;
  const detail::TupleEvaluator ev(domain);
  const std::size_t d = domain.size();
  for (std::size_t li = 0; li < ids.laws.size(); ++li) {
    const Word& w = ids.laws[li];
    const std::size_t r = w.rank();
    if (r == 0) {
      if (!w.empty()) throw Error("internal: nonempty word of rank 0");
      continue;
    }
    // partition on the value of x1; each slot is written by one worker
    std::vector<std::optional<std::vector<std::size_t>>> found(d);
    const std::size_t first = parallel_find_first(d, limits.workers, [&](std::size_t i0) {
      std::vector<std::size_t> idx(r, 0);
      idx[0] = i0;
      std::vector<Point> acc, tmp;
      while (true) {
        if (!ev.trivial_at(w, idx, acc, tmp)) {
          found[i0] = idx;
          return true;
        }
        std::size_t k = r;
        while (k > 1) {
          --k;
          if (++idx[k] < d) break;
          idx[k] = 0;
          if (k == 1) return false;
        }
        if (r == 1) return false;
      }
    });
    if (first < d) {
      LawViolation v;
      v.law = li;
      for (std::size_t i : *found[first]) v.assignment.push_back(domain[i]);
      v.value = eval_word(w, v.assignment);
      out.holds = false;
      out.witness = std::move(v);
      return out;
    }
  }
  return out;
}

/// Every law on every assignment from B_k(S).
inline LawCheck holds_on_ball(const IdentitySet& ids, const PermGroup& g, const std::vector<Permutation>& s, std::size_t k,
                              const Limits& limits = {}) {
  const Ball b = ball(g, s, k, limits);
  return holds_on_set(ids, b.elements, limits);
}

/// Every law on all of G.
inline LawCheck holds_on_group(const IdentitySet& ids, const PermGroup& g, const Limits& limits = {}) {
  return holds_on_set(ids, g.elements(limits), limits);
}

struct Gauge1Report {
  bool generators_commute = false;
  bool abelian = false;
  std::uint64_t generator_exponent = 1;  // lcm of the generator orders
  std::uint64_t exponent = 1;
  std::optional<std::size_t> law_class;  // least c with [x1..x(c+1)] = 1 on S
  std::optional<std::size_t> nilpotency_class;
  bool consistent = true;
};

/// Checks the gauge-one implications on S: commuting generators give an
/// abelian group whose exponent divides the lcm of the generator orders,
/// and the left-normed class-c law on S bounds the nilpotency class.
inline Gauge1Report gauge1_checks(const PermGroup& g, const std::vector<Permutation>& s, std::size_t max_class = 4,
                                  const Limits& limits = {}) {
  if (s.empty()) throw PreconditionError("empty generating set");
  for (const auto& x : s)
    if (!g.contains(x)) throw PreconditionError("generator " + x.to_string() + " is not in the group");
  if (PermGroup(g.degree(), s).order() != g.order()) throw PreconditionError("the set does not generate the group");
  Gauge1Report r;
  r.generators_commute = holds_on_set(IdentitySet::abelian(), s, limits).holds;
  r.abelian = g.is_abelian();
  for (const auto& x : s) r.generator_exponent = std::lcm(r.generator_exponent, x.order());
  r.exponent = exponent(g, limits);
  for (std::size_t c = 1; c <= max_class; ++c)
    if (holds_on_set(IdentitySet::nilpotent(c), s, limits).holds) {
      r.law_class = c;
      break;
    }
  r.nilpotency_class = nilpotency_class(g);
  if (r.generators_commute && !(r.abelian && r.generator_exponent % r.exponent == 0)) r.consistent = false;
  if (r.law_class && !(r.nilpotency_class && *r.nilpotency_class <= *r.law_class)) r.consistent = false;
  return r;
}

/// G' satisfies the laws (checked on every element of G').
inline bool derived_in_variety(const PermGroup& g, const IdentitySet& v, const Limits& limits = {}) {
  return holds_on_group(v, derived_subgroup(g), limits).holds;
}

struct S3Membership {
  bool basis_on_generators = false;
  bool in_variety = false;  // G in A3A2, checked structurally
  bool agree = false;
};

/// The S3-variety basis on S, against the structural test: the subgroup
/// generated by squares and commutators is abelian of exponent dividing 3.
inline S3Membership s3_variety_membership(const PermGroup& g, const std::vector<Permutation>& s, const Limits& limits = {}) {
  for (const auto& x : s)
    if (!g.contains(x)) throw PreconditionError("generator " + x.to_string() + " is not in the group");
  S3Membership m;
  m.basis_on_generators = holds_on_set(IdentitySet::s3_basis(), s, limits).holds;
  std::vector<Permutation> seeds;
  for (const auto& x : g.elements(limits)) seeds.push_back(x * x);
  const PermGroup d = derived_subgroup(g);
  for (const auto& x : d.generators()) seeds.push_back(x);
  PermGroup k = subgroup(g, seeds);
  m.in_variety = k.is_abelian() && 3 % exponent(k, limits) == 0;
  m.agree = m.basis_on_generators == m.in_variety;
  return m;
}

struct WreathExperiment {
  std::size_t n = 0, M = 0, N = 0;
  std::size_t degree = 0;
  BigInt group_order;
  std::vector<Permutation> generators;  // a, a^-1, c, c^-1, x, x^-1
  Permutation a, c, x;
  std::size_t ball_size = 0;
  LawCheck law;  // metabelian law on B_n
  // [[w0,w1],[w2,w3]] != 1 for these elements of G
  std::vector<Permutation> nonmetabelian_witness;
  std::vector<std::string> witness_words;
  std::size_t claim_checked = 0;
  std::size_t claim_violations = 0;
};

/// Finite truncation of the infinite-gauge construction: G = A5 wr C_M on
/// 5M points (block i holds coordinate i), S = {a, c, x}^{+-1} with a, b
/// generating A5 on block 0, x rotating the blocks and c = x^-N b x^N.
/// N defaults to 4n+1. Reports the metabelian law on B_n, an explicit
/// non-metabelian quadruple, and the claim that every element of B_t lying
/// in the base group is in W_(t/2) = <a^(x^z), c^(x^z) : |z| <= t/2>,
/// checked for every t <= 2n (sampled down to claim_sample per radius).
inline WreathExperiment metabelian_wreath_experiment(std::size_t n, std::size_t M, std::optional<std::size_t> N = {},
                                                     const Limits& limits = {}, std::size_t claim_sample = 4000,
                                                     std::uint64_t seed = 1) {
  if (n == 0) throw PreconditionError("radius n must be positive");
  if (M < 4 * n + 2) throw PreconditionError("top group C_M needs M >= 4n+2");
  WreathExperiment r;
  r.n = n;
  r.M = M;
  r.N = N.value_or(4 * n + 1);
  if (r.N == 0) throw PreconditionError("shift N must be nonzero");
  const std::size_t deg = 5 * M;
  r.degree = deg;
  auto on_block = [&](const std::vector<Point>& cyc, std::size_t block) {
    std::vector<Point> c;
    for (Point p : cyc) c.push_back(static_cast<Point>(5 * block + p));
    return Permutation::from_cycles(deg, {c});
  };
  const Permutation a = on_block({0, 1, 2}, 0), b = on_block({0, 1, 2, 3, 4}, 0);
  std::vector<Point> rot(deg);
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = 0; j < 5; ++j) rot[5 * i + j] = static_cast<Point>(5 * ((i + 1) % M) + j);
  const Permutation x(rot);
  auto xpow = [&](std::int64_t k) { return x.pow(k); };
  auto shift = [&](const Permutation& g, std::int64_t z) { return conjugate(g, xpow(z)); };  // g^(x^z)
  const Permutation c = shift(b, static_cast<std::int64_t>(r.N));
  r.a = a;
  r.c = c;
  r.x = x;
  r.generators = symmetrize({a, c, x});
  PermGroup g(deg, {a, c, x});
  r.group_order = g.order();

  const Ball bn = ball(g, r.generators, n, limits);
  r.ball_size = bn.size();
  r.law = holds_on_set(IdentitySet::metabelian(), bn.elements, limits);

  // b itself is c conjugated back; A5 is not metabelian, so some
  // quadruple of short words in a and b breaks the law
  const Permutation b0 = shift(c, -static_cast<std::int64_t>(r.N));
  if (b0 != b) throw Error("internal: shifted generator does not return to block 0");
  const std::vector<std::pair<Permutation, std::string>> cands{
      {a, "a"}, {a.inverse(), "a^-1"}, {b0, "x^N*c*x^-N"}, {b0.inverse(), "x^N*c^-1*x^-N"},
      {a * b0, "a*x^N*c*x^-N"}, {b0 * a, "x^N*c*x^-N*a"}};
  const Word law = IdentitySet::metabelian().laws[0];
  for (std::size_t i = 0; i < cands.size() && r.nonmetabelian_witness.empty(); ++i)
    for (std::size_t j = 0; j < cands.size() && r.nonmetabelian_witness.empty(); ++j)
      for (std::size_t k = 0; k < cands.size() && r.nonmetabelian_witness.empty(); ++k)
        for (std::size_t l = 0; l < cands.size(); ++l) {
          std::vector<Permutation> t{cands[i].first, cands[j].first, cands[k].first, cands[l].first};
          if (!eval_word(law, t).is_identity()) {
            r.nonmetabelian_witness = t;
            r.witness_words = {cands[i].second, cands[j].second, cands[k].second, cands[l].second};
            break;
          }
        }
  if (r.nonmetabelian_witness.empty()) throw Error("internal: no non-metabelian witness among short words");

  // claim spot check
  std::vector<std::vector<Permutation>> by_radius(2 * n + 1);
  {
    // radius of each element: rebuild layers by BFS distance
    std::unordered_set<Permutation, detail::PermHash> seen{Permutation(deg)};
    std::vector<Permutation> frontier{Permutation(deg)};
    by_radius[0] = frontier;
    for (std::size_t t = 1; t <= 2 * n; ++t) {
      std::vector<Permutation> next;
      for (const auto& w : frontier)
        for (const auto& s : r.generators) {
          Permutation y = w * s;
          if (seen.insert(y).second) next.push_back(std::move(y));
        }
      by_radius[t] = next;
      frontier = std::move(next);
    }
  }
  auto in_base = [&](const Permutation& p) { return p.images()[0] < 5; };
  std::mt19937_64 rng(seed);
  for (std::size_t t = 0; t <= 2 * n; ++t) {
    const std::int64_t s = static_cast<std::int64_t>(t / 2);
    std::vector<Permutation> wg;
    for (std::int64_t z = -s; z <= s; ++z) {
      wg.push_back(shift(a, z));
      wg.push_back(shift(c, z));
    }
    PermGroup w(deg, wg);
    // an element first reached at distance t' <= t lies in B_t; W grows
    // with t, so checking each element at its own distance suffices
    std::vector<Permutation> pool;
    for (const auto& p : by_radius[t])
      if (in_base(p)) pool.push_back(p);
    std::sort(pool.begin(), pool.end());
    if (pool.size() > claim_sample) {
      std::shuffle(pool.begin(), pool.end(), rng);
      pool.resize(claim_sample);
    }
    for (const auto& p : pool) {
      ++r.claim_checked;
      if (!w.contains(p)) ++r.claim_violations;
    }
  }
  return r;
}

inline std::string format_wreath_experiment(const WreathExperiment& r) {
  std::ostringstream o;
  o << "gauge-experiment v1\n";
  o << "group=A5 wr C" << r.M << " degree=" << r.degree << " order=" << r.group_order << "\n";
  o << "n=" << r.n << " M=" << r.M << " N=" << r.N << "\n";
  o << "a=" << r.a.to_string() << "\n";
  o << "c=" << r.c.to_string() << "\n";
  o << "ball.size=" << r.ball_size << "\n";
  o << "law=[[x,y],[z,w]] assignments=" << r.law.assignments << "\n";
  o << "law.holds=" << (r.law.holds ? "yes" : "no") << "\n";
  if (r.law.witness)
    for (std::size_t i = 0; i < r.law.witness->assignment.size(); ++i)
      o << "law.witness." << Word::variable_name(static_cast<std::uint32_t>(i)) << "="
        << r.law.witness->assignment[i].to_string() << "\n";
  o << "metabelian=no\n";
  for (std::size_t i = 0; i < r.nonmetabelian_witness.size(); ++i)
    o << "nonmetabelian.witness." << i + 1 << "=" << r.witness_words[i] << " " << r.nonmetabelian_witness[i].to_string()
      << "\n";
  o << "claim.checked=" << r.claim_checked << " claim.violations=" << r.claim_violations << "\n";
  return o.str();
}

}  // namespace integrals
