#pragma once

// Declarative group recipes and their canonical text form.
//
//   cyclic(6)  abelian(2,4,4)  elemab(2,3)  dihedral(8)  quaternion(16)
//   symmetric(4)  alternating(5)  sl23  heisenberg(4)  modular(5)
//   extraspecial(3)  extraspecial(3,9)  direct(cyclic(2),sl23)
//   semidirect(abelian(5,5),cyclic(3),action=[[g2,g1^-1*g2^-1]])
//   wreath(cyclic(2),symmetric(3))  regular(dihedral(6))
//
// In `action`, the k-th inner list gives the images of the bottom group's
// generators g1, g2, ... under the top group's k-th generator, as words in
// g1, g2, ... ("1" is the identity).

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "integrals/error.hpp"

namespace integrals {

/// A word in numbered generators: a product of g_i^e factors (left to right).
struct GenWord {
  struct Factor {
    std::size_t gen;  // 0-based
    std::int64_t exp;
    bool operator==(const Factor&) const = default;
  };
  std::vector<Factor> factors;

  bool operator==(const GenWord&) const = default;

  std::string to_string() const {
    if (factors.empty()) return "1";
    std::string s;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      if (i) s += '*';
      s += 'g' + std::to_string(factors[i].gen + 1);
      if (factors[i].exp != 1) s += '^' + std::to_string(factors[i].exp);
    }
    return s;
  }
};

struct GroupDescriptor {
  enum class Kind {
    Cyclic,
    Abelian,
    ElementaryAbelian,
    Dihedral,
    Quaternion,
    Symmetric,
    Alternating,
    SL23,
    Heisenberg,
    Modular,
    Extraspecial,
    Direct,
    Semidirect,
    Wreath,
    Regular,
  };

  Kind kind = Kind::Cyclic;
  std::vector<std::uint64_t> params;
  std::vector<GroupDescriptor> children;
  std::vector<std::vector<GenWord>> action;  // Semidirect only

  bool operator==(const GroupDescriptor&) const = default;

  static GroupDescriptor leaf(Kind k, std::vector<std::uint64_t> ps = {}) {
    GroupDescriptor d;
    d.kind = k;
    d.params = std::move(ps);
    return d;
  }
  static GroupDescriptor cyclic(std::uint64_t n) { return leaf(Kind::Cyclic, {n}); }
  static GroupDescriptor abelian(std::vector<std::uint64_t> fs) { return leaf(Kind::Abelian, std::move(fs)); }
  static GroupDescriptor elementary_abelian(std::uint64_t p, std::uint64_t k) { return leaf(Kind::ElementaryAbelian, {p, k}); }
  static GroupDescriptor dihedral(std::uint64_t order) { return leaf(Kind::Dihedral, {order}); }
  static GroupDescriptor quaternion(std::uint64_t order) { return leaf(Kind::Quaternion, {order}); }
  static GroupDescriptor symmetric(std::uint64_t n) { return leaf(Kind::Symmetric, {n}); }
  static GroupDescriptor alternating(std::uint64_t n) { return leaf(Kind::Alternating, {n}); }
  static GroupDescriptor sl23() { return leaf(Kind::SL23); }
  static GroupDescriptor heisenberg(std::uint64_t m) { return leaf(Kind::Heisenberg, {m}); }
  static GroupDescriptor modular(std::uint64_t n) { return leaf(Kind::Modular, {n}); }
  static GroupDescriptor extraspecial(std::uint64_t p, std::uint64_t exponent = 0) {
    return exponent && exponent != p ? leaf(Kind::Extraspecial, {p, exponent}) : leaf(Kind::Extraspecial, {p});
  }
  static GroupDescriptor direct(std::vector<GroupDescriptor> fs) {
    GroupDescriptor d;
    d.kind = Kind::Direct;
    d.children = std::move(fs);
    return d;
  }
  static GroupDescriptor semidirect(GroupDescriptor bottom, GroupDescriptor top, std::vector<std::vector<GenWord>> act) {
    GroupDescriptor d;
    d.kind = Kind::Semidirect;
    d.children = {std::move(bottom), std::move(top)};
    d.action = std::move(act);
    return d;
  }
  static GroupDescriptor wreath(GroupDescriptor bottom, GroupDescriptor top) {
    GroupDescriptor d;
    d.kind = Kind::Wreath;
    d.children = {std::move(bottom), std::move(top)};
    return d;
  }
  static GroupDescriptor regular(GroupDescriptor inner) {
    GroupDescriptor d;
    d.kind = Kind::Regular;
    d.children = {std::move(inner)};
    return d;
  }
};

namespace detail {

struct KindName {
  GroupDescriptor::Kind kind;
  const char* name;
};

inline constexpr KindName kind_names[] = {
    {GroupDescriptor::Kind::Cyclic, "cyclic"},
    {GroupDescriptor::Kind::Abelian, "abelian"},
    {GroupDescriptor::Kind::ElementaryAbelian, "elemab"},
    {GroupDescriptor::Kind::Dihedral, "dihedral"},
    {GroupDescriptor::Kind::Quaternion, "quaternion"},
    {GroupDescriptor::Kind::Symmetric, "symmetric"},
    {GroupDescriptor::Kind::Alternating, "alternating"},
    {GroupDescriptor::Kind::SL23, "sl23"},
    {GroupDescriptor::Kind::Heisenberg, "heisenberg"},
    {GroupDescriptor::Kind::Modular, "modular"},
    {GroupDescriptor::Kind::Extraspecial, "extraspecial"},
    {GroupDescriptor::Kind::Direct, "direct"},
    {GroupDescriptor::Kind::Semidirect, "semidirect"},
    {GroupDescriptor::Kind::Wreath, "wreath"},
    {GroupDescriptor::Kind::Regular, "regular"},
};

inline const char* kind_name(GroupDescriptor::Kind k) {
  for (const auto& kn : kind_names)
    if (kn.kind == k) return kn.name;
  return "?";
}

class DescriptorParser {
 public:
  explicit DescriptorParser(std::string_view s) : s_(s) {}

  GroupDescriptor parse_all() {
    GroupDescriptor d = parse();
    skip();
    if (i_ != s_.size()) fail("trailing characters");
    return d;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError("descriptor: " + msg, 1, i_ + 1); }

  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }

  bool peek(char c) {
    skip();
    return i_ < s_.size() && s_[i_] == c;
  }

  void expect(char c) {
    skip();
    if (i_ >= s_.size() || s_[i_] != c) fail(std::string("expected '") + c + "'");
    ++i_;
  }

  std::string ident() {
    skip();
    std::size_t st = i_;
    while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
    if (st == i_) fail("expected a name");
    return std::string(s_.substr(st, i_ - st));
  }

  std::int64_t integer() {
    skip();
    bool neg = false;
    if (i_ < s_.size() && s_[i_] == '-') {
      neg = true;
      ++i_;
    }
    if (i_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[i_]))) fail("expected an integer");
    std::int64_t v = 0;
    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
      v = v * 10 + (s_[i_] - '0');
      if (v > (std::int64_t{1} << 40)) fail("integer too large");
      ++i_;
    }
    return neg ? -v : v;
  }

  std::uint64_t natural() {
    std::int64_t v = integer();
    if (v < 0) fail("expected a non-negative integer");
    return static_cast<std::uint64_t>(v);
  }

  GenWord word() {
    GenWord w;
    skip();
    if (peek('1')) {
      ++i_;
      return w;
    }
    while (true) {
      skip();
      if (i_ >= s_.size() || s_[i_] != 'g') fail("expected a generator g<k>");
      ++i_;
      std::uint64_t k = natural();
      if (k == 0) fail("generators are numbered from 1");
      std::int64_t e = 1;
      if (peek('^')) {
        ++i_;
        e = integer();
      }
      w.factors.push_back({static_cast<std::size_t>(k - 1), e});
      if (!peek('*')) break;
      ++i_;
    }
    return w;
  }

  GroupDescriptor parse() {
    const std::size_t at = i_;
    std::string name = ident();
    GroupDescriptor d;
    bool found = false;
    for (const auto& kn : kind_names)
      if (name == kn.name) {
        d.kind = kn.kind;
        found = true;
      }
    if (!found) {
      i_ = at;
      fail("unknown group kind '" + name + "'");
    }
    using K = GroupDescriptor::Kind;
    if (d.kind == K::SL23) return d;
    expect('(');
    switch (d.kind) {
      case K::Direct:
        d.children.push_back(parse());
        while (peek(',')) {
          ++i_;
          d.children.push_back(parse());
        }
        break;
      case K::Wreath:
        d.children.push_back(parse());
        expect(',');
        d.children.push_back(parse());
        break;
      case K::Regular:
        d.children.push_back(parse());
        break;
      case K::Semidirect: {
        d.children.push_back(parse());
        expect(',');
        d.children.push_back(parse());
        expect(',');
        if (ident() != "action") fail("expected action=");
        expect('=');
        expect('[');
        if (!peek(']')) {
          do {
            if (peek(',')) ++i_;
            expect('[');
            std::vector<GenWord> imgs;
            if (!peek(']')) {
              imgs.push_back(word());
              while (peek(',')) {
                ++i_;
                imgs.push_back(word());
              }
            }
            expect(']');
            d.action.push_back(std::move(imgs));
          } while (peek(','));
        }
        expect(']');
        break;
      }
      default:
        if (!peek(')')) {
          d.params.push_back(natural());
          while (peek(',')) {
            ++i_;
            d.params.push_back(natural());
          }
        }
    }
    expect(')');
    return d;
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

}  // namespace detail

inline GroupDescriptor parse_descriptor(std::string_view text) { return detail::DescriptorParser(text).parse_all(); }

inline std::string to_string(const GroupDescriptor& d) {
  using K = GroupDescriptor::Kind;
  std::string s = detail::kind_name(d.kind);
  if (d.kind == K::SL23) return s;
  s += '(';
  if (d.kind == K::Direct || d.kind == K::Wreath || d.kind == K::Regular || d.kind == K::Semidirect) {
    for (std::size_t i = 0; i < d.children.size(); ++i) {
      if (i) s += ',';
      s += to_string(d.children[i]);
    }
    if (d.kind == K::Semidirect) {
      s += ",action=[";
      for (std::size_t k = 0; k < d.action.size(); ++k) {
        if (k) s += ',';
        s += '[';
        for (std::size_t j = 0; j < d.action[k].size(); ++j) {
          if (j) s += ',';
          s += d.action[k][j].to_string();
        }
        s += ']';
      }
      s += ']';
    }
  } else {
    for (std::size_t i = 0; i < d.params.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(d.params[i]);
    }
  }
  return s + ')';
}

}  // namespace integrals
