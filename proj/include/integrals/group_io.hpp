#pragma once

// Text format for permutation groups:
//
//   permgroup degree=<n>
//   (1 2 3)(4 5)
//   ()
//
// One generator per line in disjoint-cycle notation with 1-based points.
// A blank line or end of input ends the block.

#include <cctype>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "integrals/error.hpp"
#include "integrals/perm_group.hpp"

namespace integrals {

/// Parses one permutation in cycle notation. `line_no` and `col0` locate the
/// text for error messages (columns are 1-based).
inline Permutation parse_permutation(std::string_view text, std::size_t degree, std::size_t line_no = 1,
                                     std::size_t col0 = 1) {
  std::vector<std::vector<Point>> cycles;
  std::size_t i = 0;
  auto col = [&](std::size_t k) { return col0 + k; };
  auto skip_ws = [&] {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\r')) ++i;
  };
  skip_ws();
  if (i == text.size()) throw ParseError("empty permutation", line_no, col(i));
  while (true) {
    skip_ws();
    if (i == text.size()) break;
    if (text[i] != '(') throw ParseError("expected '('", line_no, col(i));
    const std::size_t open = i;
    ++i;
    std::vector<Point> cyc;
    while (true) {
      skip_ws();
      if (i == text.size()) throw ParseError("unterminated cycle", line_no, col(open));
      if (text[i] == ')') {
        ++i;
        break;
      }
      if (text[i] == ',') {
        ++i;
        continue;
      }
      if (!std::isdigit(static_cast<unsigned char>(text[i]))) throw ParseError("expected a point", line_no, col(i));
      const std::size_t start = i;
      std::uint64_t v = 0;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        v = v * 10 + static_cast<std::uint64_t>(text[i] - '0');
        if (v > degree) throw ParseError("point exceeds degree " + std::to_string(degree), line_no, col(start));
        ++i;
      }
      if (v == 0) throw ParseError("points are 1-based", line_no, col(start));
      if (std::find(cyc.begin(), cyc.end(), static_cast<Point>(v - 1)) != cyc.end())
        throw ParseError("repeated point in cycle", line_no, col(start));
      cyc.push_back(static_cast<Point>(v - 1));
    }
    if (!cyc.empty()) cycles.push_back(std::move(cyc));
  }
  try {
    return Permutation::from_cycles(degree, cycles);
  } catch (const PreconditionError& e) {
    throw ParseError(e.what(), line_no, col0);
  }
}

struct ParsedGroup {
  std::size_t degree = 0;
  std::vector<Permutation> generators;
  std::size_t lines_consumed = 0;

  PermGroup group() const { return PermGroup(degree, generators); }
};

/// Parses a group block starting at `lines[first]`. Line numbers in errors
/// are reported as `first + line_offset + 1` and onwards.
inline ParsedGroup parse_group_block(const std::vector<std::string>& lines, std::size_t first,
                                     std::size_t line_offset = 0) {
  if (first >= lines.size()) throw ParseError("expected 'permgroup degree=<n>'", first + line_offset + 1, 1);
  const std::string& head = lines[first];
  const std::string prefix = "permgroup degree=";
  if (head.rfind(prefix, 0) != 0) throw ParseError("expected 'permgroup degree=<n>'", first + line_offset + 1, 1);
  ParsedGroup out;
  std::size_t k = prefix.size();
  if (k >= head.size() || !std::isdigit(static_cast<unsigned char>(head[k])))
    throw ParseError("expected degree", first + line_offset + 1, k + 1);
  std::uint64_t deg = 0;
  for (; k < head.size() && std::isdigit(static_cast<unsigned char>(head[k])); ++k) {
    deg = deg * 10 + static_cast<std::uint64_t>(head[k] - '0');
    if (deg > (1u << 24)) throw ParseError("degree too large", first + line_offset + 1, k + 1);
  }
  while (k < head.size() && (head[k] == ' ' || head[k] == '\r')) ++k;
  if (k != head.size()) throw ParseError("trailing characters after degree", first + line_offset + 1, k + 1);
  if (deg == 0) throw ParseError("degree must be positive", first + line_offset + 1, prefix.size() + 1);
  out.degree = static_cast<std::size_t>(deg);
  std::size_t i = first + 1;
  for (; i < lines.size(); ++i) {
    std::string_view l = lines[i];
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    if (l.find_first_not_of(" \t") == std::string_view::npos) break;
    out.generators.push_back(parse_permutation(l, out.degree, i + line_offset + 1));
  }
  if (out.generators.empty()) out.generators.emplace_back(out.degree);
  out.lines_consumed = i - first;
  return out;
}

inline std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      if (start < text.size()) lines.emplace_back(text.substr(start));
      break;
    }
    lines.emplace_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

inline PermGroup parse_group(std::string_view text) {
  auto lines = split_lines(text);
  std::size_t first = 0;
  while (first < lines.size() && lines[first].find_first_not_of(" \t\r") == std::string::npos) ++first;
  return parse_group_block(lines, first).group();
}

/// Serializes generators exactly as given (the identity is written "()").
inline std::string format_group(std::size_t degree, const std::vector<Permutation>& gens) {
  std::string s = "permgroup degree=" + std::to_string(degree) + "\n";
  for (const auto& g : gens) s += g.to_string() + "\n";
  return s;
}

inline std::string format_group(const PermGroup& g) { return format_group(g.degree(), g.generators()); }

}  // namespace integrals
