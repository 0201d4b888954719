#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace integrals {

/// Exact, unbounded integer used for group orders.
using BigInt = boost::multiprecision::cpp_int;

/// Size gates shared by every operation that may blow up.
struct Limits {
  /// Maximum order for listing elements one by one.
  std::uint64_t enumeration_threshold = 1'000'000;
  /// Maximum order for building a full multiplication table.
  std::uint64_t table_threshold = 4096;
  /// Maximum |G| for automorphism-group computations.
  std::uint64_t aut_gate = 512;
  /// Maximum |G| for subgroup-lattice computations (Frattini).
  std::uint64_t lattice_gate = 2000;
  /// Maximum number of subgroups a lattice computation may hold.
  std::uint64_t lattice_subgroup_cap = 400'000;
  /// Maximum number of cosets in a coset-action quotient.
  std::uint64_t coset_budget = 100'000;
  /// Maximum ball size in gauge computations.
  std::uint64_t ball_cap = 200'000;
  /// Maximum number of variable assignments examined by holds_on_ball.
  std::uint64_t assignment_cap = 200'000'000;
  /// Largest order small-enum will build a catalog for.
  std::uint64_t catalog_bound = 64;
  /// Worker threads for searches that partition their work.
  unsigned workers = 1;
};

inline std::string to_string(const BigInt& v) { return v.str(); }

}  // namespace integrals
