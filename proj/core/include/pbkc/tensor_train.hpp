#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <vector>

#include "pbkc/semiring.hpp"

namespace pbkc {

struct assignment;
struct evdd;

/// One tensor-train core: sparse entries keyed by (row s, column t, bit b),
/// all 0-based. Row s indexes the incoming bond, column t the outgoing bond.
struct tt_core {
  std::map<std::array<std::size_t, 3>, value> w;

  /// Stored weight at (s, t, b), or the semiring zero when absent.
  value at(std::size_t s, std::size_t t, std::size_t b, semiring_id sr) const;
  void set(std::size_t s, std::size_t t, std::size_t b, value v);
};

/// Tensor train (matrix product state) over x1..xn: core r has shape
/// bond[r] x bond[r+1] x 2 and reads x_{r+1}; bond[0] = bond[n] = 1.
struct tensor_train {
  semiring_id semiring = semiring_id::rational;
  std::size_t n = 0;
  std::vector<std::size_t> bond; ///< n+1 bond sizes
  std::vector<tt_core> cores;    ///< n cores

  /// Throws invariant_violation when bonds, core count, or entry ranges are
  /// inconsistent, or when a stored weight has the wrong semiring.
  void validate() const;
};

/// Left-to-right product of the bit-selected core slices; the 1x1 result.
value eval(const tensor_train& t, const assignment& a);

/// Largest bond size.
std::size_t bond_dimension(const tensor_train& t);

/// True iff every row slice (s, ., b) of every core has at most one nonzero
/// entry. Zero tests use tol on inexact semirings.
bool check_deterministic(const tensor_train& t, double tol = default_float_tol);

/// Layered decision-diagram view of the train: one node per (level, bond
/// index) and one weighted b-edge per nonzero core entry. Node count is the
/// sum of the bond sizes; edge count is the number of nonzero core entries.
evdd to_evdd(const tensor_train& t);

} // namespace pbkc
