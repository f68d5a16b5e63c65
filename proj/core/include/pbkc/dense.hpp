#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "pbkc/semiring.hpp"

namespace pbkc {

struct tensor_train;
struct evdd;
struct ttn;
struct circuit;

/// Total 0/1 valuation of the ordered variables x1..xn.
/// bits[r] is the value of x_{r+1}.
struct assignment {
  std::vector<std::uint8_t> bits;

  std::size_t size() const { return bits.size(); }
  int operator[](std::size_t r) const { return bits[r]; }

  /// Row index of this assignment in a truth table: x1 is the most
  /// significant bit.
  std::size_t index() const;

  /// Inverse of index() for n variables.
  static assignment from_index(std::size_t idx, std::size_t n);
};

/// Default cap on tabulated variable counts; override per call or via the
/// PBKC_MAX_VARS environment variable in the CLI.
inline constexpr std::size_t default_max_vars = 20;

/// Explicit truth table of a pseudo-Boolean function over x1..xn.
/// values has 2^n entries ordered by assignment::index().
struct dense_function {
  semiring_id semiring = semiring_id::rational;
  std::size_t n = 0;
  std::vector<value> values;

  const value& at(const assignment& a) const { return values.at(a.index()); }
};

/// Entrywise equality of two tables; tol applies on inexact semirings only.
/// Throws shape_mismatch if n differs and semiring_mismatch if the semirings
/// differ.
bool equal(const dense_function& f, const dense_function& g, double tol = default_float_tol);

/// Dense multiway array, row-major, used as the reference for contraction.
struct dense_tensor {
  semiring_id semiring = semiring_id::rational;
  std::vector<std::size_t> dims;
  std::vector<value> entries;

  std::size_t order() const { return dims.size(); }
  std::size_t size() const;
  std::size_t flat_index(const std::vector<std::size_t>& multi) const;
  const value& at(const std::vector<std::size_t>& multi) const;
  value& at(const std::vector<std::size_t>& multi);

  static dense_tensor zeros(semiring_id s, std::vector<std::size_t> dims);
};

/// Contraction of axis k of a with axis l of b (0-based axes). The result
/// dims are a.dims minus axis k followed by b.dims minus axis l; entry
/// [e1,e2] = sum_i a[e1 with i at k] * b[e2 with i at l].
dense_tensor contract(const dense_tensor& a, std::size_t k, const dense_tensor& b, std::size_t l);

/// Elementwise (Hadamard) product; dims must agree.
dense_tensor elementwise_product(const dense_tensor& a, const dense_tensor& b);

/// Tabulates an arbitrary evaluator over all 2^n assignments.
/// Throws too_many_variables when n > max_vars.
dense_function tabulate_with(semiring_id s, std::size_t n,
                             const std::function<value(const assignment&)>& eval_fn,
                             std::size_t max_vars = default_max_vars);

/// Truth tables of the concrete representations. Multi-output
/// representations take a 1-based output index.
dense_function tabulate(const tensor_train& t, std::size_t max_vars = default_max_vars);
dense_function tabulate(const evdd& g, std::size_t max_vars = default_max_vars);
dense_function tabulate(const ttn& t, std::size_t output, std::size_t max_vars = default_max_vars);
dense_function tabulate(const circuit& c, std::size_t output, std::size_t max_vars = default_max_vars);

} // namespace pbkc
