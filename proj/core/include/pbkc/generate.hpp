#pragma once

#include <cstdint>
#include <string>

#include "pbkc/io.hpp"

namespace pbkc {

enum class gen_kind { tt, ttn, evdd, circuit, dense };
enum class gen_flavor { any, deterministic, decision };

/// Reproducible random-instance request. density is the expected fraction of
/// nonzero entries (weights, edges) in (0, 1].
struct generator_spec {
  gen_kind kind = gen_kind::tt;
  semiring_id semiring = semiring_id::rational;
  std::size_t n = 4;         ///< variable count
  std::size_t max_dim = 3;   ///< bond size / d(v) / nodes per level / gates per node
  double density = 1.0;
  gen_flavor flavor = gen_flavor::any;
  std::uint64_t seed = 0;
};

/// Draws one instance; equal specs give equal instances. Flavors:
/// deterministic tt = rows with at most one nonzero; deterministic evdd =
/// at most one edge per (node, bit); decision (and deterministic) ttn and
/// circuit follow the decision sparsity patterns. Throws unsupported_flavor
/// for kinds where the requested flavor has no defined shape.
document generate(const generator_spec& spec);

} // namespace pbkc
