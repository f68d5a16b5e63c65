#pragma once

#include <iosfwd>
#include <string>
#include <variant>

#include "pbkc/circuit.hpp"
#include "pbkc/dense.hpp"
#include "pbkc/evdd.hpp"
#include "pbkc/semiring.hpp"
#include "pbkc/tensor_train.hpp"
#include "pbkc/ttn.hpp"

namespace pbkc {

/// Any of the five on-disk representations, tagged by the file's "kind".
struct document {
  std::variant<tensor_train, ttn, evdd, circuit, dense_function> rep;

  const char* kind() const;
  semiring_id semiring() const;
  /// Variable count of the payload.
  std::size_t var_count() const;
  /// Number of represented functions (1 for single-output kinds).
  std::size_t output_count() const;
};

/// Parses and validates a document. Throws parse_error on malformed input
/// and invariant_violation when the payload breaks its representation's
/// invariants.
document load(std::istream& in);
document load_file(const std::string& path);

/// Serializes a document; load(save(d)) reproduces d.
void save(const document& d, std::ostream& out);
void save_file(const document& d, const std::string& path);

/// Weight syntax shared by all kinds: boolean true/false; integer decimal
/// strings; rational "p/q" (or "p"); float64 numbers; complex [re, im].
value value_from_json_text(const std::string& text, semiring_id s);

} // namespace pbkc
