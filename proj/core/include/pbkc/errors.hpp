#pragma once

#include <stdexcept>
#include <string>

namespace pbkc {

/// Base class for all library errors.
class error : public std::runtime_error {
public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Two values from different semirings were combined.
class semiring_mismatch : public error {
public:
  explicit semiring_mismatch(const std::string& what)
      : error("SemiringMismatch: " + what) {}
};

/// A nonzero tolerance was supplied for an exact semiring.
class nonzero_tolerance_on_exact_semiring : public error {
public:
  nonzero_tolerance_on_exact_semiring()
      : error("NonzeroToleranceOnExactSemiring: exact semirings require tolerance 0") {}
};

/// Tensor dimensions disagree for the requested operation.
class dim_mismatch : public error {
public:
  explicit dim_mismatch(const std::string& what) : error("DimMismatch: " + what) {}
};

/// Operand shapes disagree (variable counts, output counts, ...).
class shape_mismatch : public error {
public:
  explicit shape_mismatch(const std::string& what) : error("ShapeMismatch: " + what) {}
};

/// A tabulation would exceed the configured variable cap.
class too_many_variables : public error {
public:
  explicit too_many_variables(const std::string& what)
      : error("TooManyVariables: " + what) {}
};

/// A multi-output representation was queried without an output index.
class missing_output_index : public error {
public:
  explicit missing_output_index(const std::string& what)
      : error("MissingOutputIndex: " + what) {}
};

/// An evaluation touched a variable the assignment does not cover.
class unassigned_variable : public error {
public:
  explicit unassigned_variable(const std::string& what)
      : error("UnassignedVariable: " + what) {}
};

/// A circuit variable does not occur in the vtree.
class variable_not_in_vtree : public error {
public:
  explicit variable_not_in_vtree(const std::string& what)
      : error("VariableNotInVtree: " + what) {}
};

/// A circuit operation requiring structuredness was applied to an
/// unstructured circuit.
class not_structured : public error {
public:
  explicit not_structured(const std::string& what) : error("NotStructured: " + what) {}
};

/// An operation requiring an ordered diagram was applied to an unordered one.
class not_ordered : public error {
public:
  explicit not_ordered(const std::string& what) : error("NotOrdered: " + what) {}
};

/// Bit-string or value-list length disagrees with the variable count.
class length_mismatch : public error {
public:
  explicit length_mismatch(const std::string& what) : error("LengthMismatch: " + what) {}
};

/// A document could not be parsed.
class parse_error : public error {
public:
  explicit parse_error(const std::string& what) : error("ParseError: " + what) {}
};

/// A structural invariant of a representation is violated.
class invariant_violation : public error {
public:
  explicit invariant_violation(const std::string& what)
      : error("InvariantViolation: " + what) {}
};

/// The requested generator flavor is undefined for the requested kind.
class unsupported_flavor : public error {
public:
  explicit unsupported_flavor(const std::string& what)
      : error("UnsupportedFlavor: " + what) {}
};

/// The requested conversion pair has no defined construction.
class unsupported_conversion : public error {
public:
  explicit unsupported_conversion(const std::string& what)
      : error("UnsupportedConversion: " + what) {}
};

} // namespace pbkc
