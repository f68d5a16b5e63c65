#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <variant>

#include <gmpxx.h>

#include "pbkc/errors.hpp"

namespace pbkc {

/// The five supported commutative semirings.
enum class semiring_id : std::uint8_t {
  boolean,    ///< ({0,1}, or, and)
  integer,    ///< (Z, +, *), arbitrary precision
  rational,   ///< (Q, +, *), arbitrary precision, stored normalized
  float64,    ///< (double, +, *)
  complex128, ///< (complex<double>, +, *)
};

const char* semiring_name(semiring_id s);
semiring_id semiring_from_name(const std::string& name);

/// True for semirings whose arithmetic is exact (no rounding).
constexpr bool is_exact(semiring_id s) {
  return s == semiring_id::boolean || s == semiring_id::integer ||
         s == semiring_id::rational;
}

/// A scalar tagged with its semiring. The variant index is the semiring id.
class value {
public:
  value() : v_(false) {}
  explicit value(bool b) : v_(b) {}
  explicit value(mpz_class z) : v_(std::move(z)) {}
  explicit value(mpq_class q) : v_(std::move(q)) {
    std::get<mpq_class>(v_).canonicalize();
  }
  explicit value(double d) : v_(d) {}
  explicit value(std::complex<double> c) : v_(c) {}

  semiring_id semiring() const { return static_cast<semiring_id>(v_.index()); }

  bool as_bool() const { return std::get<bool>(v_); }
  const mpz_class& as_int() const { return std::get<mpz_class>(v_); }
  const mpq_class& as_rat() const { return std::get<mpq_class>(v_); }
  double as_float() const { return std::get<double>(v_); }
  std::complex<double> as_complex() const { return std::get<std::complex<double>>(v_); }

  bool operator==(const value& o) const { return v_ == o.v_; }
  bool operator!=(const value& o) const { return !(*this == o); }

private:
  std::variant<bool, mpz_class, mpq_class, double, std::complex<double>> v_;
};

/// Additive identity of the semiring.
value zero(semiring_id s);
/// Multiplicative identity of the semiring.
value one(semiring_id s);

/// Semiring addition. Throws semiring_mismatch if the tags differ.
value add(const value& a, const value& b);
/// Semiring multiplication. Throws semiring_mismatch if the tags differ.
value mul(const value& a, const value& b);

/// Zero test. Exact semirings require tol == 0 (throws
/// nonzero_tolerance_on_exact_semiring otherwise); float64 compares |a| <= tol
/// and complex128 compares the magnitude.
bool is_zero(const value& a, double tol = 0.0);

/// Equality up to tol on the inexact semirings, exact equality otherwise.
bool approx_equal(const value& a, const value& b, double tol);

/// Human-readable form, also used by the CLI. Rationals print as "p/q",
/// or plain "p" when the denominator is 1.
std::string to_string(const value& a);

/// Default zero tolerance used by float64/complex128 checks.
inline constexpr double default_float_tol = 1e-9;

/// The tolerance actually applied for a semiring: tol for inexact semirings,
/// 0 for exact ones (where any nonzero tol would be rejected).
inline double effective_tol(semiring_id s, double tol = default_float_tol) {
  return is_exact(s) ? 0.0 : tol;
}

} // namespace pbkc
