#include "pbkc/semiring.hpp"

#include <cmath>
#include <sstream>

namespace pbkc {

const char* semiring_name(semiring_id s) {
  switch (s) {
  case semiring_id::boolean: return "boolean";
  case semiring_id::integer: return "integer";
  case semiring_id::rational: return "rational";
  case semiring_id::float64: return "float64";
  case semiring_id::complex128: return "complex128";
  }
  return "?";
}

semiring_id semiring_from_name(const std::string& name) {
  if (name == "boolean") return semiring_id::boolean;
  if (name == "integer") return semiring_id::integer;
  if (name == "rational") return semiring_id::rational;
  if (name == "float64") return semiring_id::float64;
  if (name == "complex128") return semiring_id::complex128;
  throw parse_error("unknown semiring \"" + name + "\"");
}

value zero(semiring_id s) {
  switch (s) {
  case semiring_id::boolean: return value(false);
  case semiring_id::integer: return value(mpz_class(0));
  case semiring_id::rational: return value(mpq_class(0));
  case semiring_id::float64: return value(0.0);
  case semiring_id::complex128: return value(std::complex<double>(0.0, 0.0));
  }
  throw error("bad semiring tag");
}

value one(semiring_id s) {
  switch (s) {
  case semiring_id::boolean: return value(true);
  case semiring_id::integer: return value(mpz_class(1));
  case semiring_id::rational: return value(mpq_class(1));
  case semiring_id::float64: return value(1.0);
  case semiring_id::complex128: return value(std::complex<double>(1.0, 0.0));
  }
  throw error("bad semiring tag");
}

namespace {

void require_same(const value& a, const value& b, const char* op) {
  if (a.semiring() != b.semiring())
    throw semiring_mismatch(std::string(op) + " over " +
                            semiring_name(a.semiring()) + " and " +
                            semiring_name(b.semiring()));
}

} // namespace

value add(const value& a, const value& b) {
  require_same(a, b, "add");
  switch (a.semiring()) {
  case semiring_id::boolean: return value(a.as_bool() || b.as_bool());
  case semiring_id::integer: return value(mpz_class(a.as_int() + b.as_int()));
  case semiring_id::rational: return value(mpq_class(a.as_rat() + b.as_rat()));
  case semiring_id::float64: return value(a.as_float() + b.as_float());
  case semiring_id::complex128: return value(a.as_complex() + b.as_complex());
  }
  throw error("bad semiring tag");
}

value mul(const value& a, const value& b) {
  require_same(a, b, "mul");
  switch (a.semiring()) {
  case semiring_id::boolean: return value(a.as_bool() && b.as_bool());
  case semiring_id::integer: return value(mpz_class(a.as_int() * b.as_int()));
  case semiring_id::rational: return value(mpq_class(a.as_rat() * b.as_rat()));
  case semiring_id::float64: return value(a.as_float() * b.as_float());
  case semiring_id::complex128: return value(a.as_complex() * b.as_complex());
  }
  throw error("bad semiring tag");
}

bool is_zero(const value& a, double tol) {
  if (is_exact(a.semiring())) {
    if (tol != 0.0) throw nonzero_tolerance_on_exact_semiring();
    switch (a.semiring()) {
    case semiring_id::boolean: return !a.as_bool();
    case semiring_id::integer: return a.as_int() == 0;
    case semiring_id::rational: return a.as_rat() == 0;
    default: break;
    }
  }
  if (a.semiring() == semiring_id::float64) return std::abs(a.as_float()) <= tol;
  return std::abs(a.as_complex()) <= tol;
}

bool approx_equal(const value& a, const value& b, double tol) {
  require_same(a, b, "compare");
  switch (a.semiring()) {
  case semiring_id::float64: return std::abs(a.as_float() - b.as_float()) <= tol;
  case semiring_id::complex128: return std::abs(a.as_complex() - b.as_complex()) <= tol;
  default: return a == b;
  }
}

std::string to_string(const value& a) {
  switch (a.semiring()) {
  case semiring_id::boolean: return a.as_bool() ? "true" : "false";
  case semiring_id::integer: return a.as_int().get_str();
  case semiring_id::rational: {
    const mpq_class& q = a.as_rat();
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_str();
  }
  case semiring_id::float64: {
    std::ostringstream os;
    os.precision(17);
    os << a.as_float();
    return os.str();
  }
  case semiring_id::complex128: {
    std::ostringstream os;
    os.precision(17);
    os << a.as_complex().real() << (a.as_complex().imag() < 0 ? "" : "+")
       << a.as_complex().imag() << "i";
    return os.str();
  }
  }
  return "?";
}

} // namespace pbkc
