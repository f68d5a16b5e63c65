#include <doctest.h>

#include "pbkc/semiring.hpp"

using namespace pbkc;

TEST_CASE("identities per semiring") {
  for (semiring_id s : {semiring_id::boolean, semiring_id::integer,
                        semiring_id::rational, semiring_id::float64,
                        semiring_id::complex128}) {
    CAPTURE(semiring_name(s));
    value z = zero(s), o = one(s);
    CHECK(z.semiring() == s);
    CHECK(o.semiring() == s);
    CHECK(is_zero(z));
    CHECK_FALSE(is_zero(o));
    CHECK(add(z, o) == o);
    CHECK(add(o, z) == o);
    CHECK(mul(o, o) == o);
    CHECK(mul(z, o) == z);
  }
}

TEST_CASE("boolean semiring is or/and") {
  value t(true), f(false);
  CHECK(add(t, t) == t); // saturating, not xor
  CHECK(add(t, f) == t);
  CHECK(mul(t, f) == f);
  CHECK(mul(t, t) == t);
}

TEST_CASE("integer and rational arithmetic is exact") {
  value a(mpz_class("123456789012345678901234567890"));
  value b(mpz_class(2));
  CHECK(to_string(mul(a, b)) == "246913578024691357802469135780");

  value q1(mpq_class(1, 3)), q2(mpq_class(1, 6));
  CHECK(to_string(add(q1, q2)) == "1/2");
  CHECK(to_string(mul(q1, q2)) == "1/18");
}

TEST_CASE("rationals canonicalize on construction") {
  value q(mpq_class(2, 4));
  CHECK(to_string(q) == "1/2");
  CHECK(q == value(mpq_class(1, 2)));
  value neg(mpq_class(3, -6)); // sign moves to the numerator
  CHECK(to_string(neg) == "-1/2");
}

TEST_CASE("rational printing drops a unit denominator") {
  CHECK(to_string(value(mpq_class(6, 2))) == "3");
  CHECK(to_string(value(mpq_class(-14, 7))) == "-2");
  CHECK(to_string(value(mpq_class(3, 2))) == "3/2");
}

TEST_CASE("float and complex use tolerance in is_zero") {
  CHECK(is_zero(value(1e-12), 1e-9));
  CHECK_FALSE(is_zero(value(1e-6), 1e-9));
  CHECK(is_zero(value(std::complex<double>(1e-12, -1e-12)), 1e-9));
  CHECK_FALSE(is_zero(value(std::complex<double>(0.0, 1e-3)), 1e-9));
}

TEST_CASE("nonzero tolerance is rejected on exact semirings") {
  CHECK_THROWS_AS(is_zero(value(mpq_class(1, 2)), 1e-9),
                  nonzero_tolerance_on_exact_semiring);
  CHECK_THROWS_AS(is_zero(value(mpz_class(1)), 1e-9),
                  nonzero_tolerance_on_exact_semiring);
  CHECK_THROWS_AS(is_zero(value(true), 1e-9),
                  nonzero_tolerance_on_exact_semiring);
  CHECK_NOTHROW(is_zero(value(mpq_class(1, 2)), 0.0));
}

TEST_CASE("effective_tol zeroes the tolerance exactly on exact semirings") {
  CHECK(effective_tol(semiring_id::rational, 1e-9) == 0.0);
  CHECK(effective_tol(semiring_id::boolean, 1.0) == 0.0);
  CHECK(effective_tol(semiring_id::float64, 1e-9) == 1e-9);
  CHECK(effective_tol(semiring_id::complex128, 1e-3) == 1e-3);
}

TEST_CASE("approx_equal") {
  CHECK(approx_equal(value(1.0), value(1.0 + 1e-12), 1e-9));
  CHECK_FALSE(approx_equal(value(1.0), value(1.1), 1e-9));
  CHECK(approx_equal(value(mpq_class(1, 3)), value(mpq_class(2, 6)), 0.0));
  CHECK_FALSE(approx_equal(value(mpq_class(1, 3)), value(mpq_class(1, 4)), 0.0));
  CHECK(approx_equal(value(std::complex<double>(1, 2)),
                     value(std::complex<double>(1, 2 + 1e-12)), 1e-9));
}

TEST_CASE("mixing semirings throws") {
  CHECK_THROWS_AS(add(value(1.0), value(mpz_class(1))), semiring_mismatch);
  CHECK_THROWS_AS(mul(value(true), value(0.5)), semiring_mismatch);
}

TEST_CASE("semiring names round-trip") {
  for (semiring_id s : {semiring_id::boolean, semiring_id::integer,
                        semiring_id::rational, semiring_id::float64,
                        semiring_id::complex128})
    CHECK(semiring_from_name(semiring_name(s)) == s);
  CHECK_THROWS_AS(semiring_from_name("galois"), parse_error);
}

TEST_CASE("value variant index matches the semiring tag") {
  CHECK(value(true).semiring() == semiring_id::boolean);
  CHECK(value(mpz_class(3)).semiring() == semiring_id::integer);
  CHECK(value(mpq_class(1, 2)).semiring() == semiring_id::rational);
  CHECK(value(0.5).semiring() == semiring_id::float64);
  CHECK(value(std::complex<double>(0, 1)).semiring() == semiring_id::complex128);
}
