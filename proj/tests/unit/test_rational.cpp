#include <doctest.h>

#include <limits>

#include "fairstream/rational.hpp"

using fairstream::ArithmeticOverflow;
using fairstream::Ratio;
using fairstream::Rational;

TEST_CASE("rational normalizes sign and gcd") {
  Rational r(6, -4);
  CHECK(r.num() == -3);
  CHECK(r.den() == 2);
  CHECK(Rational(0, 7) == Rational(0));
  CHECK(Rational(10).str() == "10/1");
  CHECK(r.str() == "-3/2");
  CHECK_THROWS(Rational(1, 0));
}

TEST_CASE("rational arithmetic and order") {
  Rational a(1, 3);
  Rational b(1, 6);
  CHECK(a + b == Rational(1, 2));
  CHECK(a - b == b);
  CHECK(a * b == Rational(1, 18));
  CHECK(a / b == Rational(2));
  CHECK(b < a);
  CHECK(-a < b);
  CHECK_THROWS(a / Rational(0));
}

TEST_CASE("rational parse") {
  CHECK(Rational::parse("3/9") == Rational(1, 3));
  CHECK(Rational::parse("-4") == Rational(-4));
  CHECK(Rational::parse("0.05") == Rational(1, 20));
  CHECK(Rational::parse("1.5") == Rational(3, 2));
  CHECK_THROWS(Rational::parse("abc"));
  CHECK_THROWS(Rational::parse("1/0"));
  CHECK_THROWS(Rational::parse(""));
}

TEST_CASE("rational overflow is detected") {
  Rational big(std::numeric_limits<std::int64_t>::max());
  CHECK_THROWS_AS(big + Rational(1), ArithmeticOverflow);
  CHECK_THROWS_AS(big * Rational(2), ArithmeticOverflow);
  // Intermediate products may exceed 64 bits when the result fits.
  Rational x(std::int64_t{1} << 40, 3);
  CHECK(x * Rational(3, std::int64_t{1} << 40) == Rational(1));
}

TEST_CASE("ratio zero-denominator policy") {
  CHECK(Ratio::of(0, 0) == Ratio(1));
  CHECK(Ratio::of(5, 0).is_infinite());
  CHECK(Ratio::of(3, 6) == Ratio(Rational(1, 2)));
  CHECK(Ratio(7) < Ratio::infinity());
  CHECK(Ratio::infinity() == Ratio::infinity());
  CHECK(Ratio::infinity().str() == "inf");
  CHECK(Ratio::parse("inf").is_infinite());
  CHECK(Ratio::parse("2/4") == Ratio(Rational(1, 2)));
  CHECK(min(Ratio(2), Ratio::infinity()) == Ratio(2));
  CHECK(max(Ratio(2), Ratio::infinity()).is_infinite());
  CHECK_THROWS(Ratio::infinity().value());
}
