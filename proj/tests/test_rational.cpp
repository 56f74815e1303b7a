#include <gtest/gtest.h>

#include <random>

#include "mistake_lab/errors.hpp"
#include "mistake_lab/rational.hpp"

using namespace mistake_lab;

TEST(Rational, ParsesFractionsDecimalsAndIntegers) {
  EXPECT_EQ(parse_rational("7/8"), Rational(7, 8));
  EXPECT_EQ(parse_rational("0.7"), Rational(7, 10));
  EXPECT_EQ(parse_rational("3"), Rational(3));
  EXPECT_EQ(parse_rational("-1/2"), Rational(-1, 2));
  EXPECT_EQ(parse_rational("4/8"), Rational(1, 2));
  EXPECT_EQ(parse_rational(".5"), Rational(1, 2));
}

TEST(Rational, RejectsMalformedInput) {
  EXPECT_THROW(parse_rational("1/0"), ParseError);
  EXPECT_THROW(parse_rational("abc"), ParseError);
  EXPECT_THROW(parse_rational(""), ParseError);
  EXPECT_THROW(parse_rational("1/2/3"), ParseError);
  EXPECT_THROW(parse_rational("."), ParseError);
}

TEST(Rational, RendersExactAndDecimal) {
  EXPECT_EQ(to_string(Rational(47, 16)), "47/16");
  EXPECT_EQ(to_string(Rational(5)), "5");
  EXPECT_EQ(render(Rational(47, 16)), "47/16 (2.9375)");
  EXPECT_EQ(render(Rational(131, 32)), "131/32 (4.09375)");
  EXPECT_EQ(to_decimal(Rational(1, 2)), "0.5");
}

TEST(Rational, FromDoubleIsExact) {
  EXPECT_EQ(from_double(0.375), Rational(3, 8));
  EXPECT_EQ(to_double(from_double(0.1)), 0.1);
  EXPECT_EQ(pow2_inverse(3), Rational(1, 8));
}

TEST(Rational, PrintedValuesRoundTrip) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    Rational v(static_cast<long>(rng() % 100000) - 50000, static_cast<unsigned long>(rng() % 4096 + 1));
    v.canonicalize();
    EXPECT_EQ(parse_rational(to_string(v)), v);
  }
}
