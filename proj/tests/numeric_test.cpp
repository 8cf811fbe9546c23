#include <ripgf/numeric.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracle.hpp"
#include "random_values.hpp"

using ripgf::BigInt;
using ripgf::binom;
using ripgf::ipow;
using ripgf::Probability;
using ripgf::Rational;
using ripgf::Scalar;

TEST(Binom, SmallValues) {
  EXPECT_EQ(binom(5, 0), 1);
  EXPECT_EQ(binom(5, 2), 10);
  EXPECT_EQ(binom(3, 7), 0);
  EXPECT_EQ(binom(0, 0), 1);
}

TEST(Binom, LargeValueMatchesPascal) {
  const BigInt expected("50445672272782096667406248628");
  EXPECT_EQ(binom(99, 50), expected);
  EXPECT_EQ(ripgf::oracle::pascal_binom(99, 50), expected);
  EXPECT_EQ(expected.get_str().size(), 29U);
}

TEST(Binom, SymmetryAndPascalIdentity) {
  for (unsigned long n = 1; n <= 64; ++n) {
    for (unsigned long k = 0; k <= n; ++k) {
      EXPECT_EQ(binom(n, k), binom(n, n - k));
      if (k >= 1) {
        EXPECT_EQ(binom(n, k), binom(n - 1, k - 1) + binom(n - 1, k));
      }
    }
  }
}

TEST(Ipow, Conventions) {
  EXPECT_EQ(ipow(Rational(0), 0), Rational(1));
  EXPECT_EQ(ipow(Rational::parse("1/2"), 3), Rational::parse("1/8"));
  EXPECT_EQ(ipow(Rational::parse("3/4"), 2), Rational::parse("9/16"));
  EXPECT_EQ(ipow(0.0, 0), 1.0);
  EXPECT_EQ(ipow(Scalar(Rational(0)), 0), Scalar(Rational(1)));
  EXPECT_EQ(ipow(Rational(-2), 3), Rational(-8));
  // Generic square-and-multiply path.
  EXPECT_EQ(ripgf::ipow<double>(1.5, 4), 5.0625);
}

TEST(Rational, ParseForms) {
  EXPECT_EQ(Rational::parse("3/6").str(), "1/2");
  EXPECT_EQ(Rational::parse("-4/8").str(), "-1/2");
  EXPECT_EQ(Rational::parse("0.125"), Rational::parse("1/8"));
  EXPECT_EQ(Rational::parse("1.0"), Rational(1));
  EXPECT_EQ(Rational::parse(".5"), Rational::parse("1/2"));
  EXPECT_EQ(Rational::parse("7"), Rational(7));
  EXPECT_EQ(Rational::parse("0.1") * Rational(10), Rational(1));
}

TEST(Rational, ParseRejectsMalformed) {
  for (const char* bad : {"", "abc", "1/0", "1/", "/2", "1.2.3", "0x10", "1e-3", "--1", ".", "1/-2"})
    EXPECT_THROW(Rational::parse(bad), std::invalid_argument) << bad;
}

TEST(Rational, AlwaysNormalized) {
  const Rational r(BigInt(-6), BigInt(-4));
  EXPECT_EQ(r.numerator(), 3);
  EXPECT_EQ(r.denominator(), 2);
  EXPECT_THROW(Rational(BigInt(1), BigInt(0)), std::domain_error);
  EXPECT_THROW(Rational(1) / Rational(0), std::domain_error);
}

TEST(Rational, FieldAxiomsOnRandomSamples) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const Rational a = ripgf::fixtures::random_rational(rng, 1000);
    const Rational b = ripgf::fixtures::random_rational(rng, 1000);
    const Rational c = ripgf::fixtures::random_rational(rng, 1000);
    EXPECT_EQ((a + b) + c, a + (b + c));
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_EQ(a + b, b + a);
    EXPECT_EQ(a - a, Rational(0));
    if (!a.is_zero()) {
      EXPECT_EQ(a * (Rational(1) / a), Rational(1));
    }
    EXPECT_GT(a.denominator(), 0);
    EXPECT_EQ(gcd(a.numerator(), a.denominator()) == 1 || a.is_zero(), true);
  }
}

TEST(Probability, RangeEnforced) {
  EXPECT_NO_THROW(Probability::parse("0"));
  EXPECT_NO_THROW(Probability::parse("1"));
  EXPECT_NO_THROW(Probability::parse("2/3"));
  EXPECT_THROW(Probability::parse("-1/3"), std::invalid_argument);
  EXPECT_THROW(Probability::parse("1.0001"), std::invalid_argument);
  EXPECT_EQ(Probability::parse("0.25").complement(), Rational::parse("3/4"));
}

TEST(Scalar, MixedModeRejected) {
  const Scalar exact(Rational::parse("1/2"));
  const Scalar flt(0.5);
  EXPECT_THROW(exact + flt, ripgf::ModeMismatch);
  EXPECT_THROW(flt * exact, ripgf::ModeMismatch);
  EXPECT_THROW((void)(exact == flt), ripgf::ModeMismatch);
  EXPECT_EQ(exact + exact, Scalar(Rational(1)));
  EXPECT_DOUBLE_EQ((flt + flt).value(), 1.0);
  EXPECT_EQ(Scalar::in_mode(ripgf::Mode::Float, Rational::parse("1/4")).mode(), ripgf::Mode::Float);
  EXPECT_EQ((exact / Scalar(Rational(3))).str(), "1/6");
}

TEST(Scalar, ExactAgreesWithFloat) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Rational a = ripgf::fixtures::random_rational(rng, 50);
    const Rational b = ripgf::fixtures::random_rational(rng, 50);
    const Scalar exact = ipow(Scalar(a), 5) * Scalar(b) - Scalar(a);
    const Scalar flt = ipow(Scalar(a.to_double()), 5) * Scalar(b.to_double()) - Scalar(a.to_double());
    const double scale = std::max(1.0, std::abs(exact.value()));
    EXPECT_LE(std::abs(exact.value() - flt.value()) / scale, 1e-9);
  }
}

TEST(FormatDecimal, SeventeenSignificantDigits) {
  EXPECT_EQ(ripgf::format_decimal(0.12109375), "0.12109375");
  EXPECT_EQ(ripgf::format_decimal(0.1), "0.10000000000000001");
  EXPECT_EQ(ripgf::format_decimal(1.0), "1");
}
