#pragma once

// Generators for property-style tests.

#include <ripgf/numeric.hpp>

#include <random>

namespace ripgf::fixtures {

/// Uniform numerator in [-bound, bound] over a denominator in [1, bound].
inline Rational random_rational(std::mt19937_64& rng, long bound) {
  std::uniform_int_distribution<long> num(-bound, bound), den(1, bound);
  return Rational(BigInt(num(rng)), BigInt(den(rng)));
}

inline Rational random_nonzero_rational(std::mt19937_64& rng, long bound) {
  for (;;) {
    Rational r = random_rational(rng, bound);
    if (!r.is_zero()) return r;
  }
}

/// Probability a/b with 1 <= b <= bound.
inline Rational random_probability(std::mt19937_64& rng, long bound) {
  std::uniform_int_distribution<long> den(1, bound);
  const long b = den(rng);
  std::uniform_int_distribution<long> num(0, b);
  return Rational(BigInt(num(rng)), BigInt(b));
}

}  // namespace ripgf::fixtures
