#pragma once

// Exact and floating-point scalar substrate.
//
// Every formula in the library is written once as a template over a scalar
// type T and instantiated either with Rational (exact, GMP-backed) or with
// double. Keeping the mode in the type means a single computation can never
// mix the two; the runtime Scalar wrapper enforces the same rule for code
// that only learns the mode at run time (the CLI).

#include <gmpxx.h>

#include <cmath>
#include <compare>
#include <concepts>
#include <cstdio>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace ripgf {

using BigInt = mpz_class;

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator.
class Rational {
 public:
  Rational() = default;
  Rational(long v) : q_(v) {}  // NOLINT(google-explicit-constructor)
  Rational(int v) : q_(v) {}   // NOLINT(google-explicit-constructor)
  explicit Rational(const BigInt& v) : q_(v) {}
  Rational(const BigInt& num, const BigInt& den) {
    if (den == 0) throw std::domain_error("Rational: zero denominator");
    q_.get_num() = num;
    q_.get_den() = den;
    q_.canonicalize();
  }
  explicit Rational(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }

  /// Accepts "a/b", an integer, or a finite decimal such as "0.125" or
  /// "-2.5" (read exactly as digits over a power of ten).
  static Rational parse(std::string_view text);

  BigInt numerator() const { return q_.get_num(); }
  BigInt denominator() const { return q_.get_den(); }
  const mpq_class& raw() const { return q_; }

  int sign() const { return sgn(q_); }
  bool is_zero() const { return sgn(q_) == 0; }
  double to_double() const { return q_.get_d(); }

  /// "num/den", or just "num" when the denominator is 1.
  std::string str() const {
    if (q_.get_den() == 1) return q_.get_num().get_str();
    return q_.get_num().get_str() + "/" + q_.get_den().get_str();
  }

  Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
  Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
  Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw std::domain_error("Rational: division by zero");
    q_ /= o.q_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.q_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return a.q_ == b.q_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const int c = cmp(a.q_, b.q_);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  mpq_class q_;
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

inline Rational Rational::parse(std::string_view text) {
  auto fail = [&] {
    return std::invalid_argument("malformed number '" + std::string(text) + "'");
  };
  if (text.empty()) throw fail();

  auto parse_int = [&](std::string_view s, bool allow_sign) -> BigInt {
    std::size_t pos = 0;
    bool neg = false;
    if (allow_sign && !s.empty() && (s[0] == '-' || s[0] == '+')) {
      neg = s[0] == '-';
      pos = 1;
    }
    if (pos == s.size()) throw fail();
    for (std::size_t i = pos; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') throw fail();
    BigInt v(std::string(s.substr(pos)), 10);
    return neg ? BigInt(-v) : v;
  };

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    BigInt num = parse_int(text.substr(0, slash), true);
    BigInt den = parse_int(text.substr(slash + 1), false);
    if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
  }

  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    bool neg = false;
    if (!whole.empty() && (whole[0] == '-' || whole[0] == '+')) {
      neg = whole[0] == '-';
      whole.remove_prefix(1);
    }
    if (whole.empty() && frac.empty()) throw fail();
    for (char c : whole) if (c < '0' || c > '9') throw fail();
    for (char c : frac) if (c < '0' || c > '9') throw fail();
    std::string digits = std::string(whole) + std::string(frac);
    BigInt num(digits.empty() ? std::string("0") : digits, 10);
    BigInt den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
    if (neg) num = -num;
    return Rational(num, den);
  }

  return Rational(parse_int(text, true));
}

/// Binomial coefficient C(n, k); zero when k > n.
inline BigInt binom(unsigned long n, unsigned long k) {
  BigInt r;
  if (k > n) return r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

/// Probability value in [0, 1], held exactly.
class Probability {
 public:
  Probability() = default;
  explicit Probability(Rational v) : v_(std::move(v)) {
    if (v_ < Rational(0) || v_ > Rational(1))
      throw std::invalid_argument("probability " + v_.str() + " outside [0, 1]");
  }
  static Probability parse(std::string_view text) { return Probability(Rational::parse(text)); }

  const Rational& value() const { return v_; }
  Rational complement() const { return Rational(1) - v_; }
  double to_double() const { return v_.to_double(); }

  friend bool operator==(const Probability&, const Probability&) = default;

 private:
  Rational v_;
};

// ---------------------------------------------------------------------------
// Scalar traits: the bridge that lets templated formulas construct constants.

template <class T>
struct scalar_traits;

template <>
struct scalar_traits<Rational> {
  static constexpr bool exact = true;
  static Rational from_rational(const Rational& r) { return r; }
  static Rational from_integer(const BigInt& v) { return Rational(v); }
  static Rational from_int(long v) { return Rational(v); }
  static double to_double(const Rational& r) { return r.to_double(); }
};

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static double from_rational(const Rational& r) { return r.to_double(); }
  static double from_integer(const BigInt& v) { return v.get_d(); }
  static double from_int(long v) { return static_cast<double>(v); }
  static double to_double(double d) { return d; }
};

template <class T>
concept ScalarField = requires(T a, T b) {
  { a + b } -> std::convertible_to<T>;
  { a - b } -> std::convertible_to<T>;
  { a * b } -> std::convertible_to<T>;
  { a / b } -> std::convertible_to<T>;
  { scalar_traits<T>::exact } -> std::convertible_to<bool>;
  { scalar_traits<T>::from_rational(Rational{}) } -> std::convertible_to<T>;
};

template <ScalarField T>
T from_int(long v) { return scalar_traits<T>::from_int(v); }

template <ScalarField T>
T binom_as(unsigned long n, unsigned long k) { return scalar_traits<T>::from_integer(binom(n, k)); }

template <ScalarField T>
double to_double(const T& v) { return scalar_traits<T>::to_double(v); }

/// base^e by repeated squaring, with 0^0 = 1.
template <ScalarField T>
T ipow(T base, std::uint64_t e) {
  T result = from_int<T>(1);
  while (e > 0) {
    if (e & 1U) result = result * base;
    e >>= 1U;
    if (e > 0) base = base * base;
  }
  return result;
}

inline Rational ipow(const Rational& base, std::uint64_t e) {
  if (e == 0) return Rational(1);
  BigInt num, den;
  mpz_pow_ui(num.get_mpz_t(), base.raw().get_num_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), base.raw().get_den_mpz_t(), e);
  return Rational(mpq_class(num, den));  // already coprime
}

inline double ipow(double base, std::uint64_t e) {
  if (e == 0) return 1.0;
  return std::pow(base, static_cast<double>(e));
}

/// Sign of v in {-1, 0, 1}.
template <ScalarField T>
int sign_of(const T& v) {
  if constexpr (std::is_same_v<T, Rational>) {
    return v.sign();
  } else {
    return (v > T{}) - (v < T{});
  }
}

// ---------------------------------------------------------------------------
// Runtime-mode scalar.

class ModeMismatch : public std::logic_error {
 public:
  ModeMismatch() : std::logic_error("mixed exact/float scalar arithmetic") {}
};

enum class Mode { Exact, Float };

/// A value that is either exact or floating point, chosen at run time.
/// Arithmetic between the two modes throws ModeMismatch.
class Scalar {
 public:
  Scalar() : v_(Rational(0)) {}
  Scalar(Rational r) : v_(std::move(r)) {}  // NOLINT(google-explicit-constructor)
  Scalar(double d) : v_(d) {}               // NOLINT(google-explicit-constructor)

  static Scalar in_mode(Mode mode, const Rational& r) {
    return mode == Mode::Exact ? Scalar(r) : Scalar(r.to_double());
  }

  Mode mode() const { return std::holds_alternative<Rational>(v_) ? Mode::Exact : Mode::Float; }
  bool is_exact() const { return mode() == Mode::Exact; }
  const Rational& exact() const { return std::get<Rational>(v_); }
  double value() const { return is_exact() ? exact().to_double() : std::get<double>(v_); }

  friend Scalar operator+(const Scalar& a, const Scalar& b) { return combine(a, b, [](auto x, auto y) { return x + y; }); }
  friend Scalar operator-(const Scalar& a, const Scalar& b) { return combine(a, b, [](auto x, auto y) { return x - y; }); }
  friend Scalar operator*(const Scalar& a, const Scalar& b) { return combine(a, b, [](auto x, auto y) { return x * y; }); }
  friend Scalar operator/(const Scalar& a, const Scalar& b) { return combine(a, b, [](auto x, auto y) { return x / y; }); }

  friend bool operator==(const Scalar& a, const Scalar& b) {
    if (a.mode() != b.mode()) throw ModeMismatch();
    return a.v_ == b.v_;
  }

  std::string str() const;

 private:
  template <class Op>
  static Scalar combine(const Scalar& a, const Scalar& b, Op op) {
    if (a.mode() != b.mode()) throw ModeMismatch();
    if (a.is_exact()) return Scalar(Rational(op(a.exact(), b.exact())));
    return Scalar(static_cast<double>(op(std::get<double>(a.v_), std::get<double>(b.v_))));
  }

  std::variant<Rational, double> v_;
};

/// Shortest faithful decimal rendering: 17 significant digits.
inline std::string format_decimal(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string Scalar::str() const {
  return is_exact() ? exact().str() : format_decimal(std::get<double>(v_));
}

inline Scalar ipow(const Scalar& base, std::uint64_t e) {
  if (base.is_exact()) return Scalar(ipow(base.exact(), e));
  return Scalar(ipow(base.value(), e));
}

}  // namespace ripgf
