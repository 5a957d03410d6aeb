#pragma once

#include <gmpxx.h>

#include <compare>
#include <concepts>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hetprice {

// Exact rational scalar. Every price, expenditure, quantity and cost in the
// library is a Rational so weak versus strict comparisons never depend on a
// tolerance.
class Rational {
 public:
  Rational() = default;
  template <std::integral I>
  Rational(I v) : v_(static_cast<long>(v)) {}  // NOLINT(google-explicit-constructor)
  Rational(long num, long den);
  explicit Rational(mpq_class v);

  // Accepts "12", "-0.25", "1.5e-3" and "p/q". Throws SchemaError otherwise.
  static Rational parse(std::string_view text);
  // Exact value of the binary double.
  static Rational from_double(double d);
  // Shortest decimal that round-trips to d, read exactly. Rejects NaN/inf.
  static Rational from_decimal_double(double d);
  static Rational pow2(int exponent);
  static Rational pow(const Rational& base, unsigned exponent);

  const mpq_class& get() const { return v_; }

  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  Rational operator-() const;

  friend bool operator==(const Rational& a, const Rational& b);
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

  int sign() const { return sgn(v_); }
  bool is_zero() const { return sign() == 0; }
  bool is_positive() const { return sign() > 0; }
  Rational abs() const;
  Rational inverse() const;
  double to_double() const { return v_.get_d(); }

  // Decimal text when the denominator divides a power of ten, "p/q" otherwise.
  // parse(to_string()) == *this always holds.
  std::string to_string() const;
  bool is_finite_decimal() const;
  // Number of significant bits in numerator plus denominator.
  std::size_t bit_size() const;

 private:
  mpq_class v_;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

using RationalVector = std::vector<Rational>;

Rational dot(std::span<const Rational> a, std::span<const Rational> b);
Rational sum(std::span<const Rational> a);
Rational min_of(std::span<const Rational> a);
Rational max_of(std::span<const Rational> a);

// Largest power of two strictly below bound, capped at 1/2. bound must be > 0.
Rational dyadic_below(const Rational& bound);

}  // namespace hetprice
