#include "hetprice/rational.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "hetprice/errors.hpp"

namespace hetprice {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

mpz_class pow10(unsigned long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
  return r;
}

constexpr long kMaxDecimalExponent = 4096;

}  // namespace

Rational::Rational(long num, long den) : v_(num, den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  v_.canonicalize();
}

Rational::Rational(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }

Rational Rational::parse(std::string_view text) {
  auto fail = [&]() -> Rational {
    throw SchemaError("not an exact decimal or rational literal: \"" + std::string(text) + "\"");
  };
  if (text.empty()) return fail();

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::string_view num = text.substr(0, slash);
    std::string_view den = text.substr(slash + 1);
    bool neg = !num.empty() && num.front() == '-';
    if (neg) num.remove_prefix(1);
    if (!all_digits(num) || !all_digits(den)) return fail();
    mpz_class n(std::string(num), 10), d(std::string(den), 10);
    if (d == 0) return fail();
    mpq_class q(neg ? mpz_class(-n) : n, d);
    q.canonicalize();
    return Rational(q);
  }

  std::string_view s = text;
  bool neg = false;
  if (s.front() == '+' || s.front() == '-') {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_text = s.substr(e + 1);
    s = s.substr(0, e);
    bool exp_neg = false;
    if (!exp_text.empty() && (exp_text.front() == '+' || exp_text.front() == '-')) {
      exp_neg = exp_text.front() == '-';
      exp_text.remove_prefix(1);
    }
    if (!all_digits(exp_text) || exp_text.size() > 6) return fail();
    exponent = std::stol(std::string(exp_text));
    if (exp_neg) exponent = -exponent;
  }
  std::string_view int_part = s;
  std::string_view frac_part;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    int_part = s.substr(0, dot);
    frac_part = s.substr(dot + 1);
    if (!frac_part.empty() && !all_digits(frac_part)) return fail();
  }
  if (int_part.empty() && frac_part.empty()) return fail();
  if (!int_part.empty() && !all_digits(int_part)) return fail();

  std::string digits = std::string(int_part) + std::string(frac_part);
  exponent -= static_cast<long>(frac_part.size());
  if (exponent > kMaxDecimalExponent || exponent < -kMaxDecimalExponent) return fail();
  mpz_class mant(digits.empty() ? std::string("0") : digits, 10);
  if (neg) mant = -mant;
  mpq_class q;
  if (exponent >= 0) {
    q = mpq_class(mant * pow10(static_cast<unsigned long>(exponent)));
  } else {
    q = mpq_class(mant, pow10(static_cast<unsigned long>(-exponent)));
  }
  q.canonicalize();
  return Rational(q);
}

Rational Rational::from_double(double d) {
  if (!std::isfinite(d)) throw SchemaError("non-finite number");
  mpq_class q(d);
  return Rational(q);
}

Rational Rational::from_decimal_double(double d) {
  if (!std::isfinite(d)) throw SchemaError("non-finite number");
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), d);
  return parse(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
}

Rational Rational::pow2(int exponent) {
  mpz_class p = 1;
  unsigned long e = static_cast<unsigned long>(exponent < 0 ? -exponent : exponent);
  mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), e);
  return exponent >= 0 ? Rational(mpq_class(p)) : Rational(mpq_class(mpz_class(1), p));
}

Rational Rational::pow(const Rational& base, unsigned exponent) {
  mpz_class n, d;
  mpz_pow_ui(n.get_mpz_t(), base.v_.get_num_mpz_t(), exponent);
  mpz_pow_ui(d.get_mpz_t(), base.v_.get_den_mpz_t(), exponent);
  return Rational(mpq_class(n, d));
}

Rational& Rational::operator+=(const Rational& o) {
  v_ += o.v_;
  return *this;
}
Rational& Rational::operator-=(const Rational& o) {
  v_ -= o.v_;
  return *this;
}
Rational& Rational::operator*=(const Rational& o) {
  v_ *= o.v_;
  return *this;
}
Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw DomainError("division by zero");
  v_ /= o.v_;
  return *this;
}

Rational Rational::operator-() const {
  mpq_class r = -v_;
  return Rational(r);
}

bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  int c = cmp(a.v_, b.v_);
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

Rational Rational::abs() const {
  mpq_class r = ::abs(v_);
  return Rational(r);
}

Rational Rational::inverse() const {
  if (is_zero()) throw DomainError("inverse of zero");
  mpq_class r = 1 / v_;
  return Rational(r);
}

bool Rational::is_finite_decimal() const {
  mpz_class d = v_.get_den();
  while (mpz_divisible_ui_p(d.get_mpz_t(), 2)) d /= 2;
  while (mpz_divisible_ui_p(d.get_mpz_t(), 5)) d /= 5;
  return d == 1;
}

std::string Rational::to_string() const {
  if (v_.get_den() == 1) return v_.get_num().get_str();
  if (!is_finite_decimal()) return v_.get_str();
  mpz_class d = v_.get_den();
  unsigned long twos = 0, fives = 0;
  while (mpz_divisible_ui_p(d.get_mpz_t(), 2)) {
    d /= 2;
    ++twos;
  }
  while (mpz_divisible_ui_p(d.get_mpz_t(), 5)) {
    d /= 5;
    ++fives;
  }
  unsigned long places = std::max(twos, fives);
  mpz_class scaled = v_.get_num() * pow10(places) / v_.get_den();
  bool neg = scaled < 0;
  std::string digits = mpz_class(::abs(scaled)).get_str();
  if (digits.size() <= places) digits.insert(0, places + 1 - digits.size(), '0');
  digits.insert(digits.size() - places, ".");
  return neg ? "-" + digits : digits;
}

std::size_t Rational::bit_size() const {
  return mpz_sizeinbase(v_.get_num_mpz_t(), 2) + mpz_sizeinbase(v_.get_den_mpz_t(), 2);
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

Rational dot(std::span<const Rational> a, std::span<const Rational> b) {
  if (a.size() != b.size()) throw DomainError("dot product of vectors with different lengths");
  mpq_class acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i].get() * b[i].get();
  return Rational(acc);
}

Rational sum(std::span<const Rational> a) {
  mpq_class acc = 0;
  for (const auto& x : a) acc += x.get();
  return Rational(acc);
}

Rational min_of(std::span<const Rational> a) {
  if (a.empty()) throw DomainError("min of empty range");
  const Rational* best = &a[0];
  for (const auto& x : a) {
    if (x < *best) best = &x;
  }
  return *best;
}

Rational max_of(std::span<const Rational> a) {
  if (a.empty()) throw DomainError("max of empty range");
  const Rational* best = &a[0];
  for (const auto& x : a) {
    if (x > *best) best = &x;
  }
  return *best;
}

Rational dyadic_below(const Rational& bound) {
  if (!bound.is_positive()) throw DomainError("dyadic_below needs a positive bound");
  int k = 1;
  Rational candidate(1, 2);
  while (candidate >= bound) {
    ++k;
    candidate = Rational::pow2(-k);
  }
  return candidate;
}

}  // namespace hetprice
