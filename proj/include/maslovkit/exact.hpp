#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace maslovkit {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

Rational make_rational(std::int64_t num, std::int64_t den = 1);
double to_double(const Rational& r);
Integer floor_rational(const Rational& r);
Integer ceil_rational(const Rational& r);
std::string to_string(const Rational& r);

/// Element p + q*sqrt(d) of the real quadratic field Q(sqrt d).
///
/// d is a positive squarefree integer, or 1 for plain rationals (q is then
/// folded into p). Mixing two different radicands throws std::domain_error;
/// every ellipsoid in this toolkit draws its squared radii from one field,
/// so sums over orbits stay inside it.
class QuadNumber {
 public:
  QuadNumber() = default;
  QuadNumber(Rational p);  // NOLINT(google-explicit-constructor)
  QuadNumber(Rational p, Rational q, std::int64_t d);

  static QuadNumber from_int(std::int64_t v) { return QuadNumber(Rational(v)); }

  const Rational& rational_part() const { return p_; }
  const Rational& radical_part() const { return q_; }
  std::int64_t radicand() const { return d_; }
  bool is_rational() const { return q_ == 0; }

  double to_double() const;
  int sign() const;
  Integer floor() const;
  Integer ceil() const;  // E(a) = min{k in Z | k >= a}
  bool is_integer() const { return is_rational() && ceil_rational(p_) == floor_rational(p_); }

  QuadNumber operator-() const { return {-p_, -q_, d_}; }
  QuadNumber& operator+=(const QuadNumber& o);
  QuadNumber& operator-=(const QuadNumber& o);
  QuadNumber& operator*=(const QuadNumber& o);
  QuadNumber& operator/=(const QuadNumber& o);

  friend QuadNumber operator+(QuadNumber a, const QuadNumber& b) { return a += b; }
  friend QuadNumber operator-(QuadNumber a, const QuadNumber& b) { return a -= b; }
  friend QuadNumber operator*(QuadNumber a, const QuadNumber& b) { return a *= b; }
  friend QuadNumber operator/(QuadNumber a, const QuadNumber& b) { return a /= b; }

  friend bool operator==(const QuadNumber& a, const QuadNumber& b) { return (a - b).sign() == 0; }
  friend bool operator<(const QuadNumber& a, const QuadNumber& b) { return (a - b).sign() < 0; }
  friend bool operator>(const QuadNumber& a, const QuadNumber& b) { return b < a; }
  friend bool operator<=(const QuadNumber& a, const QuadNumber& b) { return !(b < a); }
  friend bool operator>=(const QuadNumber& a, const QuadNumber& b) { return !(a < b); }

  std::string to_string() const;

 private:
  void normalize();
  std::int64_t common_radicand(const QuadNumber& o) const;

  Rational p_{0};
  Rational q_{0};
  std::int64_t d_{1};
};

/// Largest squarefree factorisation helper: returns (s, f) with v = f^2 * s.
std::pair<std::int64_t, std::int64_t> squarefree_part(std::int64_t v);

}  // namespace maslovkit
