#include "maslovkit/exact.hpp"

#include <cmath>
#include <stdexcept>

namespace maslovkit {

Rational make_rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::domain_error("zero denominator");
  return Rational(Integer(num), Integer(den));
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Integer floor_rational(const Rational& r) {
  const Integer n = boost::multiprecision::numerator(r);
  const Integer d = boost::multiprecision::denominator(r);  // always > 0
  Integer q = n / d;  // truncates toward zero
  if (n < 0 && q * d != n) q -= 1;
  return q;
}

Integer ceil_rational(const Rational& r) { return -floor_rational(-r); }

std::string to_string(const Rational& r) {
  const Integer n = boost::multiprecision::numerator(r);
  const Integer d = boost::multiprecision::denominator(r);
  if (d == 1) return n.str();
  return n.str() + "/" + d.str();
}

std::pair<std::int64_t, std::int64_t> squarefree_part(std::int64_t v) {
  if (v <= 0) throw std::domain_error("radicand must be positive");
  std::int64_t f = 1;
  for (std::int64_t k = 2; k * k <= v; ++k) {
    while (v % (k * k) == 0) {
      v /= k * k;
      f *= k;
    }
  }
  return {v, f};
}

QuadNumber::QuadNumber(Rational p) : p_(std::move(p)) {}

QuadNumber::QuadNumber(Rational p, Rational q, std::int64_t d) : p_(std::move(p)), q_(std::move(q)), d_(d) {
  normalize();
}

void QuadNumber::normalize() {
  if (d_ <= 0) throw std::domain_error("QuadNumber radicand must be positive");
  auto [s, f] = squarefree_part(d_);
  d_ = s;
  q_ *= f;
  if (d_ == 1) {
    p_ += q_;
    q_ = 0;
  }
  if (q_ == 0) d_ = 1;
}

std::int64_t QuadNumber::common_radicand(const QuadNumber& o) const {
  if (d_ == 1) return o.d_;
  if (o.d_ == 1 || o.d_ == d_) return d_;
  throw std::domain_error("QuadNumber: mixing sqrt(" + std::to_string(d_) + ") and sqrt(" +
                          std::to_string(o.d_) + ")");
}

QuadNumber& QuadNumber::operator+=(const QuadNumber& o) {
  d_ = common_radicand(o);
  p_ += o.p_;
  q_ += o.q_;
  if (q_ == 0) d_ = 1;
  return *this;
}

QuadNumber& QuadNumber::operator-=(const QuadNumber& o) { return *this += -o; }

QuadNumber& QuadNumber::operator*=(const QuadNumber& o) {
  const std::int64_t d = common_radicand(o);
  const Rational p = p_ * o.p_ + q_ * o.q_ * Rational(d);
  const Rational q = p_ * o.q_ + q_ * o.p_;
  p_ = p;
  q_ = q;
  d_ = d;
  if (q_ == 0) d_ = 1;
  return *this;
}

QuadNumber& QuadNumber::operator/=(const QuadNumber& o) {
  const std::int64_t d = common_radicand(o);
  const Rational norm = o.p_ * o.p_ - o.q_ * o.q_ * Rational(d);
  if (norm == 0) throw std::domain_error("QuadNumber division by zero");
  QuadNumber conj(o.p_ / norm, -o.q_ / norm, d);
  return *this *= conj;
}

int QuadNumber::sign() const {
  // sign(p + q sqrt d) without floating point.
  const int sp = p_ > 0 ? 1 : (p_ < 0 ? -1 : 0);
  const int sq = q_ > 0 ? 1 : (q_ < 0 ? -1 : 0);
  if (sq == 0) return sp;
  if (sp == 0 || sp == sq) return sq == 0 ? sp : sq;
  // opposite signs: compare p^2 with q^2 d
  const Rational lhs = p_ * p_;
  const Rational rhs = q_ * q_ * Rational(d_);
  if (lhs == rhs) return 0;  // impossible for squarefree d > 1, kept for completeness
  return lhs > rhs ? sp : sq;
}

double QuadNumber::to_double() const {
  return maslovkit::to_double(p_) + maslovkit::to_double(q_) * std::sqrt(static_cast<double>(d_));
}

Integer QuadNumber::floor() const {
  if (is_rational()) return floor_rational(p_);
  // start from the floating estimate and correct with exact comparisons
  Integer k(static_cast<long long>(std::floor(to_double())));
  while (QuadNumber(Rational(k)) > *this) k -= 1;
  while (QuadNumber(Rational(k + 1)) <= *this) k += 1;
  return k;
}

Integer QuadNumber::ceil() const {
  if (is_rational()) return ceil_rational(p_);
  return floor() + 1;  // irrational: never an integer
}

std::string QuadNumber::to_string() const {
  if (is_rational()) return maslovkit::to_string(p_);
  return maslovkit::to_string(p_) + (q_ >= 0 ? "+" : "-") + maslovkit::to_string(q_ >= 0 ? q_ : Rational(-q_)) +
         "*sqrt(" + std::to_string(d_) + ")";
}

}  // namespace maslovkit
