#pragma once

#include <utility>
#include <vector>

#include "pathrep/laurent.hpp"

namespace pathrep {

// Rational function in q, held as num/den Laurent polynomials.
//
// Normal form: zero is {0, 1}; otherwise the denominator has min_exp 0 and
// trailing coefficient 1 (so a monomial denominator is always folded into the
// numerator). Common num/den factors are removed opportunistically: cheap
// cyclotomic strips on the hot path, a full subresultant gcd only in inv() and
// canonicalize(). Equality is therefore structural when denominators match and
// falls back to cross-multiplication otherwise; both are exact.
//
// Denominators additionally carry a factorization hint: when fac_known_, the
// denominator equals unit * prod_d Phi_d^{m_d} over the listed (d, m_d). The
// hint is what makes the hot-path strips O(span) instead of a general gcd.
class QScalar {
 public:
  QScalar() : den_(LaurentPoly::from_int(1)) {}

  static QScalar from_int(long n);
  static QScalar from_rat(Rat r);
  static QScalar from_poly(LaurentPoly p);
  static QScalar ratio(LaurentPoly num, LaurentPoly den);  // reduces fully
  static QScalar qpow(int e);
  static QScalar qint(int n);  // [n] = (q^n - q^-n)/(q - q^-1)

  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const { return den_.is_one() && num_.is_one(); }

  const LaurentPoly& num() const { return num_; }
  const LaurentPoly& den() const { return den_; }

  friend QScalar operator+(const QScalar& a, const QScalar& b);
  friend QScalar operator-(const QScalar& a, const QScalar& b);
  friend QScalar operator*(const QScalar& a, const QScalar& b);
  friend QScalar operator/(const QScalar& a, const QScalar& b);
  QScalar operator-() const;
  QScalar& operator+=(const QScalar& o) { return *this = *this + o; }
  QScalar& operator-=(const QScalar& o) { return *this = *this - o; }
  QScalar& operator*=(const QScalar& o) { return *this = *this * o; }

  QScalar inv() const;
  QScalar pow(int e) const;

  friend bool operator==(const QScalar& a, const QScalar& b);
  friend bool operator!=(const QScalar& a, const QScalar& b) { return !(a == b); }

  // Unique representative: gcd(num, den) = 1 on top of the usual den
  // normalization. Required before cmp() is meaningful.
  void canonicalize();
  static int cmp(const QScalar& a, const QScalar& b);

  Rat eval_at(const Rat& point) const;

  std::string str() const;

 private:
  // Divide out hinted cyclotomic factors and normalize the unit. The factor
  // hunt is skipped for narrow denominators unless hunt_small is set; those
  // are harmless to carry and the test is pure overhead on the hot path.
  void strip(bool hunt_small = false);
  void unit_normalize();
  void attempt_factor();  // try to (re)establish the denominator hint
  void auto_reduce();     // full reduce once an unhinted denominator gets wide

  LaurentPoly num_;
  LaurentPoly den_;
  std::vector<std::pair<int, int>> fac_;  // (d, multiplicity), d ascending
  bool fac_known_ = true;
  bool reduced_ = false;  // canonicalize() already ran on this exact value
};

}  // namespace pathrep
