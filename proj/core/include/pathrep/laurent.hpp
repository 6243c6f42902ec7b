#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "pathrep/rational.hpp"

namespace pathrep {

// Laurent polynomial in one variable q with rational coefficients.
// Dense storage over a contiguous exponent range; the first and last stored
// coefficients are nonzero (the zero polynomial stores nothing).
class LaurentPoly {
 public:
  LaurentPoly() = default;
  static LaurentPoly from_int(long n);
  static LaurentPoly monomial(int exp, Rat coeff);
  // coeffs[i] is the coefficient of q^(lo + i); trailing/leading zeros fine.
  static LaurentPoly from_coeffs(int lo, std::vector<Rat> coeffs);

  bool is_zero() const { return c_.empty(); }
  bool is_monomial() const { return c_.size() == 1; }
  bool is_one() const { return c_.size() == 1 && lo_ == 0 && c_[0].is_one(); }

  // Exponent range; both require a nonzero polynomial.
  int min_exp() const { return lo_; }
  int max_exp() const { return lo_ + static_cast<int>(c_.size()) - 1; }
  int term_span() const { return static_cast<int>(c_.size()); }
  int term_count() const;

  Rat coeff(int exp) const;
  const Rat& lead() const { return c_.back(); }
  const Rat& trail() const { return c_.front(); }

  // Visits nonzero terms in ascending exponent order.
  void for_terms(const std::function<void(int, const Rat&)>& fn) const;

  LaurentPoly operator-() const;
  friend LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b);
  friend LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b);
  friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b);

  LaurentPoly shifted(int d) const;      // multiply by q^d
  LaurentPoly scaled(const Rat& r) const;

  friend bool operator==(const LaurentPoly& a, const LaurentPoly& b);
  friend bool operator!=(const LaurentPoly& a, const LaurentPoly& b) { return !(a == b); }
  // Arbitrary total order consistent with equality (for canonical sorting).
  static int cmp(const LaurentPoly& a, const LaurentPoly& b);

  // Exact division; nullopt when the divisor does not divide evenly.
  std::optional<LaurentPoly> divided_exact(const LaurentPoly& d) const;

  Rat eval(const Rat& point) const;  // point must be nonzero if min_exp < 0

  std::string str() const;  // human-readable, for diagnostics

  // Content/primitive-part helpers used by the gcd machinery.
  Rat content() const;

 private:
  void trim();

  int lo_ = 0;
  std::vector<Rat> c_;

  friend LaurentPoly laurent_mul(const LaurentPoly&, const LaurentPoly&);
};

// Nonzero gcd of two polynomials, normalized with min_exp 0 and positive
// integer primitive coefficients. Subresultant PRS over the integers.
LaurentPoly laurent_gcd(const LaurentPoly& a, const LaurentPoly& b);

// d-th cyclotomic polynomial (ordinary polynomial in q, min_exp 0).
const LaurentPoly& cyclotomic(int d);

}  // namespace pathrep
