#pragma once

#include <gmp.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pathrep {

// Arbitrary-precision rational number. Value semantics over GMP's mpq_t;
// always stored canonicalized (reduced, positive denominator).
class Rat {
 public:
  Rat() { mpq_init(v_); }
  Rat(long n) {  // NOLINT: implicit from integers is intentional
    mpq_init(v_);
    mpq_set_si(v_, n, 1);
  }
  Rat(long num, long den);
  explicit Rat(const std::string& s);  // "p" or "p/q", base 10

  Rat(const Rat& o) {
    mpq_init(v_);
    mpq_set(v_, o.v_);
  }
  Rat(Rat&& o) noexcept {
    mpq_init(v_);
    mpq_swap(v_, o.v_);
  }
  Rat& operator=(const Rat& o) {
    if (this != &o) mpq_set(v_, o.v_);
    return *this;
  }
  Rat& operator=(Rat&& o) noexcept {
    if (this != &o) mpq_swap(v_, o.v_);
    return *this;
  }
  ~Rat() { mpq_clear(v_); }

  bool is_zero() const { return mpq_sgn(v_) == 0; }
  bool is_one() const { return mpq_cmp_si(v_, 1, 1) == 0; }
  bool is_integer() const { return mpz_cmp_si(mpq_denref(v_), 1) == 0; }
  int sign() const { return mpq_sgn(v_); }

  Rat& operator+=(const Rat& o) {
    mpq_add(v_, v_, o.v_);
    return *this;
  }
  Rat& operator-=(const Rat& o) {
    mpq_sub(v_, v_, o.v_);
    return *this;
  }
  Rat& operator*=(const Rat& o) {
    mpq_mul(v_, v_, o.v_);
    return *this;
  }
  Rat& operator/=(const Rat& o);

  friend Rat operator+(Rat a, const Rat& b) { return a += b; }
  friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
  friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
  friend Rat operator/(Rat a, const Rat& b) { return a /= b; }
  Rat operator-() const {
    Rat r;
    mpq_neg(r.v_, v_);
    return r;
  }

  friend bool operator==(const Rat& a, const Rat& b) { return mpq_equal(a.v_, b.v_) != 0; }
  friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
  friend bool operator<(const Rat& a, const Rat& b) { return mpq_cmp(a.v_, b.v_) < 0; }
  friend bool operator>(const Rat& a, const Rat& b) { return b < a; }

  Rat inv() const;
  Rat pow(int e) const;  // e may be negative (value must be nonzero)

  std::string str() const;  // "p" or "p/q"

  // Raw handle, for tight loops that work on mpz limbs directly.
  mpq_srcptr get() const { return v_; }
  mpq_ptr get() { return v_; }

 private:
  mpq_t v_;
};

}  // namespace pathrep
