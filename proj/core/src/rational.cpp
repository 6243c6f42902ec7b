#include "pathrep/rational.hpp"

namespace pathrep {

Rat::Rat(long num, long den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  mpq_init(v_);
  mpq_set_si(v_, num, 1);
  mpq_t d;
  mpq_init(d);
  mpq_set_si(d, den, 1);
  mpq_div(v_, v_, d);
  mpq_clear(d);
}

Rat::Rat(const std::string& s) {
  mpq_init(v_);
  if (mpq_set_str(v_, s.c_str(), 10) != 0) {
    mpq_clear(v_);
    throw std::invalid_argument("bad rational literal: " + s);
  }
  if (mpz_sgn(mpq_denref(v_)) == 0) {
    mpq_clear(v_);
    throw std::domain_error("rational with zero denominator: " + s);
  }
  mpq_canonicalize(v_);
}

Rat& Rat::operator/=(const Rat& o) {
  if (o.is_zero()) throw std::domain_error("rational division by zero");
  mpq_div(v_, v_, o.v_);
  return *this;
}

Rat Rat::inv() const {
  if (is_zero()) throw std::domain_error("inverse of zero");
  Rat r;
  mpq_inv(r.v_, v_);
  return r;
}

Rat Rat::pow(int e) const {
  if (e == 0) return Rat(1);
  Rat base = e > 0 ? *this : inv();
  unsigned n = e > 0 ? static_cast<unsigned>(e) : static_cast<unsigned>(-static_cast<long>(e));
  Rat r;
  mpz_pow_ui(mpq_numref(r.v_), mpq_numref(base.v_), n);
  mpz_pow_ui(mpq_denref(r.v_), mpq_denref(base.v_), n);
  // base is canonical, so powers share no factors either
  return r;
}

std::string Rat::str() const {
  char* raw = mpq_get_str(nullptr, 10, v_);
  std::string out(raw);
  void (*freefn)(void*, size_t);
  mp_get_memory_functions(nullptr, nullptr, &freefn);
  freefn(raw, out.size() + 1);
  return out;
}

}  // namespace pathrep
