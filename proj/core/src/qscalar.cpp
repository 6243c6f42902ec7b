#include "pathrep/qscalar.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace pathrep {

namespace {

constexpr int kFactorSpanCap = 401;   // don't hunt for factors in huge denominators
constexpr int kAutoReduceSpan = 201;  // unhinted denominators this wide get a full reduce

int euler_phi(int n) {
  int r = n;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    while (n % p == 0) n /= p;
    r -= r / p;
  }
  if (n > 1) r -= r / n;
  return r;
}

// Phi_d | p, tested via folding p mod (q^d - 1) first; the fold keeps the
// failing case O(span(p)) instead of a full long division.
bool cyclo_divides(const LaurentPoly& p, int d) {
  if (p.is_zero()) return true;
  std::vector<Rat> fold(static_cast<size_t>(d), Rat(0));
  p.for_terms([&](int e, const Rat& c) {
    int r = e % d;
    if (r < 0) r += d;
    fold[static_cast<size_t>(r)] += c;
  });
  LaurentPoly folded = LaurentPoly::from_coeffs(0, std::move(fold));
  if (folded.is_zero()) return true;  // (q^d - 1) | p, and Phi_d | q^d - 1
  return folded.divided_exact(cyclotomic(d)).has_value();
}

}  // namespace

QScalar QScalar::from_int(long n) {
  QScalar r;
  r.num_ = LaurentPoly::from_int(n);
  return r;
}

QScalar QScalar::from_rat(Rat v) {
  QScalar r;
  r.num_ = LaurentPoly::monomial(0, std::move(v));
  return r;
}

QScalar QScalar::from_poly(LaurentPoly p) {
  QScalar r;
  r.num_ = std::move(p);
  return r;
}

QScalar QScalar::ratio(LaurentPoly num, LaurentPoly den) {
  if (den.is_zero()) throw std::domain_error("scalar with zero denominator");
  QScalar r;
  r.num_ = std::move(num);
  r.den_ = std::move(den);
  r.fac_known_ = false;
  r.canonicalize();
  return r;
}

QScalar QScalar::qpow(int e) {
  QScalar r;
  r.num_ = LaurentPoly::monomial(e, Rat(1));
  return r;
}

QScalar QScalar::qint(int n) {
  // [n] = q^(n-1) + q^(n-3) + ... + q^(1-n); a plain Laurent polynomial.
  QScalar r;
  if (n == 0) return r;
  int a = n < 0 ? -n : n;
  LaurentPoly p;
  for (int k = 0; k < a; ++k) p = p + LaurentPoly::monomial(a - 1 - 2 * k, Rat(1));
  if (n < 0) p = -p;
  r.num_ = std::move(p);
  return r;
}

void QScalar::unit_normalize() {
  if (num_.is_zero()) {
    den_ = LaurentPoly::from_int(1);
    fac_.clear();
    fac_known_ = true;
    return;
  }
  if (den_.is_monomial()) {
    num_ = num_.scaled(den_.trail().inv()).shifted(-den_.min_exp());
    den_ = LaurentPoly::from_int(1);
    fac_.clear();
    fac_known_ = true;
    return;
  }
  int e = den_.min_exp();
  if (e != 0) {
    den_ = den_.shifted(-e);
    num_ = num_.shifted(-e);
  }
  const Rat& t = den_.trail();
  if (!t.is_one()) {
    Rat ti = t.inv();
    den_ = den_.scaled(ti);
    num_ = num_.scaled(ti);
  }
}

constexpr int kStripHuntSpan = 65;

void QScalar::strip(bool hunt_small) {
  if (num_.is_zero() || den_.is_one() || den_.is_monomial()) {
    unit_normalize();
    return;
  }
  if (fac_known_ && !num_.is_monomial() && (hunt_small || den_.term_span() > kStripHuntSpan)) {
    for (size_t i = fac_.size(); i-- > 0;) {
      auto& [d, mult] = fac_[i];
      while (mult > 0 && cyclo_divides(num_, d)) {
        num_ = *num_.divided_exact(cyclotomic(d));
        den_ = *den_.divided_exact(cyclotomic(d));
        --mult;
        if (num_.is_monomial()) break;
      }
    }
    fac_.erase(std::remove_if(fac_.begin(), fac_.end(), [](const auto& f) { return f.second == 0; }),
               fac_.end());
  }
  unit_normalize();
}

void QScalar::attempt_factor() {
  if (den_.is_one() || den_.is_monomial()) {
    unit_normalize();
    return;
  }
  if (den_.term_span() > kFactorSpanCap) {
    fac_known_ = false;
    fac_.clear();
    return;
  }
  LaurentPoly work = den_.shifted(-den_.min_exp());
  std::map<int, int> found;
  int deg = work.term_span() - 1;
  for (int d = 2 * deg + 2; d >= 1; --d) {
    if (euler_phi(d) > deg) continue;
    while (cyclo_divides(work, d)) {
      work = *work.divided_exact(cyclotomic(d));
      ++found[d];
      deg = work.term_span() - 1;
      if (work.is_monomial()) break;
    }
    if (work.is_monomial()) break;
  }
  if (work.is_monomial()) {
    fac_.assign(found.begin(), found.end());
    fac_known_ = true;
  } else {
    fac_.clear();
    fac_known_ = false;
  }
}

void QScalar::canonicalize() {
  if (num_.is_zero() || den_.is_one()) {
    unit_normalize();
    reduced_ = true;
    return;
  }
  if (!fac_known_) {
    if (!num_.is_monomial() && !den_.is_monomial()) {
      LaurentPoly g = laurent_gcd(num_, den_);
      if (!g.is_zero() && g.term_span() > 1) {
        num_ = *num_.divided_exact(g);
        den_ = *den_.divided_exact(g);
      }
    }
    attempt_factor();
  }
  // with a known factor hint, a full strip leaves gcd(num, den) = 1 on its own
  strip(true);
  reduced_ = true;
}

void QScalar::auto_reduce() {
  if (reduced_ || fac_known_ || den_.term_span() <= kAutoReduceSpan) return;
  canonicalize();
}

QScalar QScalar::operator-() const {
  QScalar r = *this;
  r.num_ = -r.num_;
  return r;
}

QScalar operator*(const QScalar& a, const QScalar& b) {
  if (a.is_zero() || b.is_zero()) return {};
  QScalar r;
  r.num_ = a.num_ * b.num_;
  if (a.den_.is_one() && b.den_.is_one()) return r;
  if (a.den_.is_one()) {
    r.den_ = b.den_;
    r.fac_ = b.fac_;
    r.fac_known_ = b.fac_known_;
  } else if (b.den_.is_one()) {
    r.den_ = a.den_;
    r.fac_ = a.fac_;
    r.fac_known_ = a.fac_known_;
  } else {
    r.den_ = a.den_ * b.den_;
    r.fac_known_ = a.fac_known_ && b.fac_known_;
    if (r.fac_known_) {
      std::map<int, int> m(a.fac_.begin(), a.fac_.end());
      for (const auto& [d, k] : b.fac_) m[d] += k;
      r.fac_.assign(m.begin(), m.end());
    }
  }
  r.strip();
  r.auto_reduce();
  return r;
}

QScalar operator+(const QScalar& a, const QScalar& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  QScalar r;
  if (a.den_ == b.den_) {
    r.num_ = a.num_ + b.num_;
    if (r.num_.is_zero()) return {};
    r.den_ = a.den_;
    if (a.fac_known_) {
      r.fac_ = a.fac_;
      r.fac_known_ = true;
    } else {
      r.fac_ = b.fac_;
      r.fac_known_ = b.fac_known_;
    }
  } else {
    // With both factor hints known the denominators are (up to sign) pure
    // cyclotomic products, so we can add over the lcm: only the small
    // symmetric-difference cofactors ever get multiplied out. This is what
    // keeps chained sums (row reduction!) from squaring the denominator at
    // every step.
    bool added = false;
    if (a.fac_known_ && b.fac_known_ && !a.den_.is_one() && !b.den_.is_one()) {
      std::map<int, int> ma(a.fac_.begin(), a.fac_.end());
      bool shared = false;
      LaurentPoly ca = LaurentPoly::from_int(1);  // b.den / gcd, up to sign
      LaurentPoly cb = LaurentPoly::from_int(1);  // a.den / gcd, up to sign
      std::map<int, int> mb(b.fac_.begin(), b.fac_.end());
      for (const auto& [d, k] : ma) {
        auto it = mb.find(d);
        int common = it == mb.end() ? 0 : std::min(k, it->second);
        if (common > 0) shared = true;
        for (int i = 0; i < k - common; ++i) cb = cb * cyclotomic(d);
      }
      if (shared) {
        for (const auto& [d, k] : mb) {
          auto it = ma.find(d);
          int common = it == ma.end() ? 0 : std::min(k, it->second);
          for (int i = 0; i < k - common; ++i) ca = ca * cyclotomic(d);
        }
        // den = sign * prod Phi_d^m with sign fixed by the trail-1 normal
        // form; only Phi_1 contributes a negative trail.
        auto phi1 = [](const std::map<int, int>& m) {
          auto it = m.find(1);
          return it == m.end() ? 0 : it->second;
        };
        int sgn = ((phi1(ma) + phi1(mb)) % 2) ? -1 : 1;
        LaurentPoly cross = b.num_ * cb;
        r.num_ = sgn < 0 ? a.num_ * ca - cross : a.num_ * ca + cross;
        if (r.num_.is_zero()) return {};
        r.den_ = a.den_ * ca;
        std::map<int, int> mm = ma;
        for (const auto& [d, k] : mb) {
          int& v = mm[d];
          v = std::max(v, k);
        }
        r.fac_.assign(mm.begin(), mm.end());
        r.fac_known_ = true;
        added = true;
      }
    }
    if (!added) {
      r.num_ = a.num_ * b.den_ + b.num_ * a.den_;
      if (r.num_.is_zero()) return {};
      r.den_ = a.den_ * b.den_;
      r.fac_known_ = a.fac_known_ && b.fac_known_;
      if (r.fac_known_) {
        std::map<int, int> m(a.fac_.begin(), a.fac_.end());
        for (const auto& [d, k] : b.fac_) m[d] += k;
        r.fac_.assign(m.begin(), m.end());
      }
    }
  }
  r.strip();
  r.auto_reduce();
  return r;
}

QScalar operator-(const QScalar& a, const QScalar& b) { return a + (-b); }

QScalar QScalar::inv() const {
  if (is_zero()) throw std::domain_error("inverse of zero scalar");
  QScalar r;
  r.num_ = den_;
  r.den_ = num_;
  r.fac_.clear();
  r.fac_known_ = false;
  r.reduced_ = reduced_;  // swapping a reduced fraction keeps it reduced
  if (!r.den_.is_monomial()) r.attempt_factor();
  r.strip();
  r.auto_reduce();
  return r;
}

QScalar operator/(const QScalar& a, const QScalar& b) { return a * b.inv(); }

QScalar QScalar::pow(int e) const {
  if (e == 0) return from_int(1);
  QScalar base = e > 0 ? *this : inv();
  unsigned n = e > 0 ? static_cast<unsigned>(e) : static_cast<unsigned>(-static_cast<long>(e));
  QScalar acc = from_int(1);
  while (n) {
    if (n & 1u) acc = acc * base;
    base = base * base;
    n >>= 1;
  }
  return acc;
}

bool operator==(const QScalar& a, const QScalar& b) {
  if (a.num_.is_zero()) return b.num_.is_zero();
  if (b.num_.is_zero()) return false;
  if (a.den_ == b.den_) return a.num_ == b.num_;
  return a.num_ * b.den_ == b.num_ * a.den_;
}

int QScalar::cmp(const QScalar& a, const QScalar& b) {
  int c = LaurentPoly::cmp(a.num_, b.num_);
  if (c != 0) return c;
  return LaurentPoly::cmp(a.den_, b.den_);
}

Rat QScalar::eval_at(const Rat& point) const {
  Rat d = den_.eval(point);
  if (d.is_zero()) throw std::domain_error("denominator vanishes at evaluation point");
  return num_.eval(point) / d;
}

std::string QScalar::str() const {
  if (den_.is_one()) return num_.str();
  std::ostringstream os;
  os << "(" << num_.str() << ") / (" << den_.str() << ")";
  return os.str();
}

}  // namespace pathrep
