#include "pathrep/laurent.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>

namespace pathrep {

namespace {

// RAII vector of raw GMP integers (mpz_t cannot live in std::vector directly).
struct ZVec {
  std::vector<__mpz_struct> z;
  explicit ZVec(size_t n) : z(n) {
    for (auto& w : z) mpz_init(&w);
  }
  ZVec(const ZVec&) = delete;
  ZVec& operator=(const ZVec&) = delete;
  ~ZVec() {
    for (auto& w : z) mpz_clear(&w);
  }
  mpz_ptr operator[](size_t i) { return &z[i]; }
  mpz_srcptr operator[](size_t i) const { return &z[i]; }
  size_t size() const { return z.size(); }
};

}  // namespace

void LaurentPoly::trim() {
  size_t b = 0;
  size_t e = c_.size();
  while (b < e && c_[b].is_zero()) ++b;
  while (e > b && c_[e - 1].is_zero()) --e;
  if (b == e) {
    c_.clear();
    lo_ = 0;
    return;
  }
  if (e < c_.size()) c_.resize(e);
  if (b > 0) {
    c_.erase(c_.begin(), c_.begin() + static_cast<long>(b));
    lo_ += static_cast<int>(b);
  }
}

LaurentPoly LaurentPoly::from_int(long n) {
  LaurentPoly p;
  if (n != 0) {
    p.lo_ = 0;
    p.c_.emplace_back(n);
  }
  return p;
}

LaurentPoly LaurentPoly::monomial(int exp, Rat coeff) {
  LaurentPoly p;
  if (!coeff.is_zero()) {
    p.lo_ = exp;
    p.c_.push_back(std::move(coeff));
  }
  return p;
}

LaurentPoly LaurentPoly::from_coeffs(int lo, std::vector<Rat> coeffs) {
  LaurentPoly p;
  p.lo_ = lo;
  p.c_ = std::move(coeffs);
  p.trim();
  return p;
}

int LaurentPoly::term_count() const {
  int n = 0;
  for (const auto& r : c_)
    if (!r.is_zero()) ++n;
  return n;
}

Rat LaurentPoly::coeff(int exp) const {
  if (is_zero() || exp < lo_ || exp > max_exp()) return Rat(0);
  return c_[static_cast<size_t>(exp - lo_)];
}

void LaurentPoly::for_terms(const std::function<void(int, const Rat&)>& fn) const {
  for (size_t i = 0; i < c_.size(); ++i)
    if (!c_[i].is_zero()) fn(lo_ + static_cast<int>(i), c_[i]);
}

LaurentPoly LaurentPoly::operator-() const {
  LaurentPoly r = *this;
  for (auto& x : r.c_) x = -x;
  return r;
}

LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  int lo = std::min(a.lo_, b.lo_);
  int hi = std::max(a.max_exp(), b.max_exp());
  LaurentPoly r;
  r.lo_ = lo;
  r.c_.assign(static_cast<size_t>(hi - lo + 1), Rat(0));
  for (size_t i = 0; i < a.c_.size(); ++i) r.c_[static_cast<size_t>(a.lo_ - lo) + i] = a.c_[i];
  for (size_t i = 0; i < b.c_.size(); ++i) r.c_[static_cast<size_t>(b.lo_ - lo) + i] += b.c_[i];
  r.trim();
  return r;
}

LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b) { return a + (-b); }

LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  if (a.is_monomial()) return b.scaled(a.c_[0]).shifted(a.lo_);
  if (b.is_monomial()) return a.scaled(b.c_[0]).shifted(b.lo_);

  // Clear denominators and convolve over the integers; much faster than
  // convolving mpq coefficients directly.
  size_t na = a.c_.size();
  size_t nb = b.c_.size();
  mpz_t da, db, t, dd;
  mpz_init_set_ui(da, 1);
  mpz_init_set_ui(db, 1);
  mpz_init(t);
  mpz_init(dd);
  for (const auto& x : a.c_) mpz_lcm(da, da, mpq_denref(x.get()));
  for (const auto& x : b.c_) mpz_lcm(db, db, mpq_denref(x.get()));

  ZVec A(na), B(nb), R(na + nb - 1);
  for (size_t i = 0; i < na; ++i) {
    mpz_divexact(t, da, mpq_denref(a.c_[i].get()));
    mpz_mul(A[i], mpq_numref(a.c_[i].get()), t);
  }
  for (size_t i = 0; i < nb; ++i) {
    mpz_divexact(t, db, mpq_denref(b.c_[i].get()));
    mpz_mul(B[i], mpq_numref(b.c_[i].get()), t);
  }
  for (size_t i = 0; i < na; ++i) {
    if (mpz_sgn(A[i]) == 0) continue;
    for (size_t j = 0; j < nb; ++j) {
      if (mpz_sgn(B[j]) == 0) continue;
      mpz_addmul(R[i + j], A[i], B[j]);
    }
  }
  mpz_mul(dd, da, db);

  LaurentPoly r;
  r.lo_ = a.lo_ + b.lo_;
  r.c_.assign(R.size(), Rat(0));
  for (size_t k = 0; k < R.size(); ++k) {
    if (mpz_sgn(R[k]) == 0) continue;
    mpz_set(mpq_numref(r.c_[k].get()), R[k]);
    mpz_set(mpq_denref(r.c_[k].get()), dd);
    mpq_canonicalize(r.c_[k].get());
  }
  mpz_clears(da, db, t, dd, nullptr);
  r.trim();
  return r;
}

LaurentPoly LaurentPoly::shifted(int d) const {
  LaurentPoly r = *this;
  if (!r.is_zero()) r.lo_ += d;
  return r;
}

LaurentPoly LaurentPoly::scaled(const Rat& s) const {
  if (s.is_zero() || is_zero()) return {};
  LaurentPoly r = *this;
  for (auto& x : r.c_) x *= s;
  return r;
}

bool operator==(const LaurentPoly& a, const LaurentPoly& b) {
  if (a.is_zero() || b.is_zero()) return a.is_zero() == b.is_zero();
  return a.lo_ == b.lo_ && a.c_ == b.c_;
}

int LaurentPoly::cmp(const LaurentPoly& a, const LaurentPoly& b) {
  if (a.is_zero() || b.is_zero()) return (b.is_zero() ? 0 : -1) + (a.is_zero() ? 0 : 1);
  if (a.lo_ != b.lo_) return a.lo_ < b.lo_ ? -1 : 1;
  if (a.c_.size() != b.c_.size()) return a.c_.size() < b.c_.size() ? -1 : 1;
  for (size_t i = 0; i < a.c_.size(); ++i) {
    int c = mpq_cmp(a.c_[i].get(), b.c_[i].get());
    if (c != 0) return c < 0 ? -1 : 1;
  }
  return 0;
}

std::optional<LaurentPoly> LaurentPoly::divided_exact(const LaurentPoly& d) const {
  if (d.is_zero()) throw std::domain_error("polynomial division by zero");
  if (is_zero()) return LaurentPoly{};
  if (d.is_monomial()) return scaled(d.c_[0].inv()).shifted(-d.lo_);
  size_t n = c_.size();
  size_t m = d.c_.size();
  if (n < m) return std::nullopt;

  std::vector<Rat> work = c_;
  std::vector<Rat> quot(n - m + 1, Rat(0));
  const Rat lead_inv = d.c_[m - 1].inv();
  for (size_t k = n - m + 1; k-- > 0;) {
    Rat qk = work[k + m - 1] * lead_inv;
    if (!qk.is_zero()) {
      for (size_t j = 0; j < m; ++j) work[k + j] -= qk * d.c_[j];
      quot[k] = std::move(qk);
    }
  }
  for (size_t i = 0; i + 1 < m; ++i)
    if (!work[i].is_zero()) return std::nullopt;

  LaurentPoly r;
  r.lo_ = lo_ - d.lo_;
  r.c_ = std::move(quot);
  r.trim();
  return r;
}

Rat LaurentPoly::eval(const Rat& point) const {
  if (is_zero()) return Rat(0);
  if (lo_ < 0 && point.is_zero()) throw std::domain_error("negative exponent at q=0");
  Rat r = c_.back();
  for (size_t i = c_.size() - 1; i-- > 0;) {
    r *= point;
    r += c_[i];
  }
  if (lo_ != 0) r *= point.pow(lo_);
  return r;
}

Rat LaurentPoly::content() const {
  if (is_zero()) return Rat(0);
  mpz_t g, l;
  mpz_init_set_ui(g, 0);
  mpz_init_set_ui(l, 1);
  for (const auto& x : c_) {
    if (x.is_zero()) continue;
    mpz_gcd(g, g, mpq_numref(x.get()));
    mpz_lcm(l, l, mpq_denref(x.get()));
  }
  Rat r;
  mpz_set(mpq_numref(r.get()), g);
  mpz_set(mpq_denref(r.get()), l);
  mpq_canonicalize(r.get());
  mpz_clears(g, l, nullptr);
  return r;
}

std::string LaurentPoly::str() const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (size_t i = 0; i < c_.size(); ++i) {
    if (c_[i].is_zero()) continue;
    int e = lo_ + static_cast<int>(i);
    Rat v = c_[i];
    if (!first) {
      os << (v.sign() < 0 ? " - " : " + ");
      if (v.sign() < 0) v = -v;
    }
    first = false;
    if (e == 0 || !v.is_one()) os << v.str();
    if (e != 0) {
      if (!v.is_one()) os << "*";
      os << "q";
      if (e != 1) os << "^" << e;
    }
  }
  return os.str();
}

namespace {

// Integer polynomial utilities for the subresultant remainder sequence.
using ZPoly = std::vector<__mpz_struct>;

struct ZP {
  std::vector<__mpz_struct> c;
  ZP() = default;
  explicit ZP(size_t n) : c(n) {
    for (auto& w : c) mpz_init(&w);
  }
  ZP(ZP&& o) noexcept : c(std::move(o.c)) { o.c.clear(); }
  ZP& operator=(ZP&& o) noexcept {
    clear();
    c = std::move(o.c);
    o.c.clear();
    return *this;
  }
  ZP(const ZP&) = delete;
  ZP& operator=(const ZP&) = delete;
  ~ZP() { clear(); }
  void clear() {
    for (auto& w : c) mpz_clear(&w);
    c.clear();
  }
  mpz_ptr operator[](size_t i) { return &c[i]; }
  mpz_srcptr operator[](size_t i) const { return &c[i]; }
  size_t size() const { return c.size(); }
  void trim_hi() {
    while (!c.empty() && mpz_sgn(&c.back()) == 0) {
      mpz_clear(&c.back());
      c.pop_back();
    }
  }
  int deg() const { return static_cast<int>(c.size()) - 1; }
};

// Primitive integer coefficients of p, shifted to exponent 0.
ZP to_primitive_int(const LaurentPoly& p) {
  Rat cont = p.content();
  ZP out(static_cast<size_t>(p.term_span()));
  size_t i = 0;
  int base = p.min_exp();
  for (int e = base; e <= p.max_exp(); ++e, ++i) {
    Rat r = p.coeff(e) / cont;
    // r is an integer by construction of content()
    mpz_set(out[i], mpq_numref(r.get()));
  }
  return out;
}

// R <- lc(B)^(degA-degB+1) * A  mod B  (pseudo-remainder)
ZP prem(const ZP& a, const ZP& b) {
  ZP r(a.size());
  for (size_t i = 0; i < a.size(); ++i) mpz_set(r[i], a[i]);
  int db = b.deg();
  mpz_srcptr lcb = b[static_cast<size_t>(db)];
  mpz_t top;
  mpz_init(top);
  for (int k = r.deg() - db; k >= 0; --k) {
    mpz_set(top, r[static_cast<size_t>(db + k)]);
    for (int i = 0; i < static_cast<int>(r.size()); ++i) mpz_mul(r[static_cast<size_t>(i)], r[static_cast<size_t>(i)], lcb);
    for (int j = 0; j <= db; ++j) mpz_submul(r[static_cast<size_t>(k + j)], top, b[static_cast<size_t>(j)]);
  }
  mpz_clear(top);
  r.trim_hi();
  return r;
}

void make_primitive(ZP& p) {
  if (p.size() == 0) return;
  mpz_t g;
  mpz_init_set_ui(g, 0);
  for (size_t i = 0; i < p.size(); ++i) mpz_gcd(g, g, p[i]);
  if (mpz_sgn(&p.c.back()) < 0) mpz_neg(g, g);
  for (size_t i = 0; i < p.size(); ++i) mpz_divexact(p[i], p[i], g);
  mpz_clear(g);
}

LaurentPoly from_zp(const ZP& p) {
  LaurentPoly out;
  for (size_t i = 0; i < p.size(); ++i) {
    if (mpz_sgn(p[i]) == 0) continue;
    Rat r;
    mpz_set(mpq_numref(r.get()), p[i]);
    out = out + LaurentPoly::monomial(static_cast<int>(i), std::move(r));
  }
  return out;
}

}  // namespace

LaurentPoly laurent_gcd(const LaurentPoly& a, const LaurentPoly& b) {
  if (a.is_zero() && b.is_zero()) return {};
  if (a.is_zero() || b.is_zero()) {
    ZP p = to_primitive_int(a.is_zero() ? b : a);
    make_primitive(p);
    return from_zp(p);
  }
  if (a.is_monomial() || b.is_monomial()) return LaurentPoly::from_int(1);

  ZP A = to_primitive_int(a);
  ZP B = to_primitive_int(b);
  if (A.deg() < B.deg()) std::swap(A, B);

  mpz_t g, h, tmp, tmp2;
  mpz_init_set_ui(g, 1);
  mpz_init_set_ui(h, 1);
  mpz_init(tmp);
  mpz_init(tmp2);
  LaurentPoly result;
  for (;;) {
    int delta = A.deg() - B.deg();
    ZP R = prem(A, B);
    if (R.size() == 0) {
      make_primitive(B);
      result = from_zp(B);
      break;
    }
    if (R.deg() == 0) {
      result = LaurentPoly::from_int(1);
      break;
    }
    A = std::move(B);
    // B <- R / (g * h^delta)
    mpz_pow_ui(tmp, h, static_cast<unsigned>(delta));
    mpz_mul(tmp, tmp, g);
    B = ZP(R.size());
    for (size_t i = 0; i < R.size(); ++i) mpz_divexact(B[i], R[i], tmp);
    mpz_set(g, A[static_cast<size_t>(A.deg())]);
    if (delta > 0) {
      // h <- g^delta / h^(delta-1)
      mpz_pow_ui(tmp, g, static_cast<unsigned>(delta));
      mpz_pow_ui(tmp2, h, static_cast<unsigned>(delta - 1));
      mpz_divexact(h, tmp, tmp2);
    }
  }
  mpz_clears(g, h, tmp, tmp2, nullptr);
  return result;
}

const LaurentPoly& cyclotomic(int d) {
  static std::mutex mu;
  static std::vector<LaurentPoly> table;  // index by d, slot 0 unused
  if (d < 1) throw std::domain_error("cyclotomic index must be positive");
  std::lock_guard<std::mutex> lock(mu);
  if (static_cast<size_t>(d) < table.size() && !table[static_cast<size_t>(d)].is_zero())
    return table[static_cast<size_t>(d)];
  if (static_cast<size_t>(d) >= table.size()) table.resize(static_cast<size_t>(d) + 1);
  // Phi_d = (q^d - 1) / prod_{e | d, e < d} Phi_e, computed for ascending d so
  // every proper divisor is already present.
  for (int k = 1; k <= d; ++k) {
    auto& slot = table[static_cast<size_t>(k)];
    if (!slot.is_zero()) continue;
    LaurentPoly num = LaurentPoly::monomial(k, Rat(1)) - LaurentPoly::from_int(1);
    for (int e = 1; e < k; ++e) {
      if (k % e != 0) continue;
      auto q = num.divided_exact(table[static_cast<size_t>(e)]);
      num = std::move(*q);
    }
    slot = std::move(num);
  }
  return table[static_cast<size_t>(d)];
}

}  // namespace pathrep
