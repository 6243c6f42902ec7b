#pragma once

#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "pathrep/qscalar.hpp"

namespace pathrep {

// Evaluation backend: scalars are exact rationals, the variable pinned to a
// fixed generic point. Same interface, far cheaper arithmetic; rank-style
// checks use it where a generic-point certificate suffices.
class EvalField {
 public:
  using Scalar = Rat;
  static constexpr bool kExact = false;
  static constexpr bool kHasScout = false;

  explicit EvalField(Rat point = Rat(3, 2)) : q_(std::move(point)) {
    if (q_.is_zero() || q_ == Rat(1) || q_ == Rat(-1))
      throw std::invalid_argument("evaluation point must be a nonzero rational other than +-1");
    // power cache is filled once here and read-only afterwards, so a field
    // instance can be shared across verifier threads
    pos_.reserve(kCache + 1);
    neg_.reserve(kCache + 1);
    pos_.push_back(Rat(1));
    neg_.push_back(Rat(1));
    Rat qi = q_.inv();
    for (int i = 1; i <= kCache; ++i) {
      pos_.push_back(pos_.back() * q_);
      neg_.push_back(neg_.back() * qi);
    }
  }

  std::string name() const { return "eval"; }
  const Rat& point() const { return q_; }

  Scalar zero() const { return Rat(0); }
  Scalar one() const { return Rat(1); }
  Scalar from_int(long n) const { return Rat(n); }
  Scalar from_rat(const Rat& r) const { return r; }
  Scalar qpow(int e) const {
    if (e >= 0)
      return e <= kCache ? pos_[static_cast<size_t>(e)] : q_.pow(e);
    return -e <= kCache ? neg_[static_cast<size_t>(-e)] : q_.pow(e);
  }
  Scalar qint(int n) const {
    if (n == 0) return Rat(0);
    return (qpow(n) - qpow(-n)) / (qpow(1) - qpow(-1));
  }

  bool is_zero(const Scalar& s) const { return s.is_zero(); }
  void canonicalize(Scalar&) const {}
  static int cmp(const Scalar& a, const Scalar& b) {
    if (a == b) return 0;
    return a < b ? -1 : 1;
  }
  std::string str(const Scalar& s) const { return s.str(); }

 private:
  static constexpr int kCache = 2048;
  Rat q_;
  std::vector<Rat> pos_, neg_;
};

// Exact backend: scalars are rational functions in q.
struct ExactField {
  using Scalar = QScalar;
  static constexpr bool kExact = true;

  std::string name() const { return "exact"; }

  Scalar zero() const { return {}; }
  Scalar one() const { return QScalar::from_int(1); }
  Scalar from_int(long n) const { return QScalar::from_int(n); }
  Scalar from_rat(const Rat& r) const { return QScalar::from_rat(r); }
  Scalar qpow(int e) const { return QScalar::qpow(e); }
  Scalar qint(int n) const { return QScalar::qint(n); }

  bool is_zero(const Scalar& s) const { return s.is_zero(); }
  void canonicalize(Scalar& s) const { s.canonicalize(); }
  static int cmp(const Scalar& a, const Scalar& b) { return QScalar::cmp(a, b); }
  std::string str(const Scalar& s) const { return s.str(); }

  // Scripted solves and bulk consistency checks scout their work on this
  // evaluation mirror; it is immutable after construction, so one shared
  // instance serves every caller.
  static constexpr bool kHasScout = true;
  using ScoutField = EvalField;
  const EvalField& scout_field() const {
    static const EvalField mirror{Rat(3, 2)};
    return mirror;
  }
  Rat scout(const Scalar& s) const { return s.eval_at(scout_field().point()); }
};

// Field of F's scout mirror when it has one; F itself otherwise, so dependent
// member declarations stay well-formed on mirrorless fields.
template <class F, class = void>
struct ScoutTraits {
  using Field = F;
};
template <class F>
struct ScoutTraits<F, std::void_t<typename F::ScoutField>> {
  using Field = typename F::ScoutField;
};

}  // namespace pathrep
