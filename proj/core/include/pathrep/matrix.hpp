#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace pathrep {

// Dense row-major matrix over a field scalar.
template <class S>
class Mat {
 public:
  Mat() = default;
  Mat(int r, int c, const S& fill)
      : rows_(r), cols_(c), a_(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  S& at(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  const S& at(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

  friend bool operator==(const Mat& a, const Mat& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
    for (std::size_t i = 0; i < a.a_.size(); ++i)
      if (!(a.a_[i] == b.a_[i])) return false;
    return true;
  }
  friend bool operator!=(const Mat& a, const Mat& b) { return !(a == b); }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<S> a_;
};

template <class F>
Mat<typename F::Scalar> identity_mat(const F& f, int n) {
  Mat<typename F::Scalar> m(n, n, f.zero());
  for (int i = 0; i < n; ++i) m.at(i, i) = f.one();
  return m;
}

template <class F>
Mat<typename F::Scalar> scalar_mat(const F& f, int n, const typename F::Scalar& v) {
  Mat<typename F::Scalar> m(n, n, f.zero());
  for (int i = 0; i < n; ++i) m.at(i, i) = v;
  return m;
}

template <class F, class S = typename F::Scalar>
Mat<S> mat_mul(const F& f, const Mat<S>& a, const Mat<S>& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("mat_mul: shape mismatch");
  Mat<S> out(a.rows(), b.cols(), f.zero());
  for (int i = 0; i < a.rows(); ++i)
    for (int t = 0; t < a.cols(); ++t) {
      const S& v = a.at(i, t);
      if (v.is_zero()) continue;
      for (int j = 0; j < b.cols(); ++j) {
        if (b.at(t, j).is_zero()) continue;
        out.at(i, j) += v * b.at(t, j);
      }
    }
  return out;
}

template <class S>
Mat<S> mat_sub(const Mat<S>& a, const Mat<S>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("mat_sub: shape mismatch");
  Mat<S> out = a;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out.at(i, j) = a.at(i, j) - b.at(i, j);
  return out;
}

template <class S>
bool is_zero_mat(const Mat<S>& a) {
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (!a.at(i, j).is_zero()) return false;
  return true;
}

template <class F, class S = typename F::Scalar>
S mat_trace(const F& f, const Mat<S>& a) {
  S acc = f.zero();
  for (int i = 0; i < a.rows(); ++i) acc += a.at(i, i);
  return acc;
}

}  // namespace pathrep
