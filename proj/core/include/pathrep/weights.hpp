#pragma once

#include <array>
#include <vector>

#include "pathrep/qscalar.hpp"

namespace pathrep::g2 {

// Dominant weight in fundamental-weight coordinates.
struct Weight {
  int a = 0;
  int b = 0;
  friend bool operator==(const Weight&, const Weight&) = default;
  friend auto operator<=>(const Weight&, const Weight&) = default;
};

// C_w, always even.
long casimir(Weight w);

// Labels adjacent to w in the fusion graph with the 7-dimensional object:
// the dominant hexagon corners plus w itself unless a = 0. Lexicographic.
std::vector<Weight> tensor_neighbors(Weight w);

// Classical Weyl dimension.
long weyl_dim(Weight w);

// Bracket data of the q-dimension: quotient of products of quantum integers.
struct QdimSpec {
  std::array<int, 6> num;
  std::array<int, 6> den;
};
QdimSpec qdim_spec(Weight w);

// q-dimension as the character sum over the weights of V_w paired with rho.
// The bracket quotient lives at half these exponents, so it is expanded in an
// auxiliary variable and folded; the fold is exact (all exponents even).
const LaurentPoly& qdim_poly(Weight w);

template <class F>
typename F::Scalar qdim(const F& f, Weight w) {
  const LaurentPoly& p = qdim_poly(w);
  auto acc = f.zero();
  p.for_terms([&](int e, const Rat& c) { acc = acc + f.from_rat(c) * f.qpow(e); });
  return acc;
}

// Multiplicity of V_lam inside V_delta tensor V_gamma for gamma one of the
// four channels of V tensor V; always 0 or 1 here.
int rmult(Weight lam, Weight delta, Weight gamma);

// Exponent of the ribbon scalar on the simple object.
long twist_exponent(Weight w);

// Scalar by which the full twist acts on every path of length n ending at w.
template <class F>
typename F::Scalar central_scalar(const F& f, Weight w, int n) {
  long e = casimir(w) - 12L * n;
  return f.qpow(static_cast<int>(e));
}

}  // namespace pathrep::g2
