#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pathrep/matrix.hpp"

namespace pathrep {

// Raised when a constraint system has no solution or leaves entries
// undetermined; what() carries the witness description.
class SolveError : public std::runtime_error {
 public:
  explicit SolveError(const std::string& msg) : std::runtime_error(msg) {}
};

// Dense exact Gaussian elimination; nullopt when the matrix is singular.
template <class F, class S = typename F::Scalar>
std::optional<std::vector<S>> gauss_solve(const F& f, Mat<S> m, std::vector<S> b) {
  int n = m.rows();
  for (int c = 0; c < n; ++c) {
    int p = -1;
    for (int r = c; r < n; ++r)
      if (!m.at(r, c).is_zero()) {
        p = r;
        break;
      }
    if (p < 0) return std::nullopt;
    if (p != c) {
      for (int j = 0; j < n; ++j) std::swap(m.at(c, j), m.at(p, j));
      std::swap(b[static_cast<std::size_t>(c)], b[static_cast<std::size_t>(p)]);
    }
    S inv = f.one() / m.at(c, c);
    for (int j = 0; j < n; ++j) {
      m.at(c, j) = m.at(c, j) * inv;
      f.canonicalize(m.at(c, j));
    }
    b[static_cast<std::size_t>(c)] = b[static_cast<std::size_t>(c)] * inv;
    f.canonicalize(b[static_cast<std::size_t>(c)]);
    for (int r = 0; r < n; ++r) {
      if (r == c || m.at(r, c).is_zero()) continue;
      S fac = m.at(r, c);
      for (int j = 0; j < n; ++j) m.at(r, j) = m.at(r, j) - fac * m.at(c, j);
      b[static_cast<std::size_t>(r)] =
          b[static_cast<std::size_t>(r)] - fac * b[static_cast<std::size_t>(c)];
    }
  }
  for (S& x : b) f.canonicalize(x);
  return b;
}

// Affine form cst + sum coef_j x_j over free-symbol ids.
template <class S>
struct Affine {
  S cst;
  std::map<int, S> terms;
};

/// One linear constraint: sparse coefficients and a right-hand side.
template <class S>
using LinRow = std::pair<std::map<int, S>, S>;

// Sparse row reduction of an affine system over nunk unknowns.
// Returns per-unknown affine assignments over the free unknowns, plus the
// sorted list of free unknown ids. Throws SolveError on inconsistency.
// `placed` (optional) receives the indices of the rows that carried pivots;
// rerunning on exactly that subsequence reproduces the same reduction.
template <class F, class S = typename F::Scalar>
std::pair<std::vector<Affine<S>>, std::vector<int>> rref_affine(const F& f,
                                                                const std::vector<LinRow<S>>& rows,
                                                                int nunk,
                                                                std::vector<int>* placed_rows =
                                                                    nullptr) {
  // forward pass: frozen pivot rows keyed by pivot column (their min column)
  std::map<int, LinRow<S>> piv;
  for (std::size_t ri = 0; ri < rows.size(); ++ri) {
    const auto& r = rows[ri];
    std::map<int, S> cf;
    for (const auto& [c, v] : r.first)
      if (!v.is_zero()) cf[c] = v;
    S rhs = r.second;
    bool placed = false;
    while (!cf.empty()) {
      int c = cf.begin()->first;
      auto it = piv.find(c);
      if (it == piv.end()) {
        S inv = f.one() / cf.begin()->second;
        for (auto& [j, v] : cf) {
          v = v * inv;
          // frozen rows get multiplied into every later row; keep them reduced
          f.canonicalize(v);
        }
        rhs = rhs * inv;
        f.canonicalize(rhs);
        piv.emplace(c, LinRow<S>{std::move(cf), std::move(rhs)});
        if (placed_rows) placed_rows->push_back(static_cast<int>(ri));
        placed = true;
        break;
      }
      S fac = cf.begin()->second;
      cf.erase(cf.begin());
      for (const auto& [j, v] : it->second.first) {
        if (j == c) continue;
        auto jt = cf.try_emplace(j, f.zero()).first;
        jt->second = jt->second - fac * v;
        if (jt->second.is_zero()) cf.erase(jt);
      }
      rhs = rhs - fac * it->second.second;
    }
    if (!placed && !rhs.is_zero()) throw SolveError("inconsistent linear system");
  }

  std::vector<Affine<S>> assign(static_cast<std::size_t>(nunk), Affine<S>{f.zero(), {}});
  std::vector<int> free_ids;
  for (int j = 0; j < nunk; ++j)
    if (!piv.count(j)) {
      assign[static_cast<std::size_t>(j)].terms.emplace(j, f.one());
      free_ids.push_back(j);
    }
  // resolve pivots in descending column order; each pivot row references only
  // larger columns, which are already resolved
  for (auto it = piv.rbegin(); it != piv.rend(); ++it) {
    int c = it->first;
    Affine<S> a{it->second.second, {}};
    for (const auto& [j, v] : it->second.first) {
      if (j == c) continue;
      const Affine<S>& rep = assign[static_cast<std::size_t>(j)];
      a.cst = a.cst - v * rep.cst;
      for (const auto& [s, w] : rep.terms) {
        auto st = a.terms.try_emplace(s, f.zero()).first;
        st->second = st->second - v * w;
        if (st->second.is_zero()) a.terms.erase(st);
      }
    }
    // keep resolved coefficients reduced: later pivots and every polynomial
    // substitution downstream multiply through these
    f.canonicalize(a.cst);
    for (auto& [s, w] : a.terms) f.canonicalize(w);
    assign[static_cast<std::size_t>(c)] = std::move(a);
  }
  return {std::move(assign), std::move(free_ids)};
}

}  // namespace pathrep
