#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#ifdef PATHREP_SOLVER_TIMING
#include <chrono>
#include <cstdio>
#endif

#include "pathrep/linsolve.hpp"

namespace pathrep {

// One multiplicand of a product term: an already-known scalar or an unknown.
template <class S>
struct Factor {
  bool known = false;
  S val{};
  int uid = -1;

  static Factor make_known(S v) {
    Factor x;
    x.known = true;
    x.val = std::move(v);
    return x;
  }
  static Factor make_unknown(int u) {
    Factor x;
    x.uid = u;
    return x;
  }
};

// sign * product(factors); an equation is a sum of such terms equal to zero.
template <class S>
struct ProdTerm {
  int sign = 1;
  std::vector<Factor<S>> factors;
};

template <class S>
using PolyEq = std::vector<ProdTerm<S>>;

// A gauge direction candidate: unknown uid spanning edge (a, b) of the
// middle-label graph. Seeding follows a spanning forest of those edges.
struct SeedEdge {
  int uid, a, b;
};

template <class S>
struct SolveResult {
  std::vector<S> vals;
  int nfree = 0;
};

// Replayable trace of one solve's decisions: which linear rows carried
// pivots, the free symbols the reduction left, and the order in which
// polynomial rules fired. Recorded on a cheap evaluation mirror, then
// replayed with exact arithmetic over just the recorded rows and equations.
struct SolveScript {
  enum Kind { kLin1, kSquare, kBinomial, kLinearRow, kSeed };
  struct Step {
    Kind kind;
    int eq;   // firing equation index; -1 for seeds
    int sym;  // symbol resolved
  };
  std::vector<int> pivot_rows;
  std::vector<int> free_ids;
  std::vector<Step> steps;
};

namespace detail {

// One run of the constraint solve. With `rec` set, every decision is recorded
// into a script. With `plan` set, that script is replayed instead of
// searching: only the recorded pivot rows enter row reduction and only the
// recorded equations are expanded, each rule's precondition re-verified on
// the exact data (any mismatch throws SolveError, which the caller answers
// with a full unscripted run). Equations the recording run found redundant
// are skipped here; the invariant checks on the solved family and on every
// registered block re-establish those identities exactly.
template <class F, class S = typename F::Scalar>
SolveResult<S> solve_core(const F& f, const std::string& tag,
                          const std::vector<LinRow<S>>& lin_rows,
                          const std::vector<PolyEq<S>>& poly_eqs, int nunk,
                          const std::vector<SeedEdge>& seedable, SolveScript* rec,
                          const SolveScript* plan) {
  using Mono = std::vector<int>;  // sorted multiset of symbol ids
  using Poly = std::map<Mono, S>;

#ifdef PATHREP_SOLVER_TIMING
  auto tick = [] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
  };
  double t0 = tick();
#endif

  std::pair<std::vector<Affine<S>>, std::vector<int>> red;
  if (plan) {
    std::vector<LinRow<S>> sub;
    sub.reserve(plan->pivot_rows.size());
    for (int r : plan->pivot_rows) sub.push_back(lin_rows[static_cast<std::size_t>(r)]);
    red = rref_affine(f, sub, nunk);
    if (red.second != plan->free_ids)
      throw SolveError("scripted row reduction left a different free set in family " + tag);
  } else {
    red = rref_affine(f, lin_rows, nunk, rec ? &rec->pivot_rows : nullptr);
    if (rec) rec->free_ids = red.second;
  }
  const auto& assign = red.first;
  const auto& free_ids = red.second;

#ifdef PATHREP_SOLVER_TIMING
  double t1 = tick();
  std::fprintf(stderr, "[solve %s%s] rref: %.2fs rows=%zu nunk=%d free=%zu\n", tag.c_str(),
               plan ? "/replay" : (rec ? "/record" : ""), t1 - t0,
               plan ? plan->pivot_rows.size() : lin_rows.size(), nunk, free_ids.size());
#endif

  auto poly_add = [&](Poly& p, const Mono& m, const S& c) {
    auto it = p.try_emplace(m, f.zero()).first;
    it->second += c;
    if (it->second.is_zero()) p.erase(it);
  };

  auto poly_mul = [&](const Poly& p1, const Poly& p2) {
    Poly out;
    for (const auto& [m1, c1] : p1)
      for (const auto& [m2, c2] : p2) {
        Mono m;
        m.reserve(m1.size() + m2.size());
        std::merge(m1.begin(), m1.end(), m2.begin(), m2.end(), std::back_inserter(m));
        poly_add(out, m, c1 * c2);
      }
    return out;
  };

  auto affine_poly = [&](const Affine<S>& a) {
    Poly p;
    if (!a.cst.is_zero()) p.emplace(Mono{}, a.cst);
    for (const auto& [s, c] : a.terms) p.emplace(Mono{s}, c);
    return p;
  };

  auto expand = [&](const PolyEq<S>& eq) {
    Poly p;
    for (const ProdTerm<S>& term : eq) {
      Poly t;
      t.emplace(Mono{}, f.from_int(term.sign));
      for (const Factor<S>& fac : term.factors) {
        if (fac.known) {
          if (fac.val.is_zero()) {
            t.clear();
            break;
          }
          for (auto& [m, c] : t) c = c * fac.val;
        } else {
          t = poly_mul(t, affine_poly(assign[static_cast<std::size_t>(fac.uid)]));
        }
      }
      for (const auto& [m, c] : t) poly_add(p, m, c);
    }
    return p;
  };

  auto syms_of = [](const Poly& p) {
    std::set<int> s;
    for (const auto& [m, c] : p) s.insert(m.begin(), m.end());
    return s;
  };

  std::vector<Poly> polys(poly_eqs.size());
  std::vector<std::set<int>> psyms(poly_eqs.size());
  std::set<int> active;
  if (!plan) {
    for (std::size_t i = 0; i < poly_eqs.size(); ++i) {
      polys[i] = expand(poly_eqs[i]);
      psyms[i] = syms_of(polys[i]);
      active.insert(static_cast<int>(i));
    }
  }

#ifdef PATHREP_SOLVER_TIMING
  double t2 = tick();
  if (!plan) {
    std::size_t nmono = 0;
    for (const auto& p : polys) nmono += p.size();
    std::fprintf(stderr, "[solve %s] expand: %.2fs polys=%zu monos=%zu\n", tag.c_str(), t2 - t1,
                 polys.size(), nmono);
  }
#endif

  std::set<int> unresolved(free_ids.begin(), free_ids.end());
  std::vector<std::pair<int, Poly>> order;

  auto subst = [&](const Poly& p, int s, const Poly& expr) {
    Poly out;
    for (const auto& [mono, c] : p) {
      auto lo = std::lower_bound(mono.begin(), mono.end(), s);
      auto hi = std::upper_bound(mono.begin(), mono.end(), s);
      auto cnt = hi - lo;
      Mono base(mono.begin(), lo);
      base.insert(base.end(), hi, mono.end());
      Poly t;
      t.emplace(std::move(base), c);
      for (long i = 0; i < cnt; ++i) t = poly_mul(t, expr);
      for (const auto& [m2, c2] : t) poly_add(out, m2, c2);
    }
    return out;
  };

  auto eliminate = [&](int s, Poly expr) {
    for (auto& [m, c] : expr) f.canonicalize(c);  // reused in every substitution
    order.emplace_back(s, std::move(expr));
    unresolved.erase(s);
    const Poly& e = order.back().second;
    for (int i : active) {
      if (!psyms[static_cast<std::size_t>(i)].count(s)) continue;
      polys[static_cast<std::size_t>(i)] = subst(polys[static_cast<std::size_t>(i)], s, e);
      psyms[static_cast<std::size_t>(i)] = syms_of(polys[static_cast<std::size_t>(i)]);
    }
  };

  if (plan) {
    // expansion happens on demand, against the substitutions applied so far
    auto ensure_expanded = [&](int i) {
      auto idx = static_cast<std::size_t>(i);
      if (active.count(i)) return;
      if (i < 0 || idx >= poly_eqs.size())
        throw SolveError("scripted solve references a missing equation in family " + tag);
      polys[idx] = expand(poly_eqs[idx]);
      for (const auto& [s, e] : order) {
        bool mentions = false;
        for (const auto& [m, c] : polys[idx])
          if (std::binary_search(m.begin(), m.end(), s)) {
            mentions = true;
            break;
          }
        if (mentions) polys[idx] = subst(polys[idx], s, e);
      }
      psyms[idx] = syms_of(polys[idx]);
      active.insert(i);
    };

    for (const SolveScript::Step& st : plan->steps) {
      if (!unresolved.count(st.sym))
        throw SolveError("scripted solve repeats a symbol in family " + tag);
      if (st.kind == SolveScript::kSeed) {
        Poly expr;
        expr.emplace(Mono{}, f.one());
        eliminate(st.sym, std::move(expr));
        continue;
      }
      ensure_expanded(st.eq);
      Poly& p = polys[static_cast<std::size_t>(st.eq)];
      int s = st.sym;
      Poly expr;
      switch (st.kind) {
        case SolveScript::kLin1: {
          bool shape = psyms[static_cast<std::size_t>(st.eq)] == std::set<int>{s} &&
                       p.count(Mono{s});
          for (const auto& [m, c] : p) shape = shape && m.size() <= 1;
          if (!shape)
            throw SolveError("scripted one-symbol rule does not apply in family " + tag);
          S v = -((p.count(Mono{}) ? p.at(Mono{}) : f.zero()) / p.at(Mono{s}));
          if (!v.is_zero()) expr.emplace(Mono{}, std::move(v));
          break;
        }
        case SolveScript::kSquare: {
          bool shape = psyms[static_cast<std::size_t>(st.eq)] == std::set<int>{s} &&
                       p.count(Mono{s, s});
          for (const auto& [m, c] : p) shape = shape && m.size() <= 2;
          if (!shape)
            throw SolveError("scripted square rule does not apply in family " + tag);
          S c2 = p.at(Mono{s, s});
          S c1 = p.count(Mono{s}) ? p.at(Mono{s}) : f.zero();
          S c0 = p.count(Mono{}) ? p.at(Mono{}) : f.zero();
          if (!(c1 * c1 == f.from_int(4) * c2 * c0))
            throw SolveError("scripted square rule is not a perfect square in family " + tag);
          S v = -(c1 / (f.from_int(2) * c2));
          if (!v.is_zero()) expr.emplace(Mono{}, std::move(v));
          break;
        }
        case SolveScript::kBinomial: {
          if (p.size() != 2)
            throw SolveError("scripted binomial rule does not apply in family " + tag);
          auto it1 = p.begin();
          auto it2 = std::next(it1);
          const Mono &m1 = it1->first, &m2 = it2->first;
          Mono r1, r2;
          std::set_difference(m1.begin(), m1.end(), m2.begin(), m2.end(), std::back_inserter(r1));
          std::set_difference(m2.begin(), m2.end(), m1.begin(), m1.end(), std::back_inserter(r2));
          Mono other;
          S cs = f.zero(), co = f.zero();
          if (r1 == Mono{s}) {
            other = r2;
            cs = it1->second;
            co = it2->second;
          } else if (r2 == Mono{s}) {
            other = r1;
            cs = it2->second;
            co = it1->second;
          } else {
            throw SolveError("scripted binomial rule does not isolate its symbol in family " +
                             tag);
          }
          expr.emplace(std::move(other), -(co / cs));
          break;
        }
        case SolveScript::kLinearRow: {
          bool shape = !p.empty() && p.count(Mono{s});
          for (const auto& [m, c] : p) shape = shape && m.size() <= 1;
          if (!shape)
            throw SolveError("scripted linear rule does not apply in family " + tag);
          S c = p.at(Mono{s});
          for (const auto& [m, v] : p) {
            if (m == Mono{s}) continue;
            expr.emplace(m, -(v / c));
          }
          break;
        }
        case SolveScript::kSeed:
          break;  // handled above
      }
      eliminate(s, std::move(expr));
      active.erase(st.eq);
    }
    if (!unresolved.empty())
      throw SolveError("scripted solve left symbols unresolved in family " + tag);
    for (int i : active)
      if (!polys[static_cast<std::size_t>(i)].empty())
        throw SolveError("scripted solve left a residual equation in family " + tag);
  } else {
    // union-find over middle-label ids, for gauge seeding
    std::map<int, int> parent;
    auto find = [&](int x) {
      int r = x;
      while (true) {
        auto it = parent.try_emplace(r, r).first;
        if (it->second == r) break;
        r = it->second;
      }
      while (parent[x] != r) {
        int nx = parent[x];
        parent[x] = r;
        x = nx;
      }
      return r;
    };

    auto record = [&](SolveScript::Kind k, int eq, int sym) {
      if (rec) rec->steps.push_back({k, eq, sym});
    };

    while (!unresolved.empty()) {
      bool progress = false;

      // pass 1: equations over a single symbol
      {
        std::vector<int> snap(active.begin(), active.end());
        for (int i : snap) {
          if (!active.count(i)) continue;
          Poly& p = polys[static_cast<std::size_t>(i)];
          if (p.empty()) {
            active.erase(i);
            continue;
          }
          if (psyms[static_cast<std::size_t>(i)].size() != 1) continue;
          int s = *psyms[static_cast<std::size_t>(i)].begin();
          std::size_t deg = 0;
          for (const auto& [m, c] : p) deg = std::max(deg, m.size());
          if (deg == 1) {
            S c1 = p.at(Mono{s});
            S c0 = p.count(Mono{}) ? p.at(Mono{}) : f.zero();
            Poly expr;
            S v = -(c0 / c1);
            if (!v.is_zero()) expr.emplace(Mono{}, std::move(v));
            record(SolveScript::kLin1, i, s);
            eliminate(s, std::move(expr));
            active.erase(i);
            progress = true;
          } else if (deg == 2 && p.count(Mono{s, s})) {
            S c2 = p.at(Mono{s, s});
            S c1 = p.count(Mono{s}) ? p.at(Mono{s}) : f.zero();
            S c0 = p.count(Mono{}) ? p.at(Mono{}) : f.zero();
            if (c1 * c1 == f.from_int(4) * c2 * c0) {
              Poly expr;
              S v = -(c1 / (f.from_int(2) * c2));
              if (!v.is_zero()) expr.emplace(Mono{}, std::move(v));
              record(SolveScript::kSquare, i, s);
              eliminate(s, std::move(expr));
              active.erase(i);
              progress = true;
            }
          }
        }
      }
      if (progress) continue;

      // pass 1.5: binomial c*m1 + d*m2 = 0 where one side, after stripping the
      // shared factor, is a lone symbol (generic nonvanishing of the stripped
      // factor; the invariant post-checks catch violations)
      for (int i : std::vector<int>(active.begin(), active.end())) {
        const Poly& p = polys[static_cast<std::size_t>(i)];
        if (p.size() != 2) continue;
        auto it1 = p.begin();
        auto it2 = std::next(it1);
        const Mono &m1 = it1->first, &m2 = it2->first;
        Mono r1, r2;
        std::set_difference(m1.begin(), m1.end(), m2.begin(), m2.end(), std::back_inserter(r1));
        std::set_difference(m2.begin(), m2.end(), m1.begin(), m1.end(), std::back_inserter(r2));
        int s;
        Mono other;
        S cs = f.zero(), co = f.zero();
        if (r1.size() == 1) {
          s = r1[0];
          other = r2;
          cs = it1->second;
          co = it2->second;
        } else if (r2.size() == 1) {
          s = r2[0];
          other = r1;
          cs = it2->second;
          co = it1->second;
        } else {
          continue;
        }
        Poly expr;
        expr.emplace(std::move(other), -(co / cs));
        record(SolveScript::kBinomial, i, s);
        eliminate(s, std::move(expr));
        active.erase(i);
        progress = true;
        break;
      }
      if (progress) continue;

      // pass 2: symbolic elimination from a multi-symbol linear equation
      for (int i : std::vector<int>(active.begin(), active.end())) {
        const Poly& p = polys[static_cast<std::size_t>(i)];
        if (p.empty()) continue;
        bool linear = true;
        for (const auto& [m, c] : p)
          if (m.size() > 1) {
            linear = false;
            break;
          }
        if (!linear) continue;
        int s = *psyms[static_cast<std::size_t>(i)].rbegin();
        S c = p.at(Mono{s});
        Poly expr;
        for (const auto& [m, v] : p) {
          if (m == Mono{s}) continue;
          expr.emplace(m, -(v / c));
        }
        record(SolveScript::kLinearRow, i, s);
        eliminate(s, std::move(expr));
        active.erase(i);
        progress = true;
        break;
      }
      if (progress) continue;

      // pass 3: seed a gauge direction, canonically to 1
      const SeedEdge* pick = nullptr;
      for (const SeedEdge& se : seedable) {
        if (unresolved.count(se.uid) && find(se.a) != find(se.b)) {
          pick = &se;
          break;
        }
      }
      int s;
      if (pick) {
        parent[find(pick->a)] = find(pick->b);
        s = pick->uid;
      } else {
        s = *unresolved.begin();
      }
      Poly expr;
      expr.emplace(Mono{}, f.one());
      record(SolveScript::kSeed, -1, s);
      eliminate(s, std::move(expr));
    }

    for (std::size_t i = 0; i < polys.size(); ++i) {
      if (!polys[i].empty()) {
        std::string syms;
        for (int s : psyms[i]) syms += " x" + std::to_string(s);
        throw SolveError("polynomial residual in family " + tag + ": equation " +
                         std::to_string(i) + " keeps " + std::to_string(polys[i].size()) +
                         " monomials over" + syms);
      }
    }
  }

#ifdef PATHREP_SOLVER_TIMING
  double t3 = tick();
  std::fprintf(stderr, "[solve %s%s] eliminate: %.2fs steps=%zu\n", tag.c_str(),
               plan ? "/replay" : (rec ? "/record" : ""), t3 - t2, order.size());
#endif

  std::map<int, S> symvals;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    S v = f.zero();
    for (const auto& [mono, c] : it->second) {
      S t = c;
      for (int x : mono) t = t * symvals.at(x);
      v += t;
    }
    symvals[it->first] = std::move(v);
  }

#ifdef PATHREP_SOLVER_TIMING
  std::fprintf(stderr, "[solve %s] backsub: %.2fs\n", tag.c_str(), tick() - t3);
#endif

  SolveResult<S> res;
  res.nfree = static_cast<int>(free_ids.size());
  res.vals.reserve(static_cast<std::size_t>(nunk));
  for (int uid = 0; uid < nunk; ++uid) {
    const Affine<S>& a = assign[static_cast<std::size_t>(uid)];
    S v = a.cst;
    for (const auto& [sym, c] : a.terms) v += c * symvals.at(sym);
    f.canonicalize(v);  // downstream invariant checks run on reduced values
    res.vals.push_back(std::move(v));
  }
  return res;
}

}  // namespace detail

// Solves the mixed linear/polynomial system for nunk unknowns. Linear rows go
// through sparse row reduction; the affine leftovers parametrize the
// polynomial equations, which are resolved by alternating elimination passes
// (single-symbol, binomial factor-strip, all-linear Gaussian) with canonical
// seeding of genuine gauge directions (value 1). Throws SolveError when the
// system is inconsistent or leaves a polynomial residual.
template <class F, class S = typename F::Scalar>
SolveResult<S> solve_constrained(const F& f, const std::string& tag,
                                 const std::vector<LinRow<S>>& lin_rows,
                                 const std::vector<PolyEq<S>>& poly_eqs, int nunk,
                                 const std::vector<SeedEdge>& seedable) {
  return detail::solve_core(f, tag, lin_rows, poly_eqs, nunk, seedable, nullptr, nullptr);
}

// Like solve_constrained, additionally recording every decision into `script`
// so a mirrored system can replay it without searching.
template <class F, class S = typename F::Scalar>
SolveResult<S> solve_recorded(const F& f, const std::string& tag,
                              const std::vector<LinRow<S>>& lin_rows,
                              const std::vector<PolyEq<S>>& poly_eqs, int nunk,
                              const std::vector<SeedEdge>& seedable, SolveScript& script) {
  return detail::solve_core(f, tag, lin_rows, poly_eqs, nunk, seedable, &script, nullptr);
}

// Replays a recorded script over this field's data. lin_rows must hold
// exactly the rows named by script.pivot_rows (in order) and poly_eqs the
// equations its steps reference; throws SolveError on any disagreement with
// the recording, leaving the caller to rerun unscripted.
template <class F, class S = typename F::Scalar>
SolveResult<S> solve_replayed(const F& f, const std::string& tag,
                              const std::vector<LinRow<S>>& lin_rows,
                              const std::vector<PolyEq<S>>& poly_eqs, int nunk,
                              const SolveScript& script) {
  return detail::solve_core(f, tag, lin_rows, poly_eqs, nunk, {}, nullptr, &script);
}

}  // namespace pathrep
