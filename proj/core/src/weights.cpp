#include "pathrep/weights.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <set>

namespace pathrep::g2 {

long casimir(Weight w) {
  long a = w.a, b = w.b;
  return 2 * a * a + 6 * b * b + 6 * a * b + 10 * a + 18 * b;
}

namespace {

constexpr std::array<std::pair<int, int>, 6> kMoves = {{
    {1, 0}, {-1, 0}, {2, -1}, {-2, 1}, {-1, 1}, {1, -1},
}};

// Short and long root orbits of the 7-, 14- and 27-dimensional objects, in
// fundamental coordinates. Used by the Racah-style multiplicity count.
constexpr std::array<std::pair<int, int>, 3> kShort = {{{1, 0}, {2, -1}, {-1, 1}}};
constexpr std::array<std::pair<int, int>, 3> kLong = {{{3, -1}, {0, 1}, {-3, 2}}};

std::vector<std::pair<int, int>> channel_weights(Weight gamma) {
  std::vector<std::pair<int, int>> out;
  auto negp = [](std::pair<int, int> p) { return std::make_pair(-p.first, -p.second); };
  if (gamma == Weight{0, 0}) {
    out.push_back({0, 0});
  } else if (gamma == Weight{1, 0}) {
    out.push_back({0, 0});
    for (auto s : kShort) {
      out.push_back(s);
      out.push_back(negp(s));
    }
  } else if (gamma == Weight{0, 1}) {
    out.assign(2, {0, 0});
    for (auto s : kShort) {
      out.push_back(s);
      out.push_back(negp(s));
    }
    for (auto l : kLong) {
      out.push_back(l);
      out.push_back(negp(l));
    }
  } else if (gamma == Weight{2, 0}) {
    // short-root weights carry multiplicity 2 here
    out.assign(3, {0, 0});
    for (auto s : kShort) {
      out.push_back(s);
      out.push_back(s);
      out.push_back(negp(s));
      out.push_back(negp(s));
      out.push_back({2 * s.first, 2 * s.second});
      out.push_back({-2 * s.first, -2 * s.second});
    }
    for (auto l : kLong) {
      out.push_back(l);
      out.push_back(negp(l));
    }
  } else {
    throw std::domain_error("not a channel of the 7-dimensional object");
  }
  return out;
}

// Move x into the dominant chamber by simple reflections, tracking the sign.
// Returns {0,0,sign=0} when x lies on a wall (cancels in the alternating sum).
struct Dominated {
  int a, b, sign;
};

Dominated dominate(int a, int b) {
  int sgn = 1;
  for (int guard = 0; guard < 200; ++guard) {
    if (a < 0) {
      int na = -a, nb = a + b;
      a = na;
      b = nb;
      sgn = -sgn;
    } else if (b < 0) {
      int na = a + 3 * b, nb = -b;
      a = na;
      b = nb;
      sgn = -sgn;
    } else {
      if (a == 0 || b == 0) return {0, 0, 0};
      return {a, b, sgn};
    }
  }
  throw std::runtime_error("chamber reflection did not terminate");
}

}  // namespace

std::vector<Weight> tensor_neighbors(Weight w) {
  std::set<Weight> out;
  for (auto [da, db] : kMoves) {
    int x = w.a + da, y = w.b + db;
    if (x >= 0 && y >= 0) out.insert({x, y});
  }
  if (w.a != 0) out.insert(w);
  return {out.begin(), out.end()};
}

long weyl_dim(Weight w) {
  long a = w.a, b = w.b;
  return (a + 1) * (b + 1) * (a + b + 2) * (a + 2 * b + 3) * (a + 3 * b + 4) * (2 * a + 3 * b + 5) / 120;
}

QdimSpec qdim_spec(Weight w) {
  int a = w.a, b = w.b;
  return {{a + 1, 2 * a + 3 * b + 5, a + 3 * b + 4, 3 * a + 3 * b + 6, 3 * b + 3, 3 * a + 6 * b + 9},
          {1, 5, 4, 6, 3, 9}};
}

namespace {

LaurentPoly bracket(int n) {
  LaurentPoly p;
  if (n == 0) return p;
  int s = n > 0 ? 1 : -1;
  int m = s * n;
  for (int k = 0; k < m; ++k) p = p + LaurentPoly::monomial(m - 1 - 2 * k, Rat(s));
  return p;
}

}  // namespace

const LaurentPoly& qdim_poly(Weight w) {
  static std::mutex mu;
  static std::map<Weight, LaurentPoly> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find(w);
  if (it != cache.end()) return it->second;

  QdimSpec s = qdim_spec(w);
  LaurentPoly num = LaurentPoly::from_int(1);
  LaurentPoly den = LaurentPoly::from_int(1);
  for (int x : s.num) num = num * bracket(x);
  for (int x : s.den) den = den * bracket(x);
  auto quot = num.divided_exact(den);
  if (!quot) throw std::logic_error("qdim bracket quotient is not polynomial");

  LaurentPoly folded;
  quot->for_terms([&](int e, const Rat& c) {
    if (e % 2 != 0) throw std::logic_error("qdim bracket quotient has odd exponent");
    folded = folded + LaurentPoly::monomial(e / 2, c);
  });
  return cache.emplace(w, std::move(folded)).first->second;
}

int rmult(Weight lam, Weight delta, Weight gamma) {
  int acc = 0;
  int ta = lam.a + 1, tb = lam.b + 1;
  for (auto [na, nb] : channel_weights(gamma)) {
    Dominated d = dominate(delta.a + na + 1, delta.b + nb + 1);
    if (d.sign != 0 && d.a == ta && d.b == tb) acc += d.sign;
  }
  return acc;
}

long twist_exponent(Weight w) { return casimir(w); }

}  // namespace pathrep::g2
