#include "pathrep/instance.hpp"

#include <algorithm>
#include <set>

#include "pathrep/weights.hpp"

namespace pathrep {

std::string LatticeSpec::label_str(const Label& w) const {
  if (std::all_of(w.begin(), w.end(), [](int x) { return x == 0; })) return "0";
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(w[i]);
  }
  return s;
}

long exponent_e(const LatticeSpec& spec, const Label& d, const Label& m, const Label& l) {
  long s = spec.casimir(d) + spec.casimir(l);
  if (s % 2 != 0) throw std::logic_error("exponent_e: odd casimir sum");
  return spec.casimir(m) - s / 2 + spec.exponent_shift();
}

namespace {

g2::Weight to_weight(const Label& w) { return {w[0], w[1]}; }
Label from_weight(g2::Weight w) { return {w.a, w.b}; }

class G2Instance final : public LatticeSpec {
 public:
  G2Instance() {
    cd_.channels = {
        {{0, 0}, +1, -12},
        {{0, 1}, -1, 0},
        {{1, 0}, -1, -6},
        {{2, 0}, +1, 2},
    };
    cd_.distinguished = 2;
    cd_.loop = 0;
    cd_.generator_scale = 1;
  }

  const std::string& name() const override { return name_; }
  Label root() const override { return {0, 0}; }

  std::vector<Label> successors(const Label& w) const override {
    std::vector<Label> out;
    for (g2::Weight v : g2::tensor_neighbors(to_weight(w))) out.push_back(from_weight(v));
    return out;
  }

  long casimir(const Label& w) const override { return g2::casimir(to_weight(w)); }
  int exponent_shift() const override { return 1; }
  int twist_step() const override { return -12; }
  const ChannelData& channel_data() const override { return cd_; }

  std::vector<int> channel_mults(const Label& d, const Label& l) const override {
    std::vector<int> out;
    out.reserve(cd_.channels.size());
    for (const Channel& ch : cd_.channels)
      out.push_back(g2::rmult(to_weight(l), to_weight(d), to_weight(ch.tag)));
    return out;
  }

  bool has_qdim() const override { return true; }
  std::pair<std::vector<int>, std::vector<int>> qdim_bracket(const Label& w) const override {
    g2::QdimSpec s = g2::qdim_spec(to_weight(w));
    return {{s.num.begin(), s.num.end()}, {s.den.begin(), s.den.end()}};
  }

 private:
  std::string name_ = "g2";
  ChannelData cd_;
};

std::vector<std::pair<int, int>> boxes(const Label& p) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < static_cast<int>(p.size()); ++i)
    for (int j = 0; j < p[i]; ++j) out.emplace_back(i, j);
  return out;
}

// small/big differ by exactly one box
std::pair<int, int> added_box(const Label& big, const Label& small) {
  for (std::size_t i = 0; i < big.size(); ++i) {
    int have = i < small.size() ? small[i] : 0;
    if (big[i] != have) return {static_cast<int>(i), big[i] - 1};
  }
  throw std::logic_error("added_box: shapes equal");
}

class YoungInstance final : public LatticeSpec {
 public:
  YoungInstance() {
    cd_.channels = {
        {{1, 1}, -1, -1},
        {{2}, +1, 1},
    };
    cd_.distinguished = -1;
    cd_.loop = -1;
    cd_.generator_scale = 0;
  }

  const std::string& name() const override { return name_; }
  Label root() const override { return {}; }

  std::vector<Label> successors(const Label& p) const override {
    std::set<Label> res;
    for (std::size_t i = 0; i <= p.size(); ++i) {
      Label t = p;
      if (i == p.size())
        t.push_back(1);
      else
        t[i] += 1;
      if (std::is_sorted(t.rbegin(), t.rend())) res.insert(t);
    }
    return {res.begin(), res.end()};
  }

  // twice the content sum; keeps every exponent an integer
  long casimir(const Label& p) const override {
    long acc = 0;
    for (auto [i, j] : boxes(p)) acc += j - i;
    return 2 * acc;
  }

  int exponent_shift() const override { return 0; }
  int twist_step() const override { return 0; }
  const ChannelData& channel_data() const override { return cd_; }

  std::vector<int> channel_mults(const Label& d, const Label& l) const override {
    int same_row = 0, same_col = 0, k = 0;
    for (const Label& m : successors(d)) {
      auto up = successors(m);
      if (!std::binary_search(up.begin(), up.end(), l)) continue;
      ++k;
      auto b1 = added_box(m, d);
      auto b2 = added_box(l, m);
      if (b1.first == b2.first) ++same_row;
      if (b1.second == b2.second) ++same_col;
    }
    int split = (k - same_row - same_col) / 2;
    return {same_col + split, same_row + split};
  }

 private:
  std::string name_ = "young";
  ChannelData cd_;
};

}  // namespace

std::shared_ptr<const LatticeSpec> g2_instance() {
  static const auto inst = std::make_shared<const G2Instance>();
  return inst;
}

std::shared_ptr<const LatticeSpec> young_instance() {
  static const auto inst = std::make_shared<const YoungInstance>();
  return inst;
}

std::shared_ptr<const LatticeSpec> make_instance(const std::string& name) {
  if (name == "g2") return g2_instance();
  if (name == "young") return young_instance();
  throw std::invalid_argument("unknown instance: " + name);
}

const ChannelData& young_channel_data() { return young_instance()->channel_data(); }

}  // namespace pathrep
