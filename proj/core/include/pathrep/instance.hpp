#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pathrep/qscalar.hpp"

namespace pathrep {

// Instance-opaque node label: weight coordinates for the G2 lattice,
// partition parts for Young's lattice. Ordered lexicographically.
using Label = std::vector<int>;

// One simple summand of V tensor V, with its braiding eigenvalue sign*q^qexp.
struct Channel {
  Label tag;
  int sign;
  int qexp;
};

struct ChannelData {
  std::vector<Channel> channels;
  // index of the rank-1 channel driving the projector machinery, -1 if none
  int distinguished = -1;
  // index of the channel that appears only on loop (delta == lambda) blocks
  int loop = -1;
  // sigma = q^generator_scale * (normalized block A')
  int generator_scale = 0;
};

// A self-dual-object fusion lattice together with the scalar data the
// representation builder needs. Successor rules are pure and deterministic.
class LatticeSpec {
 public:
  virtual ~LatticeSpec() = default;

  virtual const std::string& name() const = 0;
  virtual Label root() const = 0;
  virtual std::vector<Label> successors(const Label& w) const = 0;  // sorted, unique
  virtual long casimir(const Label& w) const = 0;                   // always even
  virtual int exponent_shift() const = 0;  // added to every exponent e(t)
  virtual int twist_step() const = 0;      // per-strand exponent in the full twist
  virtual const ChannelData& channel_data() const = 0;
  // multiplicity of each channel inside the (delta, lambda) block, aligned
  // with channel_data().channels; entries sum to the block dimension
  virtual std::vector<int> channel_mults(const Label& d, const Label& l) const = 0;

  virtual bool has_qdim() const { return false; }
  virtual std::pair<std::vector<int>, std::vector<int>> qdim_bracket(const Label&) const {
    throw std::logic_error("instance has no q-dimension data");
  }

  virtual std::string label_str(const Label& w) const;
};

// e(t) for the length-2 path d -> m -> l.
long exponent_e(const LatticeSpec& spec, const Label& d, const Label& m, const Label& l);

// Loop weight of the label under the Markov trace: the bracket-product form
// whose exponents match the braiding normalization (doubled relative to the
// character-sum q-dimension). This is the weight entering partial-trace and
// projector identities.
template <class F>
typename F::Scalar trace_weight(const F& f, const LatticeSpec& spec, const Label& w) {
  auto [num, den] = spec.qdim_bracket(w);
  auto r = f.one();
  auto s = f.one();
  for (int x : num) r = r * f.qint(x);
  for (int x : den) s = s * f.qint(x);
  return r / s;
}

template <class F>
typename F::Scalar channel_alpha(const F& f, const Channel& c) {
  auto v = f.qpow(c.qexp);
  return c.sign < 0 ? -v : v;
}

// Scalar of the full twist on paths of length n ending at w.
template <class F>
typename F::Scalar instance_central_scalar(const F& f, const LatticeSpec& spec, const Label& w, int n) {
  return f.qpow(static_cast<int>(spec.casimir(w) + static_cast<long>(spec.twist_step()) * n));
}

std::shared_ptr<const LatticeSpec> g2_instance();
std::shared_ptr<const LatticeSpec> young_instance();
std::shared_ptr<const LatticeSpec> make_instance(const std::string& name);

// Channel data of the Hecke-algebra instance on Young's lattice.
const ChannelData& young_channel_data();

}  // namespace pathrep
