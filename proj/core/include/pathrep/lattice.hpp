#pragma once

#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "pathrep/instance.hpp"

namespace pathrep {

// Interned view of one instance's fusion graph. Labels get small integer ids
// (first-seen order); paths are id sequences. All queries memoize under an
// internal lock, so a constructed lattice is safe to share across threads.
// References returned by label/succ/level/paths_* stay valid for the lattice
// lifetime.
class PathLattice {
 public:
  explicit PathLattice(std::shared_ptr<const LatticeSpec> spec);

  const LatticeSpec& spec() const { return *spec_; }
  int root_id() const { return root_; }

  int intern(const Label& w);
  const Label& label(int id) const;
  std::string label_str(int id) const;

  // successor ids in the instance's label order
  const std::vector<int>& succ(int id);
  // ids reachable in exactly n steps from the root, sorted by label; empty for n < 0
  const std::vector<int>& level(int n);
  // m with d -> m -> l
  const std::vector<int>& mids(int d, int l);
  // admissible (nu, mu) with g -> nu -> mu -> lp
  std::vector<std::pair<int, int>> context_paths(int g, int lp);

  long npaths(int d, int l, int k);
  long multiplicity(int l, int n) { return npaths(root_, l, n); }

  // all id sequences d = t0 -> ... -> tk = l, lexicographic under label order
  const std::vector<std::vector<int>>& paths_between(int d, int l, int k);
  const std::vector<std::vector<int>>& paths_to(int l, int n) {
    return paths_between(root_, l, n);
  }

 private:
  int intern_locked(const Label& w);
  const std::vector<int>& succ_locked(int id);
  long npaths_locked(int d, int l, int k);

  std::shared_ptr<const LatticeSpec> spec_;
  mutable std::recursive_mutex mu_;
  std::map<Label, int> ids_;
  std::deque<Label> labels_;
  int root_;
  std::map<int, std::vector<int>> succ_;
  std::map<int, std::vector<int>> levels_;
  std::map<std::pair<int, int>, std::vector<int>> mids_;
  std::map<std::tuple<int, int, int>, long> npaths_;
  std::map<std::tuple<int, int, int>, std::vector<std::vector<int>>> paths_;
};

// Levels 0..N of the multiplicity diagram: per level the sorted labels with
// path counts, plus the edges between consecutive levels as index pairs.
struct Bratteli {
  std::string instance;
  int levels = 0;
  std::vector<std::vector<std::pair<Label, long>>> nodes;
  std::vector<std::vector<std::pair<int, int>>> edges;

  friend bool operator==(const Bratteli&, const Bratteli&) = default;
};

Bratteli build_bratteli(const LatticeSpec& spec, int max_level);

std::string export_dot(const Bratteli& b);
std::string export_json(const Bratteli& b);
Bratteli parse_bratteli_json(const std::string& text);

// Group paths of equal length by everything except position pos; key is the
// path with that position cut out, values are indices into the input list.
std::map<std::vector<int>, std::vector<int>> group_by_free_position(
    const std::vector<std::vector<int>>& paths, int pos);

// sigma_i blocks on length-n paths ending at lambda (1 <= i <= n-1)
std::map<std::vector<int>, std::vector<int>> sigma_blocks(PathLattice& lat, int n, int i,
                                                          const Label& lambda);

}  // namespace pathrep
