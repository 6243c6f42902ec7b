#include "pathrep/lattice.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace pathrep {

PathLattice::PathLattice(std::shared_ptr<const LatticeSpec> spec) : spec_(std::move(spec)) {
  root_ = intern_locked(spec_->root());
}

int PathLattice::intern(const Label& w) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  return intern_locked(w);
}

int PathLattice::intern_locked(const Label& w) {
  auto it = ids_.find(w);
  if (it != ids_.end()) return it->second;
  int id = static_cast<int>(labels_.size());
  labels_.push_back(w);
  ids_.emplace(w, id);
  return id;
}

const Label& PathLattice::label(int id) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  return labels_.at(static_cast<std::size_t>(id));
}

std::string PathLattice::label_str(int id) const { return spec_->label_str(label(id)); }

const std::vector<int>& PathLattice::succ(int id) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  return succ_locked(id);
}

const std::vector<int>& PathLattice::succ_locked(int id) {
  auto it = succ_.find(id);
  if (it != succ_.end()) return it->second;
  std::vector<int> out;
  for (const Label& w : spec_->successors(labels_.at(static_cast<std::size_t>(id))))
    out.push_back(intern_locked(w));
  return succ_.emplace(id, std::move(out)).first->second;
}

const std::vector<int>& PathLattice::level(int n) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  auto it = levels_.find(n);
  if (it != levels_.end()) return it->second;
  std::vector<int> out;
  if (n == 0) {
    out.push_back(root_);
  } else if (n > 0) {
    std::set<Label> acc;
    for (int id : level(n - 1))
      for (int s : succ_locked(id)) acc.insert(labels_.at(static_cast<std::size_t>(s)));
    for (const Label& w : acc) out.push_back(intern_locked(w));
  }
  return levels_.emplace(n, std::move(out)).first->second;
}

const std::vector<int>& PathLattice::mids(int d, int l) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  auto key = std::make_pair(d, l);
  auto it = mids_.find(key);
  if (it != mids_.end()) return it->second;
  std::vector<int> out;
  for (int m : succ_locked(d)) {
    const auto& up = succ_locked(m);
    if (std::find(up.begin(), up.end(), l) != up.end()) out.push_back(m);
  }
  return mids_.emplace(key, std::move(out)).first->second;
}

std::vector<std::pair<int, int>> PathLattice::context_paths(int g, int lp) {
  std::vector<std::pair<int, int>> out;
  for (int nu : succ(g))
    for (int mu : succ(nu)) {
      const auto& up = succ(mu);
      if (std::find(up.begin(), up.end(), lp) != up.end()) out.emplace_back(nu, mu);
    }
  return out;
}

long PathLattice::npaths(int d, int l, int k) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  return npaths_locked(d, l, k);
}

long PathLattice::npaths_locked(int d, int l, int k) {
  if (k == 0) return d == l ? 1 : 0;
  auto key = std::make_tuple(d, l, k);
  auto it = npaths_.find(key);
  if (it != npaths_.end()) return it->second;
  long acc = 0;
  for (int m : succ_locked(d)) acc += npaths_locked(m, l, k - 1);
  npaths_.emplace(key, acc);
  return acc;
}

const std::vector<std::vector<int>>& PathLattice::paths_between(int d, int l, int k) {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  auto key = std::make_tuple(d, l, k);
  auto it = paths_.find(key);
  if (it != paths_.end()) return it->second;
  std::vector<std::vector<int>> out;
  if (k == 0) {
    if (d == l) out.push_back({d});
  } else if (npaths_locked(d, l, k) > 0) {
    for (int m : succ_locked(d))
      for (const auto& tail : paths_between(m, l, k - 1)) {
        std::vector<int> p;
        p.reserve(tail.size() + 1);
        p.push_back(d);
        p.insert(p.end(), tail.begin(), tail.end());
        out.push_back(std::move(p));
      }
  }
  return paths_.emplace(key, std::move(out)).first->second;
}

Bratteli build_bratteli(const LatticeSpec& spec, int max_level) {
  Bratteli b;
  b.instance = spec.name();
  b.levels = max_level;
  std::map<Label, long> cur;
  cur[spec.root()] = 1;
  for (int n = 0; n <= max_level; ++n) {
    std::vector<std::pair<Label, long>> row(cur.begin(), cur.end());
    b.nodes.push_back(row);
    if (n == max_level) break;
    std::map<Label, long> nxt;
    std::vector<std::pair<int, int>> gap;
    for (int i = 0; i < static_cast<int>(row.size()); ++i)
      for (const Label& s : spec.successors(row[static_cast<std::size_t>(i)].first))
        nxt[s] += row[static_cast<std::size_t>(i)].second;
    std::vector<Label> nxt_labels;
    for (const auto& [w, m] : nxt) nxt_labels.push_back(w);
    for (int i = 0; i < static_cast<int>(row.size()); ++i)
      for (const Label& s : spec.successors(row[static_cast<std::size_t>(i)].first)) {
        auto j = std::lower_bound(nxt_labels.begin(), nxt_labels.end(), s) - nxt_labels.begin();
        gap.emplace_back(i, static_cast<int>(j));
      }
    std::sort(gap.begin(), gap.end());
    b.edges.push_back(std::move(gap));
    cur = std::move(nxt);
  }
  return b;
}

std::string export_dot(const Bratteli& b) {
  auto spec = make_instance(b.instance);
  std::ostringstream os;
  os << "digraph bratteli {\n  rankdir=TB;\n  node [shape=box];\n";
  for (int n = 0; n <= b.levels; ++n) {
    os << "  { rank=same;";
    for (const auto& [w, m] : b.nodes[static_cast<std::size_t>(n)])
      os << " \"" << spec->label_str(w) << '@' << n << "\";";
    os << " }\n";
  }
  for (int n = 0; n <= b.levels; ++n)
    for (const auto& [w, m] : b.nodes[static_cast<std::size_t>(n)])
      os << "  \"" << spec->label_str(w) << '@' << n << "\" [label=\"" << spec->label_str(w)
         << " (m=" << m << ")\"];\n";
  for (int n = 0; n + 1 <= b.levels; ++n) {
    const auto& lo = b.nodes[static_cast<std::size_t>(n)];
    const auto& hi = b.nodes[static_cast<std::size_t>(n) + 1];
    for (const auto& [i, j] : b.edges[static_cast<std::size_t>(n)])
      os << "  \"" << spec->label_str(lo[static_cast<std::size_t>(i)].first) << '@' << n
         << "\" -> \"" << spec->label_str(hi[static_cast<std::size_t>(j)].first) << '@' << n + 1
         << "\";\n";
  }
  os << "}\n";
  return os.str();
}

std::string export_json(const Bratteli& b) {
  nlohmann::ordered_json j;
  j["format"] = "pathrep.bratteli/1";
  j["instance"] = b.instance;
  j["levels"] = b.levels;
  auto nodes = nlohmann::ordered_json::array();
  for (const auto& row : b.nodes) {
    auto jr = nlohmann::ordered_json::array();
    for (const auto& [w, m] : row) jr.push_back({{"label", w}, {"mult", m}});
    nodes.push_back(std::move(jr));
  }
  j["nodes"] = std::move(nodes);
  auto edges = nlohmann::ordered_json::array();
  for (const auto& gap : b.edges) {
    auto jg = nlohmann::ordered_json::array();
    for (const auto& [i, k] : gap) jg.push_back({i, k});
    edges.push_back(std::move(jg));
  }
  j["edges"] = std::move(edges);
  return j.dump(2) + "\n";
}

Bratteli parse_bratteli_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.contains("format") || j["format"] != "pathrep.bratteli/1")
    throw std::runtime_error("unsupported diagram format");
  Bratteli b;
  b.instance = j.at("instance").get<std::string>();
  b.levels = j.at("levels").get<int>();
  for (const auto& jr : j.at("nodes")) {
    std::vector<std::pair<Label, long>> row;
    for (const auto& jn : jr)
      row.emplace_back(jn.at("label").get<Label>(), jn.at("mult").get<long>());
    b.nodes.push_back(std::move(row));
  }
  for (const auto& jg : j.at("edges")) {
    std::vector<std::pair<int, int>> gap;
    for (const auto& je : jg) gap.emplace_back(je.at(0).get<int>(), je.at(1).get<int>());
    b.edges.push_back(std::move(gap));
  }
  return b;
}

std::map<std::vector<int>, std::vector<int>> group_by_free_position(
    const std::vector<std::vector<int>>& paths, int pos) {
  std::map<std::vector<int>, std::vector<int>> out;
  for (int idx = 0; idx < static_cast<int>(paths.size()); ++idx) {
    std::vector<int> key = paths[static_cast<std::size_t>(idx)];
    key.erase(key.begin() + pos);
    out[key].push_back(idx);
  }
  return out;
}

std::map<std::vector<int>, std::vector<int>> sigma_blocks(PathLattice& lat, int n, int i,
                                                          const Label& lambda) {
  if (i < 1 || i > n - 1) throw std::invalid_argument("sigma_blocks: generator index out of range");
  return group_by_free_position(lat.paths_to(lat.intern(lambda), n), i);
}

}  // namespace pathrep
