#pragma once

// Stable collaborative relations (name pairs co-occurring in at least eta
// co-author lists) and the stable collaboration network built from them.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "authnet/common.hpp"
#include "authnet/corpus.hpp"
#include "authnet/network.hpp"

namespace authnet {

// Normal-approximation tail Pr(X >= x) for the number of papers listing two
// names with n_a and n_b papers among N, assuming independent authorship.
inline double cooccurrence_tail_probability(double n_a, double n_b, double N, double x) {
  if (!(N > 0)) throw DomainError("N must be positive");
  if (!(n_a > 0 && n_b > 0 && n_a <= N && n_b <= N)) {
    throw DomainError("name counts must lie in (0, N]");
  }
  if (x <= 0) return 1.0;
  const double q = n_a * n_b / (N * N);
  const double mean = N * q;
  const double var = N * q * (1.0 - q);
  const double d = x - 0.5 - mean;
  if (!(var > 0)) return d > 0 ? 0.0 : 1.0;
  const double tail = 0.5 * std::erfc(d / std::sqrt(var) / std::sqrt(2.0));
  return std::clamp(tail, 0.0, 1.0);
}

using NamePair = std::pair<std::string, std::string>;  // first < second

inline NamePair make_name_pair(const std::string& a, const std::string& b) {
  return a < b ? NamePair{a, b} : NamePair{b, a};
}

class ScrSet {
 public:
  explicit ScrSet(std::size_t eta = 3) : eta_(eta) {}

  std::size_t eta() const { return eta_; }
  std::size_t size() const { return support_.size(); }
  bool empty() const { return support_.empty(); }

  // Records a pair; pairs below eta are ignored.
  void insert(const std::string& a, const std::string& b, std::size_t support) {
    if (a == b) throw DomainError("an SCR needs two distinct names");
    if (support < eta_) return;
    support_[make_name_pair(a, b)] = support;
    partners_[a].insert(b);
    partners_[b].insert(a);
  }

  bool contains(const std::string& a, const std::string& b) const {
    return support_.count(make_name_pair(a, b)) != 0;
  }

  std::size_t support(const std::string& a, const std::string& b) const {
    auto it = support_.find(make_name_pair(a, b));
    return it == support_.end() ? 0 : it->second;
  }

  const std::map<NamePair, std::size_t>& pairs() const { return support_; }

  // Descending support, ties by lexicographic pair.
  std::vector<std::pair<NamePair, std::size_t>> insertion_order() const {
    std::vector<std::pair<NamePair, std::size_t>> out(support_.begin(), support_.end());
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& x, const auto& y) { return x.second > y.second; });
    return out;
  }

  friend bool operator==(const ScrSet& x, const ScrSet& y) {
    return x.eta_ == y.eta_ && x.support_ == y.support_;
  }

 private:
  std::size_t eta_;
  std::map<NamePair, std::size_t> support_;
  std::unordered_map<std::string, std::set<std::string>> partners_;
};

// Counts every co-author name pair; keeps those with support >= eta.
inline ScrSet mine_scrs(const CorpusIndex& index, std::size_t eta) {
  if (eta < 2) throw DomainError("eta must be at least 2");
  std::unordered_map<std::string, std::uint32_t> ids;
  std::vector<const std::string*> names;
  for (const auto& [name, papers] : index.name_index()) {
    ids.emplace(name, static_cast<std::uint32_t>(names.size()));
    names.push_back(&name);
  }
  std::unordered_map<std::uint64_t, std::size_t> counts;
  std::vector<std::uint32_t> row;
  for (const auto& p : index.papers()) {
    row.clear();
    for (const auto& a : p.authors) row.push_back(ids.at(a));
    std::sort(row.begin(), row.end());
    for (std::size_t i = 0; i < row.size(); ++i) {
      for (std::size_t j = i + 1; j < row.size(); ++j) {
        ++counts[(static_cast<std::uint64_t>(row[i]) << 32) | row[j]];
      }
    }
  }
  ScrSet out(eta);
  for (const auto& [key, c] : counts) {
    if (c >= eta) out.insert(*names[key >> 32], *names[key & 0xffffffffu], c);
  }
  return out;
}

struct ScnStats {
  std::size_t scr_vertices = 0;
  std::size_t closure_edges = 0;
  std::size_t isolated_vertices = 0;
  std::size_t dropped_vertices = 0;
};

namespace detail {

// Groups a name's papers into connected components, two papers being linked
// when they share a co-author name.
inline std::vector<PaperSet> coauthor_components(const std::string& name,
                                                 const std::vector<PaperIdx>& papers,
                                                 const CorpusIndex& index) {
  std::vector<std::size_t> parent(papers.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::map<std::string, std::size_t> first_with;
  for (std::size_t i = 0; i < papers.size(); ++i) {
    for (const auto& co : index.paper(papers[i]).authors) {
      if (co == name) continue;
      auto [it, inserted] = first_with.emplace(co, i);
      if (!inserted) parent[find(i)] = find(it->second);
    }
  }
  std::map<std::size_t, PaperSet> groups;
  for (std::size_t i = 0; i < papers.size(); ++i) groups[find(i)].push_back(papers[i]);
  std::vector<PaperSet> out;
  for (auto& [root, g] : groups) {
    std::sort(g.begin(), g.end());
    out.push_back(std::move(g));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

// Inserts SCRs strongest first. A relation (x, y) reuses an existing vertex of
// x (or y) when one of its neighbours forms an SCR with the other name, and
// closes those triangles; otherwise both endpoints are fresh vertices. Each
// name pair yields at most one edge. Papers are attributed per (paper, name)
// item to the first edge that claims them; leftover items become isolated
// vertices, one per co-author-connected group of papers.
inline CollabNetwork build_scn(const ScrSet& scrs, const CorpusIndex& index,
                               ScnStats* stats = nullptr) {
  CollabNetwork g;
  ScnStats st;
  std::map<NamePair, std::pair<VertexId, VertexId>> edge_of;
  std::vector<NamePair> edge_order;

  auto connect = [&](VertexId a, VertexId b) {
    const auto key = make_name_pair(g.vertex(a).name, g.vertex(b).name);
    if (edge_of.count(key)) return false;
    g.add_edge(a, b);
    edge_of.emplace(key, g.vertex(a).name == key.first ? std::pair{a, b} : std::pair{b, a});
    edge_order.push_back(key);
    return true;
  };

  // Vertex named `x` with a neighbour forming an SCR with `y`, lowest instance first.
  auto anchor = [&](const std::string& x, const std::string& y) -> VertexId {
    for (auto v : g.vertices_named(x)) {
      for (auto w : g.neighbors(v)) {
        const auto& wn = g.vertex(w).name;
        if (wn != y && scrs.contains(wn, y)) return v;
      }
    }
    return kNoVertex;
  };

  // Vertex named `y` adjacent to a neighbour of `x_vertex`, if any.
  auto partner_near = [&](VertexId xv, const std::string& y) -> VertexId {
    VertexId best = kNoVertex;
    for (auto w : g.neighbors(xv)) {
      for (auto z : g.neighbors(w)) {
        if (z != xv && g.vertex(z).name == y &&
            (best == kNoVertex || g.vertex(z).instance_id < g.vertex(best).instance_id)) {
          best = z;
        }
      }
    }
    return best;
  };

  for (const auto& [pair, support] : scrs.insertion_order()) {
    if (edge_of.count(pair)) continue;
    const auto& [x, y] = pair;
    VertexId xv = anchor(x, y);
    VertexId yv = kNoVertex;
    if (xv != kNoVertex) {
      yv = partner_near(xv, y);
    } else {
      yv = anchor(y, x);
      if (yv != kNoVertex) xv = partner_near(yv, x);
    }
    if (xv == kNoVertex) {
      xv = g.add_vertex(x);
      ++st.scr_vertices;
    }
    if (yv == kNoVertex) {
      yv = g.add_vertex(y);
      ++st.scr_vertices;
    }
    connect(xv, yv);
    for (auto [from, other] : {std::pair{xv, yv}, std::pair{yv, xv}}) {
      const auto& other_name = g.vertex(other).name;
      for (auto w : g.neighbors(from)) {
        if (w == other) continue;
        const auto& wn = g.vertex(w).name;
        if (wn != other_name && scrs.contains(wn, other_name) && connect(w, other)) {
          ++st.closure_edges;
        }
      }
    }
  }

  // Attribute papers in edge creation order.
  for (const auto& key : edge_order) {
    const auto [a, b] = edge_of.at(key);
    const auto& pa = index.papers_of(key.first);
    const auto& pb = index.papers_of(key.second);
    PaperSet both;
    std::set_intersection(pa.begin(), pa.end(), pb.begin(), pb.end(), std::back_inserter(both));
    PaperSet carried;
    for (auto p : both) {
      auto oa = g.owner(p, key.first);
      auto ob = g.owner(p, key.second);
      if (oa == kNoVertex) {
        g.add_papers(a, {p});
        oa = a;
      }
      if (ob == kNoVertex) {
        g.add_papers(b, {p});
        ob = b;
      }
      if (oa == a && ob == b) carried.push_back(p);
    }
    g.add_edge(a, b, carried);
  }
  for (auto v : g.vertex_ids()) {
    if (g.vertex(v).papers.empty()) {
      g.remove_vertex(v);
      ++st.dropped_vertices;
    }
  }

  for (const auto& [name, papers] : index.name_index()) {
    std::vector<PaperIdx> loose;
    for (auto p : papers) {
      if (g.owner(p, name) == kNoVertex) loose.push_back(p);
    }
    if (loose.empty()) continue;
    for (auto& group : detail::coauthor_components(name, loose, index)) {
      g.add_vertex(name, std::move(group));
      ++st.isolated_vertices;
    }
  }
  if (stats) *stats = st;
  return g;
}

}  // namespace authnet
