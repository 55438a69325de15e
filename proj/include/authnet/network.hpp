#pragma once

// Collaboration network shared by the stable (Stage I) and global (Stage II)
// constructions. A vertex is one presumed author: a name, an instance number
// that tells same-name vertices apart, and the papers attributed to it. Each
// (paper, name) item is owned by at most one vertex of that name.
//
// Dump format (tab-separated, canonical order):
//
//   authnet-network 1
//   corpus <path>                       (optional)
//   V <name> <instance> <paper_id;paper_id;...>
//   E <name> <instance> <name> <instance> <paper_id;...>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "authnet/common.hpp"
#include "authnet/corpus.hpp"

namespace authnet {

using PaperSet = std::vector<PaperIdx>;  // sorted, unique

struct CollabVertex {
  std::string name;
  std::uint32_t instance_id = 0;
  PaperSet papers;
};

class CollabNetwork {
 public:
  // New vertex with the next free instance number for `name`.
  VertexId add_vertex(const std::string& name, PaperSet papers = {}) {
    auto& group = groups_[name];
    return add_vertex_with_instance(name, group.next_instance, std::move(papers));
  }

  VertexId add_vertex_with_instance(const std::string& name, std::uint32_t instance,
                                    PaperSet papers = {}) {
    auto& group = groups_[name];
    for (auto v : group.vertices) {
      if (vertices_[v].instance_id == instance) {
        throw DomainError("duplicate vertex (" + name + ", " + std::to_string(instance) + ")");
      }
    }
    const auto id = static_cast<VertexId>(vertices_.size());
    vertices_.push_back({name, instance, {}});
    alive_.push_back(true);
    adj_.emplace_back();
    revision_.push_back(0);
    group.vertices.push_back(id);
    group.next_instance = std::max(group.next_instance, instance + 1);
    ++live_vertices_;
    add_papers(id, papers);
    return id;
  }

  // Attributes papers to v. A paper already owned by another vertex of the
  // same name is a DomainError.
  void add_papers(VertexId v, const PaperSet& papers) {
    check(v);
    auto& owners = groups_[vertices_[v].name].owner;
    for (auto p : papers) {
      auto [it, inserted] = owners.emplace(p, v);
      if (!inserted && it->second != v) {
        throw DomainError("paper index " + std::to_string(p) + " already attributed to another '" +
                          vertices_[v].name + "' vertex");
      }
    }
    vertices_[v].papers = detail::sorted_union(vertices_[v].papers, sorted_copy(papers));
    ++revision_[v];
  }

  // Creates the edge if missing and unions `papers` into its paper set.
  void add_edge(VertexId u, VertexId v, const PaperSet& papers = {}) {
    check(u);
    check(v);
    if (u == v) throw DomainError("self-loop edge");
    auto it = adj_[u].find(v);
    std::size_t e;
    if (it == adj_[u].end()) {
      e = edge_papers_.size();
      edge_papers_.emplace_back();
      adj_[u].emplace(v, e);
      adj_[v].emplace(u, e);
      ++live_edges_;
      ++revision_[u];
      ++revision_[v];
    } else {
      e = it->second;
    }
    if (!papers.empty()) edge_papers_[e] = detail::sorted_union(edge_papers_[e], sorted_copy(papers));
  }

  void remove_edge(VertexId u, VertexId v) {
    check(u);
    check(v);
    if (adj_[u].erase(v)) {
      adj_[v].erase(u);
      --live_edges_;
      ++revision_[u];
      ++revision_[v];
    }
  }

  bool has_edge(VertexId u, VertexId v) const {
    return is_alive(u) && adj_[u].count(v) != 0;
  }

  const PaperSet& edge_papers(VertexId u, VertexId v) const {
    check(u);
    auto it = adj_[u].find(v);
    if (it == adj_[u].end()) throw DomainError("no such edge");
    return edge_papers_[it->second];
  }

  // Neighbor -> edge slot, ordered by neighbor id.
  const std::map<VertexId, std::size_t>& adjacency(VertexId v) const {
    check(v);
    return adj_[v];
  }

  std::vector<VertexId> neighbors(VertexId v) const {
    check(v);
    std::vector<VertexId> out;
    out.reserve(adj_[v].size());
    for (const auto& [w, e] : adj_[v]) out.push_back(w);
    return out;
  }

  std::size_t degree(VertexId v) const {
    check(v);
    return adj_[v].size();
  }

  const CollabVertex& vertex(VertexId v) const {
    check(v);
    return vertices_[v];
  }

  bool is_alive(VertexId v) const { return v < alive_.size() && alive_[v]; }

  // Bumped whenever the vertex's papers or incident edges change.
  std::uint64_t revision(VertexId v) const { return revision_.at(v); }

  std::size_t vertex_count() const { return live_vertices_; }
  std::size_t edge_count() const { return live_edges_; }
  std::size_t slot_count() const { return vertices_.size(); }

  std::vector<VertexId> vertex_ids() const {
    std::vector<VertexId> out;
    out.reserve(live_vertices_);
    for (VertexId v = 0; v < vertices_.size(); ++v) {
      if (alive_[v]) out.push_back(v);
    }
    return out;
  }

  // Live vertices carrying `name`, ascending by instance number.
  std::vector<VertexId> vertices_named(const std::string& name) const {
    auto it = groups_.find(name);
    if (it == groups_.end()) return {};
    auto out = it->second.vertices;
    std::sort(out.begin(), out.end(), [&](VertexId a, VertexId b) {
      return vertices_[a].instance_id < vertices_[b].instance_id;
    });
    return out;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [name, g] : groups_) {
      if (!g.vertices.empty()) out.push_back(name);
    }
    return out;
  }

  std::optional<VertexId> find(const std::string& name, std::uint32_t instance) const {
    auto it = groups_.find(name);
    if (it == groups_.end()) return std::nullopt;
    for (auto v : it->second.vertices) {
      if (vertices_[v].instance_id == instance) return v;
    }
    return std::nullopt;
  }

  // Vertex owning the (paper, name) item, or kNoVertex.
  VertexId owner(PaperIdx paper, const std::string& name) const {
    auto it = groups_.find(name);
    if (it == groups_.end()) return kNoVertex;
    auto o = it->second.owner.find(paper);
    return o == it->second.owner.end() ? kNoVertex : o->second;
  }

  // Folds `absorbed` into `kept` (same name): papers are united, edges are
  // redirected with their paper sets united, and a kept-absorbed edge is dropped.
  void merge(VertexId kept, VertexId absorbed) {
    check(kept);
    check(absorbed);
    if (kept == absorbed) throw DomainError("cannot merge a vertex with itself");
    if (vertices_[kept].name != vertices_[absorbed].name) {
      throw DomainError("cannot merge vertices with different names");
    }
    auto& group = groups_[vertices_[kept].name];
    for (auto p : vertices_[absorbed].papers) group.owner[p] = kept;
    vertices_[kept].papers = detail::sorted_union(vertices_[kept].papers, vertices_[absorbed].papers);

    auto links = adj_[absorbed];
    for (const auto& [w, e] : links) {
      auto papers = edge_papers_[e];
      remove_edge(absorbed, w);
      if (w != kept) add_edge(kept, w, papers);
    }
    kill(absorbed);
    ++revision_[kept];
  }

  // Moves `moved` papers (a subset of v's) to a fresh vertex of the same name.
  // Edge paper sets are partitioned accordingly; merge() undoes the split.
  VertexId split(VertexId v, const PaperSet& moved) {
    check(v);
    auto moved_sorted = sorted_copy(moved);
    PaperSet kept;
    std::set_difference(vertices_[v].papers.begin(), vertices_[v].papers.end(),
                        moved_sorted.begin(), moved_sorted.end(), std::back_inserter(kept));
    if (kept.size() + moved_sorted.size() != vertices_[v].papers.size()) {
      throw DomainError("split papers are not a subset of the vertex");
    }
    auto& group = groups_[vertices_[v].name];
    for (auto p : moved_sorted) group.owner.erase(p);
    vertices_[v].papers = kept;
    ++revision_[v];
    const std::string name = vertices_[v].name;
    const auto nv = add_vertex(name, moved_sorted);

    auto links = adj_[v];
    for (const auto& [w, e] : links) {
      const auto& all = edge_papers_[e];
      if (all.empty()) continue;
      PaperSet stay;
      PaperSet go;
      for (auto p : all) (detail::sorted_contains(moved_sorted, p) ? go : stay).push_back(p);
      if (!go.empty()) {
        add_edge(nv, w, go);
        if (stay.empty()) {
          remove_edge(v, w);
        } else {
          edge_papers_[e] = std::move(stay);
        }
      }
    }
    return nv;
  }

  // Removes a vertex, its edges, and its item ownership.
  void remove_vertex(VertexId v) {
    check(v);
    auto links = adj_[v];
    for (const auto& [w, e] : links) remove_edge(v, w);
    auto& group = groups_[vertices_[v].name];
    for (auto p : vertices_[v].papers) {
      auto it = group.owner.find(p);
      if (it != group.owner.end() && it->second == v) group.owner.erase(it);
    }
    kill(v);
  }

  // Total number of (paper, name) items attributed to some vertex.
  std::size_t item_count() const {
    std::size_t n = 0;
    for (VertexId v = 0; v < vertices_.size(); ++v) {
      if (alive_[v]) n += vertices_[v].papers.size();
    }
    return n;
  }

  // Canonical sort key of a vertex.
  std::pair<const std::string&, std::uint32_t> key(VertexId v) const {
    return {vertices_[v].name, vertices_[v].instance_id};
  }

 private:
  struct NameGroup {
    std::vector<VertexId> vertices;
    std::uint32_t next_instance = 0;
    std::unordered_map<PaperIdx, VertexId> owner;
  };

  static PaperSet sorted_copy(const PaperSet& p) {
    if (std::is_sorted(p.begin(), p.end()) &&
        std::adjacent_find(p.begin(), p.end()) == p.end()) {
      return p;
    }
    PaperSet out = p;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  void check(VertexId v) const {
    if (!is_alive(v)) throw DomainError("vertex " + std::to_string(v) + " not in network");
  }

  void kill(VertexId v) {
    auto& g = groups_[vertices_[v].name].vertices;
    g.erase(std::remove(g.begin(), g.end(), v), g.end());
    alive_[v] = false;
    vertices_[v].papers.clear();
    adj_[v].clear();
    ++revision_[v];
    --live_vertices_;
  }

  std::vector<CollabVertex> vertices_;
  std::vector<bool> alive_;
  std::vector<std::map<VertexId, std::size_t>> adj_;
  std::vector<PaperSet> edge_papers_;
  std::vector<std::uint64_t> revision_;
  std::map<std::string, NameGroup> groups_;
  std::size_t live_vertices_ = 0;
  std::size_t live_edges_ = 0;
};

// ---------------------------------------------------------------------------
// Dump / load

inline constexpr std::string_view kNetworkHeader = "authnet-network 1";

namespace detail {

inline std::string join_paper_ids(const PaperSet& papers, const CorpusIndex& index) {
  std::vector<std::string> ids;
  ids.reserve(papers.size());
  for (auto p : papers) ids.push_back(index.paper(p).paper_id);
  std::sort(ids.begin(), ids.end());
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out.push_back(';');
    out += ids[i];
  }
  return out;
}

inline PaperSet parse_paper_ids(std::string_view field, const CorpusIndex& index) {
  PaperSet out;
  field = trim(field);
  if (field.empty()) return out;
  for (auto id : split(field, ';')) out.push_back(index.index_of(trim(id)));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace detail

// Writes the network in canonical order; identical networks produce identical bytes.
inline void write_network(std::ostream& out, const CollabNetwork& g, const CorpusIndex& index,
                          const std::string& corpus_path = {}) {
  out << kNetworkHeader << '\n';
  if (!corpus_path.empty()) out << "corpus\t" << corpus_path << '\n';
  auto ids = g.vertex_ids();
  std::sort(ids.begin(), ids.end(), [&](VertexId a, VertexId b) { return g.key(a) < g.key(b); });
  for (auto v : ids) {
    const auto& vx = g.vertex(v);
    out << "V\t" << vx.name << '\t' << vx.instance_id << '\t'
        << detail::join_paper_ids(vx.papers, index) << '\n';
  }
  using EdgeRow = std::tuple<std::string, std::uint32_t, std::string, std::uint32_t, std::string>;
  std::vector<EdgeRow> rows;
  for (auto u : ids) {
    for (const auto& [w, e] : g.adjacency(u)) {
      if (g.key(u) < g.key(w)) {
        rows.emplace_back(g.vertex(u).name, g.vertex(u).instance_id, g.vertex(w).name,
                          g.vertex(w).instance_id,
                          detail::join_paper_ids(g.edge_papers(u, w), index));
      }
    }
  }
  std::sort(rows.begin(), rows.end());
  for (const auto& [a, ai, b, bi, papers] : rows) {
    out << "E\t" << a << '\t' << ai << '\t' << b << '\t' << bi << '\t' << papers << '\n';
  }
}

inline std::string network_to_string(const CollabNetwork& g, const CorpusIndex& index) {
  std::ostringstream os;
  write_network(os, g, index);
  return os.str();
}

// Corpus path recorded in a dump header, if any.
inline std::string read_network_corpus_path(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("corpus\t", 0) == 0) return std::string(detail::trim(line.substr(7)));
    if (line.rfind("V\t", 0) == 0 || line.rfind("E\t", 0) == 0) break;
  }
  return {};
}

inline CollabNetwork read_network(std::istream& in, const CorpusIndex& index) {
  CollabNetwork g;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    if (!header) {
      if (line != kNetworkHeader) throw FormatError("not a network dump (bad header)");
      header = true;
      continue;
    }
    auto f = detail::split(line, '\t');
    auto where = [&] { return " at line " + std::to_string(lineno); };
    try {
      if (f[0] == "corpus") continue;
      if (f[0] == "V") {
        if (f.size() != 4) throw FormatError("vertex row needs 4 fields");
        g.add_vertex_with_instance(std::string(f[1]),
                                   detail::parse_int<std::uint32_t>(f[2], "instance"),
                                   detail::parse_paper_ids(f[3], index));
      } else if (f[0] == "E") {
        if (f.size() != 6) throw FormatError("edge row needs 6 fields");
        auto u = g.find(std::string(f[1]), detail::parse_int<std::uint32_t>(f[2], "instance"));
        auto v = g.find(std::string(f[3]), detail::parse_int<std::uint32_t>(f[4], "instance"));
        if (!u || !v) throw FormatError("edge references unknown vertex");
        g.add_edge(*u, *v, detail::parse_paper_ids(f[5], index));
      } else {
        throw FormatError("unknown row type '" + std::string(f[0]) + "'");
      }
    } catch (const FormatError& e) {
      throw FormatError(e.what() + where());
    } catch (const DomainError& e) {
      throw FormatError(e.what() + where());
    }
  }
  if (!header) throw FormatError("empty network dump");
  return g;
}

inline void save_network(const std::string& path, const CollabNetwork& g, const CorpusIndex& index,
                         const std::string& corpus_path = {}) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write network file: " + path);
  write_network(out, g, index, corpus_path);
}

inline CollabNetwork load_network(const std::string& path, const CorpusIndex& index) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open network file: " + path);
  return read_network(in, index);
}

// (paper_id, name) -> "name#instance" labels of the vertex owning each item.
inline std::map<std::pair<std::string, std::string>, std::string> network_partition(
    const CollabNetwork& g, const CorpusIndex& index) {
  std::map<std::pair<std::string, std::string>, std::string> out;
  for (auto v : g.vertex_ids()) {
    const auto& vx = g.vertex(v);
    auto label = vx.name + "#" + std::to_string(vx.instance_id);
    for (auto p : vx.papers) out[{index.paper(p).paper_id, vx.name}] = label;
  }
  return out;
}

}  // namespace authnet
