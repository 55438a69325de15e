#pragma once

// Six-component similarity between two same-name vertices:
//   0 wl        normalized Weisfeiler-Lehman subtree kernel of the ego subgraphs
//   1 clique    shared co-author triangles over tau
//   2 interest  cosine of mean keyword embeddings (may be missing)
//   3 time      year-decayed shared keywords weighted by 1/log FB, over tau
//   4 rep_venue cross-counts of each side's modal venue, over tau
//   5 venue     Adamic/Adar over shared venues, over tau
// tau is the smaller paper count of the two vertices. In a SimilarityVector,
// wl is missing when either ego graph is only its root, clique is missing when
// either vertex lies on no triangle, and interest is missing when either
// vertex has no embedded keyword; the value stays 0 in those slots.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "authnet/common.hpp"
#include "authnet/corpus.hpp"
#include "authnet/embedding.hpp"
#include "authnet/network.hpp"
#include "authnet/scn.hpp"

namespace authnet {

inline constexpr std::size_t kFeatureCount = 6;
inline constexpr std::array<const char*, kFeatureCount> kFeatureNames = {
    "wl", "clique", "interest", "time", "rep_venue", "venue"};

enum Feature : std::size_t { kWl = 0, kClique, kInterest, kTime, kRepVenue, kVenue };

struct SimilarityVector {
  std::array<double, kFeatureCount> g{};
  std::array<bool, kFeatureCount> missing{};

  double operator[](std::size_t i) const { return g[i]; }
  bool present(std::size_t i) const { return !missing[i]; }

  friend bool operator==(const SimilarityVector&, const SimilarityVector&) = default;
};

struct SimilarityOptions {
  double alpha = 0.62;
  int wl_iterations = 2;
  // Literal e^{+alpha*min} weighting instead of the decaying e^{-alpha*min}.
  bool positive_time_exponent = false;
};

struct SimilarityContext {
  const CollabNetwork* network = nullptr;
  const CorpusIndex* index = nullptr;
  const EmbeddingTable* embeddings = nullptr;
  SimilarityOptions opts;

  SimilarityContext(const CollabNetwork& g, const CorpusIndex& idx, const EmbeddingTable* emb = nullptr,
                    SimilarityOptions o = {})
      : network(&g), index(&idx), embeddings(emb), opts(o) {
    if (!(opts.alpha > 0) || !std::isfinite(opts.alpha)) throw DomainError("alpha must be positive");
    if (opts.wl_iterations < 1) throw DomainError("wl_iterations must be at least 1");
  }

  SimilarityContext with_network(const CollabNetwork& g) const {
    return SimilarityContext(g, *index, embeddings, opts);
  }
};

// Text, venue, and triangle summary of one vertex.
struct VertexProfile {
  std::size_t paper_count = 0;
  std::map<KeywordId, std::vector<int>> keyword_years;  // sorted unique years
  std::vector<double> centroid;                         // empty when no keyword is embedded
  std::map<VenueId, std::size_t> venues;
  VenueId modal_venue = 0;
  std::set<NamePair> triangles;
};

namespace detail {

inline double clamped_log(std::size_t freq) {
  return std::log(static_cast<double>(freq <= 1 ? 2 : freq));
}

inline void check_pair(const SimilarityContext& ctx, VertexId u, VertexId v) {
  const auto& g = *ctx.network;
  if (!g.is_alive(u) || !g.is_alive(v)) throw DomainError("vertex not in network");
  if (g.vertex(u).name != g.vertex(v).name) throw DomainError("vertices carry different names");
}

inline double tau_of(const VertexProfile& a, const VertexProfile& b) {
  auto tau = std::min(a.paper_count, b.paper_count);
  if (tau == 0) throw DomainError("vertex without papers cannot be scored");
  return static_cast<double>(tau);
}

inline std::size_t min_year_gap(const std::vector<int>& a, const std::vector<int>& b) {
  std::size_t best = static_cast<std::size_t>(-1);
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    best = std::min<std::size_t>(best, static_cast<std::size_t>(std::abs(a[i] - b[j])));
    if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return best;
}

}  // namespace detail

// Triangles through v, as the name pairs of the two other corners.
inline std::set<NamePair> triangle_name_pairs(const CollabNetwork& g, VertexId v) {
  std::set<NamePair> out;
  auto nb = g.neighbors(v);
  for (std::size_t i = 0; i < nb.size(); ++i) {
    for (std::size_t j = i + 1; j < nb.size(); ++j) {
      if (g.has_edge(nb[i], nb[j])) out.insert(make_name_pair(g.vertex(nb[i]).name, g.vertex(nb[j]).name));
    }
  }
  return out;
}

inline VertexProfile vertex_profile(const SimilarityContext& ctx, VertexId v) {
  const auto& g = *ctx.network;
  const auto& idx = *ctx.index;
  const auto& vx = g.vertex(v);
  VertexProfile prof;
  prof.paper_count = vx.papers.size();
  std::vector<double> sum;
  std::size_t embedded = 0;
  if (ctx.embeddings && ctx.embeddings->dim() > 0) sum.assign(ctx.embeddings->dim(), 0.0);
  for (auto p : vx.papers) {
    const int year = idx.year(p);
    for (auto k : idx.keywords(p)) {
      detail::sorted_insert(prof.keyword_years[k], year);
      if (!sum.empty()) {
        if (const auto* vec = ctx.embeddings->find(idx.keyword_text(k))) {
          for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += (*vec)[d];
          ++embedded;
        }
      }
    }
    ++prof.venues[idx.venue(p)];
  }
  if (embedded > 0) {
    for (auto& x : sum) x /= static_cast<double>(embedded);
    prof.centroid = std::move(sum);
  }
  std::size_t best = 0;
  for (const auto& [h, c] : prof.venues) {
    if (c > best || (c == best && idx.venue_text(h) < idx.venue_text(prof.modal_venue))) {
      best = c;
      prof.modal_venue = h;
    }
  }
  prof.triangles = triangle_name_pairs(g, v);
  return prof;
}

// Vertices within `radius` hops of root (root first), and the induced adjacency.
struct EgoGraph {
  std::vector<VertexId> nodes;
  std::vector<std::vector<std::size_t>> adj;
};

inline EgoGraph ego_graph(const CollabNetwork& g, VertexId root, int radius) {
  EgoGraph ego;
  std::map<VertexId, std::size_t> pos;
  ego.nodes.push_back(root);
  pos[root] = 0;
  std::vector<VertexId> frontier = {root};
  for (int r = 0; r < radius && !frontier.empty(); ++r) {
    std::vector<VertexId> next;
    for (auto v : frontier) {
      for (const auto& [w, e] : g.adjacency(v)) {
        if (pos.emplace(w, ego.nodes.size()).second) {
          ego.nodes.push_back(w);
          next.push_back(w);
        }
      }
    }
    frontier = std::move(next);
  }
  ego.adj.resize(ego.nodes.size());
  for (std::size_t i = 0; i < ego.nodes.size(); ++i) {
    for (const auto& [w, e] : g.adjacency(ego.nodes[i])) {
      auto it = pos.find(w);
      if (it != pos.end()) ego.adj[i].push_back(it->second);
    }
  }
  return ego;
}

// Label-count features of both ego graphs under one shared label dictionary,
// over iterations 0..h, root vertices excluded.
inline std::pair<std::map<std::uint32_t, double>, std::map<std::uint32_t, double>> wl_features(
    const CollabNetwork& g, VertexId u, VertexId v, int h) {
  std::map<std::vector<std::uint32_t>, std::uint32_t> dict;
  auto intern = [&](std::vector<std::uint32_t> sig) {
    return dict.emplace(std::move(sig), static_cast<std::uint32_t>(dict.size())).first->second;
  };
  std::map<std::string, std::uint32_t> name_ids;
  std::array<EgoGraph, 2> egos = {ego_graph(g, u, h), ego_graph(g, v, h)};
  std::array<std::vector<std::uint32_t>, 2> labels;
  for (std::size_t s = 0; s < 2; ++s) {
    for (auto w : egos[s].nodes) {
      auto id = name_ids.emplace(g.vertex(w).name, static_cast<std::uint32_t>(name_ids.size())).first->second;
      labels[s].push_back(intern({0u, id}));
    }
  }
  std::array<std::map<std::uint32_t, double>, 2> phi;
  auto accumulate = [&] {
    for (std::size_t s = 0; s < 2; ++s) {
      for (std::size_t i = 1; i < labels[s].size(); ++i) phi[s][labels[s][i]] += 1.0;
    }
  };
  accumulate();
  for (int it = 1; it <= h; ++it) {
    std::array<std::vector<std::uint32_t>, 2> next;
    for (std::size_t s = 0; s < 2; ++s) {
      next[s].resize(labels[s].size());
      for (std::size_t i = 0; i < labels[s].size(); ++i) {
        std::vector<std::uint32_t> nb;
        for (auto j : egos[s].adj[i]) nb.push_back(labels[s][j]);
        std::sort(nb.begin(), nb.end());
        std::vector<std::uint32_t> sig = {static_cast<std::uint32_t>(it), labels[s][i]};
        sig.insert(sig.end(), nb.begin(), nb.end());
        next[s][i] = intern(std::move(sig));
      }
    }
    labels = std::move(next);
    accumulate();
  }
  return {std::move(phi[0]), std::move(phi[1])};
}

// Empty when either self-kernel is 0 (an ego graph with no vertex besides the root).
inline std::optional<double> wl_kernel_if_defined(const SimilarityContext& ctx, VertexId u, VertexId v) {
  detail::check_pair(ctx, u, v);
  auto [a, b] = wl_features(*ctx.network, u, v, ctx.opts.wl_iterations);
  auto dot = [](const std::map<std::uint32_t, double>& x, const std::map<std::uint32_t, double>& y) {
    double s = 0.0;
    for (const auto& [k, c] : x) {
      auto it = y.find(k);
      if (it != y.end()) s += c * it->second;
    }
    return s;
  };
  const double kuu = dot(a, a);
  const double kvv = dot(b, b);
  if (kuu == 0.0 || kvv == 0.0) return std::nullopt;
  return std::clamp(dot(a, b) / std::sqrt(kuu * kvv), 0.0, 1.0);
}

inline double wl_kernel(const SimilarityContext& ctx, VertexId u, VertexId v) {
  return wl_kernel_if_defined(ctx, u, v).value_or(0.0);
}

inline double clique_coincidence(const VertexProfile& pu, const VertexProfile& pv) {
  const double tau = detail::tau_of(pu, pv);
  std::size_t common = 0;
  for (const auto& t : pu.triangles) common += pv.triangles.count(t);
  return static_cast<double>(common) / tau;
}

inline std::optional<double> interest_cosine(const VertexProfile& pu, const VertexProfile& pv) {
  if (pu.centroid.empty() || pv.centroid.empty()) return std::nullopt;
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t d = 0; d < pu.centroid.size(); ++d) {
    dot += pu.centroid[d] * pv.centroid[d];
    nu += pu.centroid[d] * pu.centroid[d];
    nv += pv.centroid[d] * pv.centroid[d];
  }
  if (nu == 0.0 || nv == 0.0) return std::nullopt;
  return std::clamp(dot / std::sqrt(nu * nv), -1.0, 1.0);
}

inline double time_consistency(const SimilarityContext& ctx, const VertexProfile& pu,
                               const VertexProfile& pv) {
  const double tau = detail::tau_of(pu, pv);
  const double sign = ctx.opts.positive_time_exponent ? 1.0 : -1.0;
  double sum = 0.0;
  auto it = pu.keyword_years.begin();
  auto jt = pv.keyword_years.begin();
  while (it != pu.keyword_years.end() && jt != pv.keyword_years.end()) {
    if (it->first < jt->first) {
      ++it;
    } else if (jt->first < it->first) {
      ++jt;
    } else {
      const double gap = static_cast<double>(detail::min_year_gap(it->second, jt->second));
      sum += std::exp(sign * ctx.opts.alpha * gap) / detail::clamped_log(ctx.index->keyword_frequency(it->first));
      ++it;
      ++jt;
    }
  }
  return sum / tau;
}

inline double representative_community(const VertexProfile& pu, const VertexProfile& pv) {
  const double tau = detail::tau_of(pu, pv);
  auto count = [](const VertexProfile& p, VenueId h) {
    auto it = p.venues.find(h);
    return it == p.venues.end() ? std::size_t{0} : it->second;
  };
  return static_cast<double>(count(pv, pu.modal_venue) + count(pu, pv.modal_venue)) / tau;
}

inline double community_similarity(const SimilarityContext& ctx, const VertexProfile& pu,
                                   const VertexProfile& pv) {
  const double tau = detail::tau_of(pu, pv);
  double sum = 0.0;
  for (const auto& [h, c] : pu.venues) {
    if (pv.venues.count(h)) sum += 1.0 / detail::clamped_log(ctx.index->venue_frequency(h));
  }
  return sum / tau;
}

// Vertex-id overloads.
inline double clique_coincidence(const SimilarityContext& ctx, VertexId u, VertexId v) {
  detail::check_pair(ctx, u, v);
  return clique_coincidence(vertex_profile(ctx, u), vertex_profile(ctx, v));
}
inline std::optional<double> interest_cosine(const SimilarityContext& ctx, VertexId u, VertexId v) {
  detail::check_pair(ctx, u, v);
  return interest_cosine(vertex_profile(ctx, u), vertex_profile(ctx, v));
}
inline double time_consistency(const SimilarityContext& ctx, VertexId u, VertexId v) {
  detail::check_pair(ctx, u, v);
  return time_consistency(ctx, vertex_profile(ctx, u), vertex_profile(ctx, v));
}
inline double representative_community(const SimilarityContext& ctx, VertexId u, VertexId v) {
  detail::check_pair(ctx, u, v);
  return representative_community(vertex_profile(ctx, u), vertex_profile(ctx, v));
}
inline double community_similarity(const SimilarityContext& ctx, VertexId u, VertexId v) {
  detail::check_pair(ctx, u, v);
  return community_similarity(ctx, vertex_profile(ctx, u), vertex_profile(ctx, v));
}

inline SimilarityVector similarity_vector(const SimilarityContext& ctx, VertexId u, VertexId v,
                                          const VertexProfile& pu, const VertexProfile& pv) {
  detail::check_pair(ctx, u, v);
  if (u == v) throw DomainError("cannot compare a vertex with itself");
  SimilarityVector s;
  if (auto k = wl_kernel_if_defined(ctx, u, v)) {
    s.g[kWl] = *k;
  } else {
    s.missing[kWl] = true;
  }
  s.g[kClique] = clique_coincidence(pu, pv);
  s.missing[kClique] = pu.triangles.empty() || pv.triangles.empty();
  if (auto c = interest_cosine(pu, pv)) {
    s.g[kInterest] = *c;
  } else {
    s.missing[kInterest] = true;
  }
  s.g[kTime] = time_consistency(ctx, pu, pv);
  s.g[kRepVenue] = representative_community(pu, pv);
  s.g[kVenue] = community_similarity(ctx, pu, pv);
  return s;
}

// Throws DomainError when the pair cannot be scored.
inline SimilarityVector similarity_vector(const SimilarityContext& ctx, VertexId u, VertexId v) {
  detail::check_pair(ctx, u, v);
  return similarity_vector(ctx, u, v, vertex_profile(ctx, u), vertex_profile(ctx, v));
}

}  // namespace authnet
