#pragma once

// Single-paper disambiguation against a built network: the new (paper, name)
// item is scored as a one-paper vertex against every vertex of that name and
// joins the best one if its score clears delta. The model is not refitted.

#include <optional>
#include <string>
#include <vector>

#include "authnet/common.hpp"
#include "authnet/corpus.hpp"
#include "authnet/model.hpp"
#include "authnet/network.hpp"
#include "authnet/similarity.hpp"

namespace authnet {

// Adds, for every author pair of `paper` whose items are both owned, the edge
// between the owners carrying `paper`. Returns the number of new edges.
inline std::size_t link_paper(CollabNetwork& g, const CorpusIndex& index, PaperIdx paper) {
  const auto& authors = index.paper(paper).authors;
  std::vector<VertexId> owners;
  owners.reserve(authors.size());
  for (const auto& a : authors) owners.push_back(g.owner(paper, a));
  std::size_t added = 0;
  for (std::size_t i = 0; i < owners.size(); ++i) {
    for (std::size_t j = i + 1; j < owners.size(); ++j) {
      if (owners[i] == kNoVertex || owners[j] == kNoVertex) continue;
      if (!g.has_edge(owners[i], owners[j])) ++added;
      g.add_edge(owners[i], owners[j], {paper});
    }
  }
  return added;
}

struct CandidateScore {
  VertexId vertex = kNoVertex;
  std::uint32_t instance = 0;
  std::optional<double> score;  // empty when the pair could not be scored
};

struct IncrementalDecision {
  std::string name;
  std::string paper_id;
  bool attached = false;         // AttachedTo(vertex) versus NewVertex(vertex)
  VertexId vertex = kNoVertex;
  std::uint32_t instance = 0;
  std::optional<double> best_score;
  std::optional<double> runner_up_score;
  std::vector<CandidateScore> candidates;
};

// Best candidate by score, ties to the lower instance; kNoVertex when none scored.
inline const CandidateScore* best_candidate(const std::vector<CandidateScore>& cands) {
  const CandidateScore* best = nullptr;
  for (const auto& c : cands) {
    if (!c.score) continue;
    if (!best || *c.score > *best->score || (*c.score == *best->score && c.instance < best->instance)) {
      best = &c;
    }
  }
  return best;
}

// Resolves the (paper, name) item. `paper` must already be in ctx's corpus
// index and not yet attributed for `name`. With `link`, the paper's edges to
// already-resolved co-authors are recovered afterwards.
inline IncrementalDecision disambiguate_paper(CollabNetwork& g, const ModelParams& params,
                                              const SimilarityContext& ctx, PaperIdx paper,
                                              const std::string& name, double delta, bool link = true) {
  const auto& index = *ctx.index;
  const auto& rec = index.paper(paper);
  if (std::find(rec.authors.begin(), rec.authors.end(), name) == rec.authors.end()) {
    throw DomainError("name '" + name + "' is not an author of paper '" + rec.paper_id + "'");
  }
  if (g.owner(paper, name) != kNoVertex) {
    throw DomainError("paper '" + rec.paper_id + "' is already attributed for '" + name + "'");
  }
  const auto local = ctx.with_network(g);
  IncrementalDecision d;
  d.name = name;
  d.paper_id = rec.paper_id;
  const auto existing = g.vertices_named(name);
  const auto v = g.add_vertex(name, {paper});
  const auto pv = vertex_profile(local, v);
  for (auto c : existing) {
    CandidateScore cs{c, g.vertex(c).instance_id, std::nullopt};
    try {
      cs.score = evaluate_match(similarity_vector(local, v, c, pv, vertex_profile(local, c)), params).score;
    } catch (const DomainError&) {
    }
    d.candidates.push_back(cs);
  }
  const auto* best = best_candidate(d.candidates);
  if (best) {
    d.best_score = best->score;
    for (const auto& c : d.candidates) {
      if (&c != best && c.score && (!d.runner_up_score || *c.score > *d.runner_up_score)) {
        d.runner_up_score = c.score;
      }
    }
  }
  if (best && *best->score >= delta) {
    g.merge(best->vertex, v);
    d.attached = true;
    d.vertex = best->vertex;
  } else {
    d.vertex = v;
  }
  d.instance = g.vertex(d.vertex).instance_id;
  if (link) link_paper(g, index, paper);
  return d;
}

// Appends `rec` to the index, then resolves each of its authors in list order.
inline std::vector<IncrementalDecision> add_paper(CollabNetwork& g, CorpusIndex& index,
                                                  const ModelParams& params, const SimilarityContext& ctx,
                                                  PaperRecord rec, double delta) {
  if (ctx.index != &index) throw DomainError("context does not reference the given index");
  const auto p = index.append(std::move(rec));
  std::vector<IncrementalDecision> out;
  for (const auto& a : index.paper(p).authors) {
    out.push_back(disambiguate_paper(g, params, ctx, p, a, delta, false));
  }
  link_paper(g, index, p);
  return out;
}

}  // namespace authnet
