#pragma once

// Training pairs for the mixture fit: a seeded uniform sample of same-name
// vertex pairs, plus one synthetic pair per well-published vertex obtained by
// splitting its papers at random into two halves.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "authnet/common.hpp"
#include "authnet/network.hpp"
#include "authnet/similarity.hpp"

namespace authnet {

struct SamplingOptions {
  double rate = 0.1;
  std::size_t min_split = 5;
  std::uint64_t seed = 42;
};

struct TrainingPair {
  std::string name;
  std::uint32_t first = 0;   // instance ids; for a split pair, the original vertex
  std::uint32_t second = 0;  // and the temporary half
  bool synthetic = false;
  PaperSet first_papers;  // both sides' papers, recorded for split pairs
  PaperSet second_papers;
};

struct TrainingSet {
  std::vector<SimilarityVector> vectors;
  std::vector<TrainingPair> provenance;
  std::size_t candidate_pairs = 0;  // same-name pairs before sampling
  std::size_t skipped = 0;          // sampled pairs that could not be scored
};

// Same-name vertex pairs, names ascending, then by instance.
inline std::vector<std::pair<VertexId, VertexId>> same_name_pairs(const CollabNetwork& g) {
  std::vector<std::pair<VertexId, VertexId>> out;
  for (const auto& name : g.names()) {
    auto vs = g.vertices_named(name);
    for (std::size_t i = 0; i < vs.size(); ++i) {
      for (std::size_t j = i + 1; j < vs.size(); ++j) out.emplace_back(vs[i], vs[j]);
    }
  }
  return out;
}

inline TrainingSet sample_training_pairs(const CollabNetwork& network, const SimilarityContext& ctx,
                                         const SamplingOptions& opts = {}) {
  if (!(opts.rate > 0.0 && opts.rate <= 1.0)) throw DomainError("sample rate must lie in (0, 1]");
  if (opts.min_split < 1) throw DomainError("min_split must be positive");
  std::mt19937_64 rng(opts.seed);
  TrainingSet ts;

  auto pairs = same_name_pairs(network);
  ts.candidate_pairs = pairs.size();
  const auto want = static_cast<std::size_t>(std::ceil(opts.rate * static_cast<double>(pairs.size())));
  std::vector<std::pair<VertexId, VertexId>> chosen;
  std::sample(pairs.begin(), pairs.end(), std::back_inserter(chosen), want, rng);

  const auto local = ctx.with_network(network);
  for (auto [u, v] : chosen) {
    try {
      ts.vectors.push_back(similarity_vector(local, u, v));
      ts.provenance.push_back({network.vertex(u).name, network.vertex(u).instance_id,
                               network.vertex(v).instance_id, false, {}, {}});
    } catch (const DomainError&) {
      ++ts.skipped;
    }
  }

  CollabNetwork work = network;
  const auto wctx = ctx.with_network(work);
  for (auto v : network.vertex_ids()) {
    const auto& papers = network.vertex(v).papers;
    if (papers.size() < 2 * opts.min_split) continue;
    PaperSet shuffled = papers;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    PaperSet moved(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(shuffled.size() / 2));
    const auto half = work.split(v, moved);
    try {
      ts.vectors.push_back(similarity_vector(wctx, v, half));
      ts.provenance.push_back({work.vertex(v).name, work.vertex(v).instance_id,
                               work.vertex(half).instance_id, true, work.vertex(v).papers,
                               work.vertex(half).papers});
    } catch (const DomainError&) {
      ++ts.skipped;
    }
    work.merge(v, half);
  }

  if (ts.vectors.empty()) {
    throw FitError("no same-name pairs and no splittable vertices: the model cannot be fitted");
  }
  return ts;
}

}  // namespace authnet
