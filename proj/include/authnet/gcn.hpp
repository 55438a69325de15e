#pragma once

// Global collaboration network: greedy agglomerative merging of same-name
// vertices by matching score, then recovery of every co-authorship edge.
//
// Merge log format (tab-separated): name kept_instance absorbed_instance score iteration

#include <chrono>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "authnet/common.hpp"
#include "authnet/corpus.hpp"
#include "authnet/incremental.hpp"
#include "authnet/model.hpp"
#include "authnet/network.hpp"
#include "authnet/similarity.hpp"

namespace authnet {

struct MergeEvent {
  std::string name;
  std::uint32_t kept = 0;      // instance ids
  std::uint32_t absorbed = 0;
  double score = 0.0;
  std::size_t iteration = 0;   // 1-based position in the merge sequence

  friend bool operator==(const MergeEvent&, const MergeEvent&) = default;
};

struct MergeOptions {
  unsigned workers = 1;
  // Repeat sweeps over all names until one makes no merge.
  bool until_stable = true;
};

struct MergeReport {
  std::vector<MergeEvent> events;
  std::size_t scored_pairs = 0;
  std::size_t skipped_pairs = 0;
  std::size_t sweeps = 0;
  std::map<std::string, double> seconds_per_name;
};

namespace detail {

struct PairKey {
  VertexId a, b;
  auto operator<=>(const PairKey&) const = default;
};

inline std::size_t merge_name(CollabNetwork& g, const std::string& name, const ModelParams& params,
                              const SimilarityContext& ctx, double delta, unsigned workers,
                              MergeReport& report) {
  auto verts = g.vertices_named(name);
  if (verts.size() < 2) return 0;
  std::map<VertexId, VertexProfile> prof;
  for (auto v : verts) prof.emplace(v, vertex_profile(ctx, v));
  std::map<PairKey, std::optional<double>> score;

  auto score_pairs = [&](const std::vector<PairKey>& keys) {
    std::vector<std::optional<double>> out(keys.size());
    parallel_for(keys.size(), workers, [&](std::size_t k) {
      const auto [a, b] = keys[k];
      try {
        out[k] = evaluate_match(similarity_vector(ctx, a, b, prof.at(a), prof.at(b)), params).score;
      } catch (const DomainError&) {
      }
    });
    for (std::size_t k = 0; k < keys.size(); ++k) {
      score[keys[k]] = out[k];
      ++report.scored_pairs;
      if (!out[k]) ++report.skipped_pairs;
    }
  };

  std::vector<PairKey> keys;
  for (std::size_t i = 0; i < verts.size(); ++i) {
    for (std::size_t j = i + 1; j < verts.size(); ++j) keys.push_back({verts[i], verts[j]});
  }
  score_pairs(keys);

  auto inst = [&](VertexId v) { return g.vertex(v).instance_id; };
  std::size_t merges = 0;
  while (true) {
    const PairKey* best = nullptr;
    double best_score = 0.0;
    for (const auto& [k, s] : score) {
      if (!s || *s < delta) continue;
      if (!best || *s > best_score ||
          (*s == best_score && std::pair{std::min(inst(k.a), inst(k.b)), std::max(inst(k.a), inst(k.b))} <
                                   std::pair{std::min(inst(best->a), inst(best->b)),
                                             std::max(inst(best->a), inst(best->b))})) {
        best = &k;
        best_score = *s;
      }
    }
    if (!best) break;
    auto kept = best->a, absorbed = best->b;
    if (inst(absorbed) < inst(kept)) std::swap(kept, absorbed);
    report.events.push_back({name, inst(kept), inst(absorbed), best_score, report.events.size() + 1});
    g.merge(kept, absorbed);
    ++merges;
    for (auto it = score.begin(); it != score.end();) {
      if (it->first.a == absorbed || it->first.b == absorbed || it->first.a == kept || it->first.b == kept) {
        it = score.erase(it);
      } else {
        ++it;
      }
    }
    prof.erase(absorbed);
    prof[kept] = vertex_profile(ctx, kept);
    keys.clear();
    for (const auto& [w, p] : prof) {
      if (w != kept) keys.push_back({std::min(w, kept), std::max(w, kept)});
    }
    score_pairs(keys);
  }
  return merges;
}

}  // namespace detail

// Merges same-name vertices in place, names in ascending order. Within a name
// the highest-scoring pair with score >= delta merges first (ties to the lower
// instance pair) and the lower instance survives; only pairs involving the
// survivor are rescored. Unscorable pairs are counted in skipped_pairs.
inline MergeReport merge_pass(CollabNetwork& g, const ModelParams& params, const SimilarityContext& ctx,
                              double delta, const MergeOptions& opts = {}) {
  if (!std::isfinite(delta)) throw DomainError("delta must be finite");
  params.validate();
  const auto local = ctx.with_network(g);
  MergeReport report;
  while (true) {
    ++report.sweeps;
    std::size_t merges = 0;
    for (const auto& name : g.names()) {
      const auto t0 = std::chrono::steady_clock::now();
      merges += detail::merge_name(g, name, params, local, delta, opts.workers, report);
      report.seconds_per_name[name] +=
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    if (merges == 0 || !opts.until_stable) break;
  }
  return report;
}

struct RecoveryReport {
  std::size_t edges_added = 0;
  std::size_t items_assigned = 0;  // items resolved through the incremental rule
  std::vector<IncrementalDecision> decisions;
};

// Gives every (paper, name) item an owner (unowned items go through the
// incremental decision rule) and links the owners of every author pair.
inline RecoveryReport recover_relations(CollabNetwork& g, const CorpusIndex& index, const ModelParams& params,
                                        const SimilarityContext& ctx, double delta) {
  const auto local = ctx.with_network(g);
  RecoveryReport r;
  for (PaperIdx p = 0; p < index.size(); ++p) {
    for (const auto& a : index.paper(p).authors) {
      if (g.owner(p, a) != kNoVertex) continue;
      r.decisions.push_back(disambiguate_paper(g, params, local, p, a, delta, false));
      ++r.items_assigned;
    }
    r.edges_added += link_paper(g, index, p);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Merge log and timing files

inline void write_merge_log(std::ostream& out, const std::vector<MergeEvent>& events) {
  for (const auto& e : events) {
    out << e.name << '\t' << e.kept << '\t' << e.absorbed << '\t' << detail::format_double(e.score) << '\t'
        << e.iteration << '\n';
  }
}

inline std::vector<MergeEvent> read_merge_log(std::istream& in) {
  std::vector<MergeEvent> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    auto f = detail::split(line, '\t');
    if (f.size() != 5) throw FormatError("merge log line " + std::to_string(lineno) + " needs 5 fields");
    out.push_back({std::string(f[0]), detail::parse_int<std::uint32_t>(f[1], "kept"),
                   detail::parse_int<std::uint32_t>(f[2], "absorbed"), detail::parse_double(f[3], "score"),
                   detail::parse_int<std::size_t>(f[4], "iteration")});
  }
  return out;
}

inline void save_merge_log(const std::string& path, const std::vector<MergeEvent>& events) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write merge log: " + path);
  write_merge_log(out, events);
}

// name TAB seconds, one row per name.
inline void write_timing(std::ostream& out, const std::map<std::string, double>& seconds) {
  for (const auto& [name, s] : seconds) out << name << '\t' << detail::format_double(s) << '\n';
}

inline std::map<std::string, double> read_timing(std::istream& in) {
  std::map<std::string, double> out;
  std::string line;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    auto f = detail::split(line, '\t');
    if (f.size() != 2) throw FormatError("timing rows need 2 fields");
    out[std::string(f[0])] += detail::parse_double(f[1], "seconds");
  }
  return out;
}

}  // namespace authnet
