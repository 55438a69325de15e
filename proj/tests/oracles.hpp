#pragma once

// Independent reference computations used by the unit tests and the
// acceptance suite. None of these call the library routine they check.

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fixtures.hpp"

namespace oracles {

using namespace authnet;
using fixtures::rec;

// Upper tail of the standard normal by composite Simpson integration of the
// density over [z, z + 40].
inline double normal_tail_by_quadrature(double z) {
  const int n = 200000;
  const double a = z, b = z + 40.0, h = (b - a) / n;
  auto pdf = [](double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI); };
  double s = pdf(a) + pdf(b);
  for (int i = 1; i < n; ++i) s += pdf(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

inline std::map<NamePair, std::size_t> brute_force_pairs(const std::vector<PaperRecord>& rs, std::size_t eta) {
  std::map<NamePair, std::size_t> c;
  for (const auto& r : rs) {
    for (std::size_t i = 0; i < r.authors.size(); ++i) {
      for (std::size_t j = 0; j < r.authors.size(); ++j) {
        if (r.authors[i] < r.authors[j]) ++c[{r.authors[i], r.authors[j]}];
      }
    }
  }
  std::map<NamePair, std::size_t> out;
  for (const auto& [k, n] : c) {
    if (n >= eta) out[k] = n;
  }
  return out;
}

inline std::vector<PaperRecord> repeated_papers(const std::vector<std::string>& authors, int times, int& next_id) {
  std::vector<PaperRecord> out;
  for (int i = 0; i < times; ++i) out.push_back(rec("q" + std::to_string(next_id++), 2000 + i, "V", "t", authors));
  return out;
}

// Planted triangles over dedicated names plus background noise papers.
inline std::vector<PaperRecord> planted_corpus(std::mt19937_64& rng, int triangles, std::vector<std::array<std::string, 3>>& planted) {
  auto rs = fixtures::random_records(rng, 120, 40, 3);
  int next = 0;
  std::uniform_int_distribution<int> reps(3, 5);
  for (int t = 0; t < triangles; ++t) {
    std::array<std::string, 3> tri = {"t" + std::to_string(t) + "a", "t" + std::to_string(t) + "b",
                                      "t" + std::to_string(t) + "c"};
    planted.push_back(tri);
    for (auto& r : repeated_papers({tri[0], tri[1], tri[2]}, reps(rng), next)) rs.push_back(r);
    // Loose papers of the same names with random co-authors.
    for (auto& r : repeated_papers({tri[t % 3], "n" + std::to_string(t)}, 1, next)) rs.push_back(r);
  }
  return rs;
}

// WL refinement with explicit string labels; no compression dictionary.
inline double wl_by_strings(const CollabNetwork& g, VertexId u, VertexId v, int h) {
  auto phi = [&](VertexId root) {
    std::map<VertexId, int> dist = {{root, 0}};
    std::vector<VertexId> order = {root};
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (dist[order[i]] == h) continue;
      for (auto w : g.neighbors(order[i])) {
        if (!dist.count(w)) {
          dist[w] = dist[order[i]] + 1;
          order.push_back(w);
        }
      }
    }
    std::map<VertexId, std::string> label;
    for (auto w : order) label[w] = g.vertex(w).name;
    std::map<std::string, double> f;
    auto count = [&] {
      for (auto w : order) {
        if (w != root) f[label[w]] += 1;
      }
    };
    count();
    for (int it = 1; it <= h; ++it) {
      std::map<VertexId, std::string> next;
      for (auto w : order) {
        std::vector<std::string> nb;
        for (auto z : g.neighbors(w)) {
          if (dist.count(z)) nb.push_back(label[z]);
        }
        std::sort(nb.begin(), nb.end());
        std::string s = std::to_string(it) + "(" + label[w] + "|";
        for (auto& x : nb) s += x + ",";
        next[w] = s + ")";
      }
      label = std::move(next);
      count();
    }
    return f;
  };
  auto a = phi(u), b = phi(v);
  auto dot = [](auto& x, auto& y) {
    double s = 0;
    for (auto& [k, c] : x) {
      if (y.count(k)) s += c * y.at(k);
    }
    return s;
  };
  const double kuu = dot(a, a), kvv = dot(b, b);
  if (kuu == 0 || kvv == 0) return 0.0;
  return dot(a, b) / std::sqrt(kuu * kvv);
}

// Every item of `rs` assigned to one of `k` vertices of its name at random.
inline CollabNetwork random_assignment(const CorpusIndex& idx, std::mt19937_64& rng, std::size_t k, double edge_p) {
  CollabNetwork g;
  std::map<std::string, std::vector<VertexId>> by_name;
  for (const auto& [name, papers] : idx.name_index()) {
    std::vector<PaperSet> parts(std::min(k, papers.size()));
    std::uniform_int_distribution<std::size_t> d(0, parts.size() - 1);
    for (std::size_t i = 0; i < papers.size(); ++i) parts[i < parts.size() ? i : d(rng)].push_back(papers[i]);
    for (auto& p : parts) {
      std::sort(p.begin(), p.end());
      by_name[name].push_back(g.add_vertex(name, p));
    }
  }
  std::bernoulli_distribution coin(edge_p);
  auto ids = g.vertex_ids();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      if (g.vertex(ids[i]).name != g.vertex(ids[j]).name && coin(rng)) g.add_edge(ids[i], ids[j]);
    }
  }
  return g;
}

inline double clamp_log(std::size_t f) { return std::log(f <= 1 ? 2.0 : static_cast<double>(f)); }

// Sums taken straight from the paper records.
struct Resummation {
  const CorpusIndex& idx;
  double alpha;

  std::map<std::string, std::vector<int>> bag(const CollabNetwork& g, VertexId v) const {
    std::map<std::string, std::vector<int>> out;
    for (auto p : g.vertex(v).papers) {
      for (auto k : idx.keywords(p)) out[idx.keyword_text(k)].push_back(idx.year(p));
    }
    return out;
  }
  std::size_t fb(const std::string& w) const {
    std::size_t n = 0;
    for (PaperIdx p = 0; p < idx.size(); ++p) {
      bool has = false;
      for (auto k : idx.keywords(p)) has = has || idx.keyword_text(k) == w;
      n += has;
    }
    return n;
  }
  std::size_t fh(const std::string& venue) const {
    std::size_t n = 0;
    for (const auto& r : idx.papers()) n += normalize_venue(r.venue) == venue;
    return n;
  }
  std::map<std::string, std::size_t> venues(const CollabNetwork& g, VertexId v) const {
    std::map<std::string, std::size_t> out;
    for (auto p : g.vertex(v).papers) ++out[normalize_venue(idx.paper(p).venue)];
    return out;
  }
  double tau(const CollabNetwork& g, VertexId u, VertexId v) const {
    return static_cast<double>(std::min(g.vertex(u).papers.size(), g.vertex(v).papers.size()));
  }
  double g4(const CollabNetwork& g, VertexId u, VertexId v) const {
    auto a = bag(g, u), b = bag(g, v);
    double s = 0;
    for (auto& [w, ya] : a) {
      if (!b.count(w)) continue;
      int best = 1 << 30;
      for (int x : ya) {
        for (int y : b[w]) best = std::min(best, std::abs(x - y));
      }
      s += std::exp(-alpha * best) / clamp_log(fb(w));
    }
    return s / tau(g, u, v);
  }
  double g5(const CollabNetwork& g, VertexId u, VertexId v) const {
    auto a = venues(g, u), b = venues(g, v);
    auto modal = [](const std::map<std::string, std::size_t>& m) {
      std::string best;
      std::size_t n = 0;
      for (auto& [h, c] : m) {
        if (c > n) {
          n = c;
          best = h;
        }
      }
      return best;
    };
    auto cnt = [](const std::map<std::string, std::size_t>& m, const std::string& h) {
      return m.count(h) ? m.at(h) : 0;
    };
    return static_cast<double>(cnt(b, modal(a)) + cnt(a, modal(b))) / tau(g, u, v);
  }
  double g6(const CollabNetwork& g, VertexId u, VertexId v) const {
    auto a = venues(g, u), b = venues(g, v);
    double s = 0;
    for (auto& [h, c] : a) {
      if (b.count(h)) s += 1.0 / clamp_log(fh(h));
    }
    return s / tau(g, u, v);
  }
};

inline std::set<std::pair<std::string, std::string>> triangles_brute(const CollabNetwork& g, VertexId w) {
  std::set<std::pair<std::string, std::string>> out;
  auto ids = g.vertex_ids();
  for (auto b : ids) {
    for (auto c : ids) {
      if (b == w || c == w || b == c) continue;
      if (g.has_edge(w, b) && g.has_edge(w, c) && g.has_edge(b, c)) {
        out.insert(make_name_pair(g.vertex(b).name, g.vertex(c).name));
      }
    }
  }
  return out;
}

// Two-component sample: Gaussian features at 0.8 / 0.2 (sd 0.1), exponential
// features with means 1.0 / 0.2. Returns the vectors and the true labels.
inline std::pair<std::vector<SimilarityVector>, std::vector<bool>> planted_mixture(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution label(p);
  std::normal_distribution<double> gm(0.8, 0.1), gu(0.2, 0.1);
  std::exponential_distribution<double> em(1.0), eu(5.0);
  std::vector<SimilarityVector> out;
  std::vector<bool> truth;
  for (std::size_t j = 0; j < n; ++j) {
    const bool m = label(rng);
    SimilarityVector s;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      const bool gauss = i == kWl || i == kInterest;
      s.g[i] = gauss ? (m ? gm(rng) : gu(rng)) : (m ? em(rng) : eu(rng));
    }
    out.push_back(s);
    truth.push_back(m);
  }
  return {out, truth};
}

// Expected complete-data log-likelihood under frozen responsibilities.
inline double q_function(const std::vector<SimilarityVector>& data, const std::vector<double>& r, const ModelParams& m) {
  double q = 0.0;
  for (std::size_t j = 0; j < data.size(); ++j) {
    double a = std::log(m.prior), b = std::log1p(-m.prior);
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      if (data[j].missing[i]) continue;
      a += m.matched[i].log_density(data[j].g[i]);
      b += m.unmatched[i].log_density(data[j].g[i]);
    }
    q += r[j] * a + (1.0 - r[j]) * b;
  }
  return q;
}

inline MicroMetrics brute_force_metrics(const Partition& pred, const GoldLabels& gold) {
  std::vector<std::pair<ItemKey, std::string>> items(gold.begin(), gold.end());
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t j = i + 1; j < items.size(); ++j) {
      if (items[i].first.second != items[j].first.second) continue;
      const bool same_pred = pred.at(items[i].first) == pred.at(items[j].first);
      const bool same_gold = items[i].second == items[j].second;
      tp += same_pred && same_gold;
      fp += same_pred && !same_gold;
      fn += !same_pred && same_gold;
      tn += !same_pred && !same_gold;
    }
  }
  return metrics_from_counts(tp, fp, fn, tn);
}

inline std::pair<Partition, GoldLabels> random_labelling(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_items(1, 40), n_names(1, 4), label(0, 4);
  Partition pred;
  GoldLabels gold;
  const int names = n_names(rng), items = n_items(rng);
  std::uniform_int_distribution<int> pick(0, names - 1);
  for (int i = 0; i < items; ++i) {
    ItemKey k{"p" + std::to_string(i), "n" + std::to_string(pick(rng))};
    gold[k] = "A" + std::to_string(label(rng));
    pred[k] = "c" + std::to_string(label(rng));
  }
  return {pred, gold};
}

using CandidateOracle = std::vector<std::pair<std::uint32_t, std::optional<double>>>;

// Scores every candidate from scratch on a private copy of the network.
inline CandidateOracle rescore_candidates(const CollabNetwork& g, const CorpusIndex& idx, const ModelParams& m,
                                          PaperIdx p, const std::string& name,
                                          const EmbeddingTable* emb = nullptr, SimilarityOptions opts = {}) {
  CollabNetwork copy = g;
  const auto existing = copy.vertices_named(name);
  const auto v = copy.add_vertex(name, {p});
  SimilarityContext ctx(copy, idx, emb, opts);
  CandidateOracle out;
  for (auto c : existing) {
    std::optional<double> s;
    try {
      s = evaluate_match(similarity_vector(ctx, c, v), m).score;
    } catch (const DomainError&) {
    }
    out.emplace_back(copy.vertex(c).instance_id, s);
  }
  return out;
}

// Highest score, ties to the lower instance; empty when nothing scored.
inline std::optional<std::pair<std::uint32_t, double>> oracle_best(const CandidateOracle& c) {
  std::optional<std::pair<std::uint32_t, double>> best;
  for (const auto& [inst, s] : c) {
    if (s && (!best || *s > best->second || (*s == best->second && inst < best->first))) best = {{inst, *s}};
  }
  return best;
}

}  // namespace oracles
