#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "authnet/authnet.hpp"

namespace fixtures {

inline authnet::PaperRecord rec(std::string id, int year, std::string venue, std::string title,
                                std::vector<std::string> authors) {
  return {std::move(id), std::move(title), std::move(venue), year, std::move(authors)};
}

inline std::string data_path(const std::string& file) { return std::string(AUTHNET_DATA_DIR) + "/" + file; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Papers over `names` distinct names with 1..max_authors authors each.
inline std::vector<authnet::PaperRecord> random_records(std::mt19937_64& rng, std::size_t papers,
                                                        std::size_t names, std::size_t max_authors = 4,
                                                        std::size_t venues = 5) {
  static const std::vector<std::string> words = {"graph",  "kernel", "mining", "author", "network",
                                                 "venue",  "model",  "sparse", "dense",  "query",
                                                 "index",  "stream", "cache",  "vision", "robust"};
  std::uniform_int_distribution<std::size_t> name_d(0, names - 1), count_d(1, max_authors),
      venue_d(0, venues - 1), word_d(0, words.size() - 1), len_d(2, 6);
  std::uniform_int_distribution<int> year_d(1990, 2020);
  std::vector<authnet::PaperRecord> out;
  for (std::size_t p = 0; p < papers; ++p) {
    authnet::PaperRecord r;
    r.paper_id = "p" + std::to_string(p);
    r.year = year_d(rng);
    r.venue = "V" + std::to_string(venue_d(rng));
    const auto len = len_d(rng);
    for (std::size_t k = 0; k < len; ++k) r.title += (k ? " " : "") + words[word_d(rng)];
    const auto want = std::min(count_d(rng), names);
    while (r.authors.size() < want) {
      auto n = "n" + std::to_string(name_d(rng));
      if (std::find(r.authors.begin(), r.authors.end(), n) == r.authors.end()) r.authors.push_back(n);
    }
    out.push_back(std::move(r));
  }
  return out;
}

// Matched: structure near 0.8, rates 1. Unmatched: structure near 0.1, rates 10.
inline authnet::ModelParams hand_model(double prior = 0.3) {
  using namespace authnet;
  ModelParams m;
  m.prior = prior;
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    const auto f = default_families()[i];
    m.matched[i].family = m.unmatched[i].family = f;
    if (f == Family::Gaussian) {
      m.matched[i].mean = 0.8, m.matched[i].variance = 0.04;
      m.unmatched[i].mean = 0.1, m.unmatched[i].variance = 0.04;
    } else {
      m.matched[i].rate = 1.0;
      m.unmatched[i].rate = 10.0;
    }
  }
  return m;
}

// One vertex per name except `ambiguous`, whose papers are dealt round-robin
// over `k` vertices; every author pair is then linked.
inline authnet::CollabNetwork dealt_network(const authnet::CorpusIndex& idx, const std::string& ambiguous,
                                            std::size_t k) {
  using namespace authnet;
  CollabNetwork g;
  for (const auto& [name, papers] : idx.name_index()) {
    const auto parts = name == ambiguous ? std::min(k, papers.size()) : std::size_t{1};
    std::vector<PaperSet> split(parts);
    for (std::size_t i = 0; i < papers.size(); ++i) split[i % parts].push_back(papers[i]);
    for (auto& s : split) g.add_vertex(name, s);
  }
  for (PaperIdx p = 0; p < idx.size(); ++p) link_paper(g, idx, p);
  return g;
}

}  // namespace fixtures
