#pragma once

// Planted-truth bibliographic corpus. Authors belong to topics, publish with a
// heavy-tailed productivity, mostly with a fixed circle of collaborators, in
// preferred venues, with titles drawn from preferred topic words. Chosen names
// are shared by several authors; gold labels cover those ambiguous names.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "authnet/corpus.hpp"
#include "authnet/eval.hpp"

namespace authnet {

struct SyntheticOptions {
  std::uint64_t seed = 7;
  std::size_t papers = 2400;
  std::size_t topics = 16;
  std::size_t authors = 900;           // including those with shared names
  std::size_t ambiguous_names = 120;
  std::size_t min_sharing = 2;         // authors per ambiguous name
  std::size_t max_sharing = 3;
  double same_topic_collision = 0.2;   // chance a sharer is drawn from the same topic
  double productivity_exponent = 1.6;  // weight of the author at rank k ~ (k + offset)^-exponent
  double productivity_offset = 10.0;
  std::size_t circle_min = 2;
  std::size_t circle_max = 5;
  double circle_loyalty = 0.6;         // co-author drawn from the circle
  // Weights of 0, 1, 2, 3 co-authors besides the lead author.
  std::vector<double> team_weights = {0.2, 0.35, 0.3, 0.15};
  std::size_t words_per_topic = 80;
  std::size_t preferred_words = 14;
  std::size_t venues_per_topic = 6;
  std::size_t preferred_venues = 2;
  double venue_loyalty = 0.8;
  int first_year = 1995;
  int last_year = 2020;
};

struct SyntheticAuthor {
  std::string id;
  std::string name;
  std::size_t topic = 0;
  double weight = 1.0;
  int start = 2000;
  int end = 2010;
  std::vector<std::size_t> circle;
  std::vector<std::string> words;
  std::vector<std::string> venues;
};

struct SyntheticCorpus {
  std::vector<PaperRecord> records;
  std::vector<SyntheticAuthor> authors;
  GoldLabels gold;      // ambiguous names only
  GoldLabels all_items; // every (paper, name) item
  std::set<std::string> ambiguous;
};

namespace detail {

inline std::string syllable_word(std::mt19937_64& rng, std::size_t syllables) {
  static const char* kOnsets[] = {"b", "c", "d", "f", "g", "h", "j", "k", "l", "m", "n",
                                  "p", "r", "s", "t", "v", "w", "z", "ch", "sh", "tr", "qu"};
  static const char* kVowels[] = {"a", "e", "i", "o", "u", "ai", "ou", "ei"};
  std::uniform_int_distribution<std::size_t> on(0, std::size(kOnsets) - 1), vo(0, std::size(kVowels) - 1);
  std::string w;
  for (std::size_t s = 0; s < syllables; ++s) {
    w += kOnsets[on(rng)];
    w += kVowels[vo(rng)];
  }
  return w;
}

template <typename T>
const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> d(0, v.size() - 1);
  return v[d(rng)];
}

}  // namespace detail

inline SyntheticCorpus generate_corpus(const SyntheticOptions& o = {}) {
  if (o.topics == 0 || o.authors < 2 || o.papers == 0) throw DomainError("empty synthetic configuration");
  if (o.min_sharing < 2 || o.max_sharing < o.min_sharing) throw DomainError("invalid sharing range");
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SyntheticCorpus out;

  std::set<std::string> used_words;
  auto fresh_word = [&](std::size_t syl) {
    while (true) {
      auto w = detail::syllable_word(rng, syl);
      if (used_words.insert(w).second) return w;
    }
  };
  std::vector<std::vector<std::string>> topic_words(o.topics), topic_venues(o.topics);
  for (std::size_t t = 0; t < o.topics; ++t) {
    for (std::size_t k = 0; k < o.words_per_topic; ++k) topic_words[t].push_back(fresh_word(3));
    for (std::size_t k = 0; k < o.venues_per_topic; ++k) {
      topic_venues[t].push_back("Conf " + fresh_word(2) + " " + std::to_string(t));
    }
  }
  const std::vector<std::string> filler = {"learning", "analysis", "system", "approach", "method", "data"};

  std::set<std::string> used_names;
  auto fresh_name = [&] {
    while (true) {
      auto first = detail::syllable_word(rng, 2);
      auto last = detail::syllable_word(rng, 2);
      first[0] = static_cast<char>(std::toupper(first[0]));
      last[0] = static_cast<char>(std::toupper(last[0]));
      auto n = first + " " + last;
      if (used_names.insert(n).second) return n;
    }
  };

  std::vector<std::size_t> by_rank(o.authors);
  for (std::size_t i = 0; i < o.authors; ++i) by_rank[i] = i;
  std::shuffle(by_rank.begin(), by_rank.end(), rng);
  out.authors.resize(o.authors);
  std::vector<std::vector<std::size_t>> members(o.topics);
  for (std::size_t i = 0; i < o.authors; ++i) {
    auto& a = out.authors[i];
    a.id = "A" + std::to_string(i);
    a.topic = i % o.topics;
    a.weight = std::pow(static_cast<double>(by_rank[i] + 1) + o.productivity_offset, -o.productivity_exponent);
    std::uniform_int_distribution<int> start(o.first_year, o.last_year - 4);
    a.start = start(rng);
    std::uniform_int_distribution<int> span(4, 15);
    a.end = std::min(o.last_year, a.start + span(rng));
    auto words = topic_words[a.topic];
    std::shuffle(words.begin(), words.end(), rng);
    a.words.assign(words.begin(), words.begin() + static_cast<std::ptrdiff_t>(std::min(o.preferred_words, words.size())));
    auto venues = topic_venues[a.topic];
    std::shuffle(venues.begin(), venues.end(), rng);
    a.venues.assign(venues.begin(),
                    venues.begin() + static_cast<std::ptrdiff_t>(std::min(o.preferred_venues, venues.size())));
    members[a.topic].push_back(i);
  }

  // Names: ambiguous groups first, the rest unique.
  std::vector<std::size_t> unnamed(o.authors);
  for (std::size_t i = 0; i < o.authors; ++i) unnamed[i] = i;
  std::shuffle(unnamed.begin(), unnamed.end(), rng);
  std::vector<bool> named(o.authors, false);
  std::size_t cursor = 0;
  std::uniform_int_distribution<std::size_t> share(o.min_sharing, o.max_sharing);
  for (std::size_t g = 0; g < o.ambiguous_names; ++g) {
    while (cursor < unnamed.size() && named[unnamed[cursor]]) ++cursor;
    if (cursor >= unnamed.size()) break;
    const auto head = unnamed[cursor];
    const auto name = fresh_name();
    std::vector<std::size_t> group = {head};
    const auto want = share(rng);
    for (std::size_t k = 1; k < want; ++k) {
      const bool same = unit(rng) < o.same_topic_collision;
      std::vector<std::size_t> pool;
      for (std::size_t i = 0; i < o.authors; ++i) {
        if (named[i] || std::find(group.begin(), group.end(), i) != group.end()) continue;
        if ((out.authors[i].topic == out.authors[head].topic) == same) pool.push_back(i);
      }
      if (pool.empty()) break;
      group.push_back(detail::pick(pool, rng));
    }
    if (group.size() < 2) break;
    for (auto i : group) {
      out.authors[i].name = name;
      named[i] = true;
    }
    out.ambiguous.insert(name);
  }
  for (std::size_t i = 0; i < o.authors; ++i) {
    if (!named[i]) out.authors[i].name = fresh_name();
  }

  // Collaborator circles within the topic, avoiding the author's own name.
  std::uniform_int_distribution<std::size_t> circle_size(o.circle_min, o.circle_max);
  for (std::size_t i = 0; i < o.authors; ++i) {
    auto& a = out.authors[i];
    const auto& pool = members[a.topic];
    const auto want = std::min(circle_size(rng), pool.size() - 1);
    std::set<std::string> names = {a.name};
    for (std::size_t tries = 0; a.circle.size() < want && tries < 50 * want; ++tries) {
      auto c = detail::pick(pool, rng);
      if (names.insert(out.authors[c].name).second) a.circle.push_back(c);
    }
  }

  std::vector<double> weights;
  for (const auto& a : out.authors) weights.push_back(a.weight);
  std::discrete_distribution<std::size_t> lead_dist(weights.begin(), weights.end());
  std::discrete_distribution<std::size_t> coauthor_count(o.team_weights.begin(), o.team_weights.end());
  std::uniform_int_distribution<std::size_t> title_len(4, 7);
  for (std::size_t p = 0; p < o.papers; ++p) {
    const auto lead = lead_dist(rng);
    const auto& a = out.authors[lead];
    std::vector<std::size_t> team = {lead};
    std::set<std::string> names = {a.name};
    const auto want = coauthor_count(rng);
    for (std::size_t tries = 0; team.size() < want + 1 && tries < 20; ++tries) {
      std::size_t c;
      if (!a.circle.empty() && unit(rng) < o.circle_loyalty) {
        c = detail::pick(a.circle, rng);
      } else {
        c = detail::pick(members[a.topic], rng);
      }
      if (names.insert(out.authors[c].name).second) team.push_back(c);
    }
    std::shuffle(team.begin(), team.end(), rng);

    PaperRecord rec;
    rec.paper_id = "P" + std::to_string(p);
    std::uniform_int_distribution<int> year(a.start, a.end);
    rec.year = year(rng);
    rec.venue = unit(rng) < o.venue_loyalty ? detail::pick(a.venues, rng) : detail::pick(topic_venues[a.topic], rng);
    const auto n = title_len(rng);
    std::vector<std::string> words;
    for (std::size_t k = 0; k < n; ++k) {
      words.push_back(unit(rng) < 0.75 ? detail::pick(a.words, rng) : detail::pick(topic_words[a.topic], rng));
    }
    words.push_back(detail::pick(filler, rng));
    std::shuffle(words.begin(), words.end(), rng);
    for (std::size_t k = 0; k < words.size(); ++k) rec.title += (k ? " " : "") + words[k];
    rec.title[0] = static_cast<char>(std::toupper(rec.title[0]));
    for (auto m : team) {
      rec.authors.push_back(out.authors[m].name);
      out.all_items[{rec.paper_id, out.authors[m].name}] = out.authors[m].id;
      if (out.ambiguous.count(out.authors[m].name)) out.gold[{rec.paper_id, out.authors[m].name}] = out.authors[m].id;
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

}  // namespace authnet
