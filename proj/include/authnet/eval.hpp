#pragma once

// Pairwise micro metrics. For every name, each unordered pair of its labelled
// (paper, name) items is classified by whether the prediction co-locates it
// and whether the gold author agrees; counts are pooled over all names.
//
// Gold file format (tab-separated): paper_id name author_id

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "authnet/common.hpp"
#include "authnet/corpus.hpp"

namespace authnet {

using ItemKey = std::pair<std::string, std::string>;  // (paper_id, name)
using GoldLabels = std::map<ItemKey, std::string>;
using Partition = std::map<ItemKey, std::string>;

struct MicroMetrics {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  double micro_a = 1.0, micro_p = 1.0, micro_r = 1.0, micro_f = 1.0;

  std::size_t pairs() const { return tp + fp + fn + tn; }
};

inline MicroMetrics metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
  MicroMetrics m;
  m.tp = tp, m.fp = fp, m.fn = fn, m.tn = tn;
  const auto d = [](std::size_t x) { return static_cast<double>(x); };
  const auto total = tp + fp + fn + tn;
  m.micro_a = total == 0 ? 1.0 : d(tp + tn) / d(total);
  m.micro_p = tp + fp == 0 ? 1.0 : d(tp) / d(tp + fp);
  m.micro_r = tp + fn == 0 ? 1.0 : d(tp) / d(tp + fn);
  const double s = m.micro_p + m.micro_r;
  m.micro_f = s == 0.0 ? 0.0 : 2.0 * m.micro_p * m.micro_r / s;
  return m;
}

// Throws DomainError naming the first labelled item absent from `predicted`.
inline MicroMetrics micro_metrics(const Partition& predicted, const GoldLabels& gold) {
  std::map<std::string, std::vector<std::pair<const std::string*, const std::string*>>> by_name;
  for (const auto& [item, author] : gold) {
    auto it = predicted.find(item);
    if (it == predicted.end()) {
      throw DomainError("labelled item (" + item.first + ", " + item.second + ") has no prediction");
    }
    by_name[item.second].emplace_back(&it->second, &author);
  }
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (const auto& [name, items] : by_name) {
    // Same-cluster and same-author pair counts via group sizes.
    std::map<std::string_view, std::size_t> pred_size, gold_size;
    std::map<std::pair<std::string_view, std::string_view>, std::size_t> joint;
    for (const auto& [pred, author] : items) {
      ++pred_size[*pred];
      ++gold_size[*author];
      ++joint[{*pred, *author}];
    }
    auto c2 = [](std::size_t n) { return n * (n - 1) / 2; };
    std::size_t same_pred = 0, same_gold = 0, both = 0;
    for (const auto& [k, n] : pred_size) same_pred += c2(n);
    for (const auto& [k, n] : gold_size) same_gold += c2(n);
    for (const auto& [k, n] : joint) both += c2(n);
    tp += both;
    fp += same_pred - both;
    fn += same_gold - both;
    tn += c2(items.size()) - same_pred - same_gold + both;
  }
  return metrics_from_counts(tp, fp, fn, tn);
}

inline GoldLabels read_gold(std::istream& in) {
  GoldLabels out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto f = detail::split(line, '\t');
    if (f.size() != 3) throw FormatError("gold line " + std::to_string(lineno) + " needs 3 fields");
    ItemKey key{std::string(detail::trim(f[0])), std::string(detail::trim(f[1]))};
    if (!out.emplace(key, std::string(detail::trim(f[2]))).second) {
      throw FormatError("duplicate gold item at line " + std::to_string(lineno));
    }
  }
  return out;
}

inline GoldLabels load_gold(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open gold file: " + path);
  return read_gold(in);
}

inline void write_gold(std::ostream& out, const GoldLabels& gold) {
  for (const auto& [k, a] : gold) out << k.first << '\t' << k.second << '\t' << a << '\n';
}

// Every labelled item must exist in the corpus with its name among the authors.
inline void validate_gold(const GoldLabels& gold, const CorpusIndex& index) {
  for (const auto& [k, a] : gold) {
    if (!index.contains(k.first)) throw DomainError("gold paper '" + k.first + "' not in corpus");
    const auto& authors = index.paper(index.index_of(k.first)).authors;
    if (std::find(authors.begin(), authors.end(), k.second) == authors.end()) {
      throw DomainError("gold name '" + k.second + "' not an author of '" + k.first + "'");
    }
  }
}

struct TimingSummary {
  std::size_t names = 0;
  double total_seconds = 0.0;
  double mean_seconds = 0.0;
  double max_seconds = 0.0;
};

inline TimingSummary summarize_timing(const std::map<std::string, double>& seconds) {
  TimingSummary t;
  for (const auto& [n, s] : seconds) {
    ++t.names;
    t.total_seconds += s;
    t.max_seconds = std::max(t.max_seconds, s);
  }
  if (t.names) t.mean_seconds = t.total_seconds / static_cast<double>(t.names);
  return t;
}

}  // namespace authnet
