#pragma once

// Word vectors consumed by the research-interest feature.
//
// File format: one word per line followed by d whitespace-separated reals.
// A leading "<count> <dim>" line (word2vec text header) is skipped.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "authnet/common.hpp"

namespace authnet {

class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw DomainError("embedding dimension must be positive");
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }

  void add(const std::string& word, std::vector<double> vec) {
    if (dim_ == 0) {
      if (vec.empty()) throw DomainError("embedding dimension must be positive");
      dim_ = vec.size();
    }
    if (vec.size() != dim_) {
      throw DomainError("embedding for '" + word + "' has dimension " + std::to_string(vec.size()) +
                        ", expected " + std::to_string(dim_));
    }
    rows_[word] = std::move(vec);
  }

  // Null when the word is out of vocabulary.
  const std::vector<double>* find(const std::string& word) const {
    auto it = rows_.find(word);
    return it == rows_.end() ? nullptr : &it->second;
  }

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::vector<double>> rows_;
};

inline EmbeddingTable read_embeddings(std::istream& in) {
  EmbeddingTable table;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = detail::split_ws(line);
    if (toks.empty()) continue;
    if (first) {
      first = false;
      if (toks.size() == 2) {
        try {
          detail::parse_int<std::size_t>(toks[0], "count");
          detail::parse_int<std::size_t>(toks[1], "dim");
          continue;
        } catch (const FormatError&) {
        }
      }
    }
    if (toks.size() < 2) {
      throw FormatError("embedding line " + std::to_string(lineno) + " has no vector");
    }
    std::vector<double> vec;
    vec.reserve(toks.size() - 1);
    for (std::size_t i = 1; i < toks.size(); ++i) vec.push_back(detail::parse_double(toks[i], "embedding"));
    try {
      table.add(std::string(toks[0]), std::move(vec));
    } catch (const DomainError& e) {
      throw FormatError(std::string(e.what()) + " at line " + std::to_string(lineno));
    }
  }
  return table;
}

inline EmbeddingTable load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open embedding file: " + path);
  return read_embeddings(in);
}

namespace detail {

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace detail

// Deterministic unit vector for a word, drawn from a generator keyed by the
// word hash and `seed`.
inline std::vector<double> hashed_unit_vector(const std::string& word, std::size_t dim,
                                              std::uint64_t seed) {
  std::mt19937_64 rng(detail::fnv1a(word) ^ (seed * 0x9e3779b97f4a7c15ull));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(dim);
  double norm = 0.0;
  for (auto& x : v) {
    x = normal(rng);
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (auto& x : v) x /= norm;
  return v;
}

template <typename Words>
EmbeddingTable hashed_embeddings(const Words& words, std::size_t dim = 32, std::uint64_t seed = 42) {
  EmbeddingTable table(dim);
  for (const auto& w : words) table.add(std::string(w), hashed_unit_vector(std::string(w), dim, seed));
  return table;
}

inline void write_embeddings(std::ostream& out, const EmbeddingTable& table,
                             const std::vector<std::string>& words) {
  for (const auto& w : words) {
    const auto* v = table.find(w);
    if (!v) continue;
    out << w;
    for (double x : *v) out << ' ' << detail::format_double(x);
    out << '\n';
  }
}

}  // namespace authnet
