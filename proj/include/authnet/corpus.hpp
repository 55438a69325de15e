#pragma once

// Paper corpus: record parsing, validation, keyword extraction, and the
// global frequency tables (title keyword document frequency, venue counts).
//
// Corpus file format, one record per line, UTF-8:
//
//   <paper_id> TAB <year> TAB <venue> TAB <title> TAB <author>;<author>;...
//
// Blank lines and lines starting with '#' are ignored. Fields may not contain
// TAB; author names may not contain ';'.

#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "authnet/common.hpp"

namespace authnet {

using KeywordId = std::uint32_t;
using VenueId = std::uint32_t;

struct PaperRecord {
  std::string paper_id;
  std::string title;
  std::string venue;
  int year = 0;
  std::vector<std::string> authors;

  friend bool operator==(const PaperRecord&, const PaperRecord&) = default;
};

inline constexpr int kMinYear = 1900;
inline constexpr int kMaxYear = 2100;

using StopwordSet = std::unordered_set<std::string>;

inline const StopwordSet& default_stopwords() {
  static const StopwordSet words = {
      "a",       "about",   "above",  "after",   "again",   "against", "all",     "also",
      "am",      "among",   "an",     "and",     "any",     "are",     "as",      "at",
      "be",      "because", "been",   "before",  "being",   "below",   "between", "both",
      "but",     "by",      "can",    "could",   "did",     "do",      "does",    "doing",
      "down",    "during",  "each",   "few",     "for",     "from",    "further", "had",
      "has",     "have",    "having", "he",      "her",     "here",    "hers",    "him",
      "his",     "how",     "i",      "if",      "in",      "into",    "is",      "it",
      "its",     "itself",  "just",   "me",      "more",    "most",    "my",      "no",
      "nor",     "not",     "now",    "of",      "off",     "on",      "once",    "only",
      "or",      "other",   "our",    "ours",    "out",     "over",    "own",     "same",
      "she",     "should",  "so",     "some",    "such",    "than",    "that",    "the",
      "their",   "theirs",  "them",   "then",    "there",   "these",   "they",    "this",
      "those",   "through", "to",     "too",     "toward",  "towards", "under",   "until",
      "up",      "upon",    "using",  "very",    "via",     "was",     "we",      "were",
      "what",    "when",    "where",  "which",   "while",   "who",     "whom",    "why",
      "will",    "with",    "within", "without", "would",   "you",     "your",    "yours",
  };
  return words;
}

inline StopwordSet read_stopwords(std::istream& in) {
  StopwordSet out;
  std::string line;
  while (std::getline(in, line)) {
    auto tok = detail::trim(line);
    if (tok.empty() || tok.front() == '#') continue;
    out.insert(detail::to_lower(tok));
  }
  return out;
}

inline StopwordSet load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open stopword file: " + path);
  return read_stopwords(in);
}

// Lowercase alphanumeric runs of at least `min_length` characters, in title order.
inline std::vector<std::string> tokenize_title(std::string_view title, std::size_t min_length = 2) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (cur.size() >= min_length) out.push_back(cur);
    cur.clear();
  };
  for (char ch : title) {
    auto c = static_cast<unsigned char>(ch);
    // Bytes >= 0x80 belong to multi-byte UTF-8 sequences; keep them inside tokens.
    if (std::isalnum(c) || c >= 0x80) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

// Case-folded venue with internal whitespace collapsed to single spaces.
inline std::string normalize_venue(std::string_view venue) {
  std::string out;
  for (auto tok : detail::split_ws(venue)) {
    if (!out.empty()) out.push_back(' ');
    out += detail::to_lower(tok);
  }
  return out;
}

struct KeywordOptions {
  // A token whose document frequency exceeds freq_cutoff * N is "frequent".
  double freq_cutoff = 0.05;
  // Tokens appearing in at most this many titles are never treated as frequent.
  std::size_t min_frequent_df = 5;
  std::size_t min_token_length = 2;
};

// Keyword multiset of a title: tokens minus stopwords minus corpus-frequent
// tokens. `doc_freq` maps a token to the number of titles containing it and
// `total_papers` is N. Result is sorted so it does not depend on word order.
inline std::vector<std::string> extract_keywords(
    std::string_view title, const StopwordSet& stopwords,
    const std::unordered_map<std::string, std::size_t>& doc_freq, std::size_t total_papers,
    const KeywordOptions& opts = {}) {
  if (!(opts.freq_cutoff > 0.0 && opts.freq_cutoff <= 1.0)) {
    throw DomainError("freq_cutoff must be in (0, 1]");
  }
  const double limit = opts.freq_cutoff * static_cast<double>(total_papers);
  std::vector<std::string> out;
  for (auto& tok : tokenize_title(title, opts.min_token_length)) {
    if (stopwords.count(tok)) continue;
    auto it = doc_freq.find(tok);
    std::size_t df = it == doc_freq.end() ? 0 : it->second;
    if (df > opts.min_frequent_df && static_cast<double>(df) > limit) continue;
    out.push_back(std::move(tok));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Number of titles containing each token (each title counted once per token).
inline std::unordered_map<std::string, std::size_t> title_document_frequency(
    const std::vector<PaperRecord>& papers, std::size_t min_token_length = 2) {
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& p : papers) {
    auto toks = tokenize_title(p.title, min_token_length);
    std::sort(toks.begin(), toks.end());
    toks.erase(std::unique(toks.begin(), toks.end()), toks.end());
    for (auto& t : toks) ++df[t];
  }
  return df;
}

// Validates a record in place (trims names). Returns an error message, or an
// empty string when the record is acceptable.
inline std::string validate_record(PaperRecord& rec) {
  rec.paper_id = std::string(detail::trim(rec.paper_id));
  if (rec.paper_id.empty()) return "empty paper_id";
  if (rec.year < kMinYear || rec.year > kMaxYear) {
    return "year " + std::to_string(rec.year) + " outside [1900, 2100]";
  }
  if (rec.authors.empty()) return "empty author list";
  std::unordered_set<std::string> seen;
  for (auto& a : rec.authors) {
    a = std::string(detail::trim(a));
    if (a.empty()) return "empty author name";
    if (!seen.insert(a).second) return "duplicate author name '" + a + "'";
  }
  return {};
}

class CorpusIndex {
 public:
  CorpusIndex() : stopwords_(default_stopwords()) {}

  // Builds the index from validated records. Throws DuplicatePaperError naming the
  // paper_id on a duplicate, DomainError on an invalid record.
  static CorpusIndex build(std::vector<PaperRecord> records,
                           StopwordSet stopwords = default_stopwords(),
                           KeywordOptions opts = {}) {
    CorpusIndex idx;
    idx.stopwords_ = std::move(stopwords);
    idx.opts_ = opts;
    for (auto& r : records) {
      if (auto err = validate_record(r); !err.empty()) {
        throw DomainError("paper '" + r.paper_id + "': " + err);
      }
    }
    idx.raw_df_ = title_document_frequency(records, opts.min_token_length);
    idx.frozen_n_ = records.size();
    for (auto& r : records) idx.insert(std::move(r));
    return idx;
  }

  // Adds one paper after construction (incremental arrivals). The frequent-word
  // decision stays frozen at its build-time state; FB, FH, N, and the name
  // index are updated.
  PaperIdx append(PaperRecord rec) {
    if (auto err = validate_record(rec); !err.empty()) {
      throw DomainError("paper '" + rec.paper_id + "': " + err);
    }
    return insert(std::move(rec));
  }

  std::size_t size() const { return papers_.size(); }
  bool empty() const { return papers_.empty(); }

  const PaperRecord& paper(PaperIdx i) const { return papers_.at(i); }
  const std::vector<PaperRecord>& papers() const { return papers_; }

  bool contains(std::string_view paper_id) const {
    return id_to_idx_.count(std::string(paper_id)) != 0;
  }
  PaperIdx index_of(std::string_view paper_id) const {
    auto it = id_to_idx_.find(std::string(paper_id));
    if (it == id_to_idx_.end()) throw DomainError("unknown paper_id '" + std::string(paper_id) + "'");
    return it->second;
  }

  // Papers listing `name` among their authors, ascending by index.
  const std::vector<PaperIdx>& papers_of(std::string_view name) const {
    static const std::vector<PaperIdx> none;
    auto it = name_to_papers_.find(std::string(name));
    return it == name_to_papers_.end() ? none : it->second;
  }
  const std::map<std::string, std::vector<PaperIdx>>& name_index() const { return name_to_papers_; }

  // Retained keywords of a paper title (sorted, duplicates kept).
  const std::vector<KeywordId>& keywords(PaperIdx i) const { return keywords_.at(i); }
  VenueId venue(PaperIdx i) const { return venue_of_.at(i); }
  int year(PaperIdx i) const { return papers_.at(i).year; }

  const std::string& keyword_text(KeywordId k) const { return keyword_vocab_.at(k); }
  std::size_t keyword_count() const { return keyword_vocab_.size(); }
  const std::string& venue_text(VenueId h) const { return venue_vocab_.at(h); }
  std::size_t venue_count() const { return venue_vocab_.size(); }

  // FB(b): number of titles containing retained keyword b.
  std::size_t keyword_frequency(KeywordId k) const { return fb_.at(k); }
  std::size_t keyword_frequency(std::string_view word) const {
    auto it = keyword_ids_.find(std::string(word));
    return it == keyword_ids_.end() ? 0 : fb_[it->second];
  }
  // FH(h): number of papers published in venue h.
  std::size_t venue_frequency(VenueId h) const { return fh_.at(h); }
  std::size_t venue_frequency(std::string_view venue) const {
    auto it = venue_ids_.find(normalize_venue(venue));
    return it == venue_ids_.end() ? 0 : fh_[it->second];
  }

  // Word -> FB and venue key -> FH, for reporting and tests.
  std::map<std::string, std::size_t> word_frequency_table() const {
    std::map<std::string, std::size_t> out;
    for (KeywordId k = 0; k < keyword_vocab_.size(); ++k) {
      if (fb_[k] > 0) out[keyword_vocab_[k]] = fb_[k];
    }
    return out;
  }
  std::map<std::string, std::size_t> venue_frequency_table() const {
    std::map<std::string, std::size_t> out;
    for (VenueId h = 0; h < venue_vocab_.size(); ++h) out[venue_vocab_[h]] = fh_[h];
    return out;
  }

  const StopwordSet& stopwords() const { return stopwords_; }
  const KeywordOptions& keyword_options() const { return opts_; }

  // Keyword extraction against the build-time document frequencies.
  std::vector<std::string> extract(std::string_view title) const {
    return extract_keywords(title, stopwords_, raw_df_, frozen_n_, opts_);
  }

 private:
  PaperIdx insert(PaperRecord rec) {
    if (id_to_idx_.count(rec.paper_id)) {
      throw DuplicatePaperError("duplicate paper_id '" + rec.paper_id + "'");
    }
    const auto idx = static_cast<PaperIdx>(papers_.size());
    id_to_idx_.emplace(rec.paper_id, idx);
    for (const auto& a : rec.authors) name_to_papers_[a].push_back(idx);

    std::vector<KeywordId> kws;
    std::vector<KeywordId> distinct;
    for (auto& w : extract(rec.title)) kws.push_back(intern_keyword(w));
    std::sort(kws.begin(), kws.end());
    std::unique_copy(kws.begin(), kws.end(), std::back_inserter(distinct));
    for (auto k : distinct) ++fb_[k];
    keywords_.push_back(std::move(kws));

    auto vkey = normalize_venue(rec.venue);
    auto [it, inserted] = venue_ids_.emplace(vkey, static_cast<VenueId>(venue_vocab_.size()));
    if (inserted) {
      venue_vocab_.push_back(vkey);
      fh_.push_back(0);
    }
    ++fh_[it->second];
    venue_of_.push_back(it->second);

    papers_.push_back(std::move(rec));
    return idx;
  }

  KeywordId intern_keyword(const std::string& w) {
    auto [it, inserted] = keyword_ids_.emplace(w, static_cast<KeywordId>(keyword_vocab_.size()));
    if (inserted) {
      keyword_vocab_.push_back(w);
      fb_.push_back(0);
    }
    return it->second;
  }

  StopwordSet stopwords_;
  KeywordOptions opts_;
  std::unordered_map<std::string, std::size_t> raw_df_;
  std::size_t frozen_n_ = 0;

  std::vector<PaperRecord> papers_;
  std::unordered_map<std::string, PaperIdx> id_to_idx_;
  std::map<std::string, std::vector<PaperIdx>> name_to_papers_;

  std::vector<std::vector<KeywordId>> keywords_;
  std::vector<std::string> keyword_vocab_;
  std::unordered_map<std::string, KeywordId> keyword_ids_;
  std::vector<std::size_t> fb_;

  std::vector<VenueId> venue_of_;
  std::vector<std::string> venue_vocab_;
  std::unordered_map<std::string, VenueId> venue_ids_;
  std::vector<std::size_t> fh_;
};

// ---------------------------------------------------------------------------
// Record I/O

struct RecordError {
  std::size_t line = 0;
  std::string message;
};

struct ParseResult {
  CorpusIndex index;
  std::vector<RecordError> errors;
};

// Parses a single record line. Throws FormatError describing the problem.
inline PaperRecord parse_record_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  auto fields = detail::split(line, '\t');
  if (fields.size() != 5) {
    throw FormatError("expected 5 tab-separated fields, got " + std::to_string(fields.size()));
  }
  PaperRecord rec;
  rec.paper_id = std::string(detail::trim(fields[0]));
  rec.year = detail::parse_int<int>(fields[1], "year");
  rec.venue = std::string(detail::trim(fields[2]));
  rec.title = std::string(detail::trim(fields[3]));
  auto authors = detail::trim(fields[4]);
  if (!authors.empty()) {
    for (auto a : detail::split(authors, ';')) rec.authors.emplace_back(detail::trim(a));
  }
  if (auto err = validate_record(rec); !err.empty()) throw FormatError(err);
  return rec;
}

inline std::string format_record_line(const PaperRecord& rec) {
  std::string out = rec.paper_id + '\t' + std::to_string(rec.year) + '\t' + rec.venue + '\t' +
                    rec.title + '\t';
  for (std::size_t i = 0; i < rec.authors.size(); ++i) {
    if (i) out.push_back(';');
    out += rec.authors[i];
  }
  return out;
}

// Reads a record stream. Malformed lines land in the error report with their
// 1-based line number; a repeated paper_id is a hard DuplicatePaperError.
inline ParseResult parse_corpus(std::istream& in, StopwordSet stopwords = default_stopwords(),
                                KeywordOptions opts = {}) {
  std::vector<PaperRecord> records;
  std::vector<RecordError> errors;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    try {
      auto rec = parse_record_line(line);
      if (!ids.insert(rec.paper_id).second) {
        throw DuplicatePaperError("duplicate paper_id '" + rec.paper_id + "' at line " +
                                  std::to_string(lineno));
      }
      records.push_back(std::move(rec));
    } catch (const DuplicatePaperError&) {
      throw;
    } catch (const std::exception& e) {
      errors.push_back({lineno, e.what()});
    }
  }
  return {CorpusIndex::build(std::move(records), std::move(stopwords), opts), std::move(errors)};
}

inline ParseResult load_corpus(const std::string& path, StopwordSet stopwords = default_stopwords(),
                               KeywordOptions opts = {}) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open corpus file: " + path);
  return parse_corpus(in, std::move(stopwords), opts);
}

inline void write_corpus(std::ostream& out, const CorpusIndex& index) {
  for (const auto& p : index.papers()) out << format_record_line(p) << '\n';
}

}  // namespace authnet
