#pragma once

// Run configuration and full-pipeline orchestration:
// ingest -> mine -> stable network -> sample -> fit -> merge -> recover -> evaluate.
//
// Config file: one `key = value` per line, '#' starts a comment.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "authnet/common.hpp"
#include "authnet/corpus.hpp"
#include "authnet/embedding.hpp"
#include "authnet/eval.hpp"
#include "authnet/gcn.hpp"
#include "authnet/model.hpp"
#include "authnet/network.hpp"
#include "authnet/scn.hpp"
#include "authnet/similarity.hpp"
#include "authnet/training.hpp"

namespace authnet {

struct RunConfig {
  std::size_t eta = 3;
  double delta = 0.0;
  double alpha = 0.62;
  int wl_iterations = 2;
  bool positive_time_exponent = false;
  double sample_rate = 0.1;
  std::size_t min_split = 5;
  std::uint64_t seed = 42;
  FamilyAssignment families = default_families();
  std::size_t bins = 10;
  double mean_floor_fraction = kMeanFloorFraction;
  double freq_cutoff = 0.05;
  std::size_t min_frequent_df = 5;
  double tol = 1e-6;
  int max_iter = 200;
  std::size_t embedding_dim = 32;
  unsigned workers = 1;

  std::string corpus;
  std::string stopwords;
  std::string embeddings;
  std::string gold;
  std::string out_dir = "authnet_out";

  // Throws DomainError naming the first out-of-range value.
  void validate() const {
    if (eta < 2) throw DomainError("eta must be at least 2");
    if (!std::isfinite(delta)) throw DomainError("delta must be finite");
    if (!(alpha > 0) || !std::isfinite(alpha)) throw DomainError("alpha must be positive");
    if (wl_iterations < 1) throw DomainError("wl_iterations must be at least 1");
    if (!(sample_rate > 0 && sample_rate <= 1)) throw DomainError("sample_rate must lie in (0, 1]");
    if (min_split < 2) throw DomainError("min_split must be at least 2");
    if (bins < 1) throw DomainError("bins must be at least 1");
    if (!(mean_floor_fraction >= 0) || !std::isfinite(mean_floor_fraction)) {
      throw DomainError("mean_floor_fraction must be non-negative");
    }
    if (!(freq_cutoff > 0 && freq_cutoff <= 1)) throw DomainError("freq_cutoff must lie in (0, 1]");
    if (!(tol > 0)) throw DomainError("tol must be positive");
    if (max_iter < 1) throw DomainError("max_iter must be at least 1");
    if (embedding_dim < 1) throw DomainError("embedding_dim must be positive");
    if (workers < 1) throw DomainError("workers must be at least 1");
  }

  KeywordOptions keyword_options() const {
    KeywordOptions k;
    k.freq_cutoff = freq_cutoff;
    k.min_frequent_df = min_frequent_df;
    return k;
  }
  SimilarityOptions similarity_options() const { return {alpha, wl_iterations, positive_time_exponent}; }
  SamplingOptions sampling_options() const { return {sample_rate, min_split, seed}; }
  FitOptions fit_options() const {
    FitOptions f;
    f.families = families;
    f.tol = tol;
    f.max_iter = max_iter;
    f.bins = bins;
    f.mean_floor_fraction = mean_floor_fraction;
    f.workers = workers;
    return f;
  }
};

namespace detail {

inline std::string families_to_string(const FamilyAssignment& f) {
  std::string out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) out.push_back(',');
    out += family_name(f[i]);
  }
  return out;
}

inline FamilyAssignment families_from_string(std::string_view s) {
  auto parts = split(s, ',');
  if (parts.size() != kFeatureCount) throw FormatError("families needs 6 comma-separated entries");
  FamilyAssignment f;
  for (std::size_t i = 0; i < kFeatureCount; ++i) f[i] = parse_family(parts[i]);
  return f;
}

inline bool parse_bool(std::string_view s, const char* what) {
  auto t = to_lower(trim(s));
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw FormatError(std::string("invalid boolean for ") + what + ": '" + std::string(s) + "'");
}

}  // namespace detail

// Ordered (key, value) pairs covering every configurable field.
inline std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& c) {
  using detail::format_double;
  return {
      {"eta", std::to_string(c.eta)},
      {"delta", format_double(c.delta)},
      {"alpha", format_double(c.alpha)},
      {"wl_iterations", std::to_string(c.wl_iterations)},
      {"positive_time_exponent", c.positive_time_exponent ? "true" : "false"},
      {"sample_rate", format_double(c.sample_rate)},
      {"min_split", std::to_string(c.min_split)},
      {"seed", std::to_string(c.seed)},
      {"families", detail::families_to_string(c.families)},
      {"bins", std::to_string(c.bins)},
      {"mean_floor_fraction", format_double(c.mean_floor_fraction)},
      {"freq_cutoff", format_double(c.freq_cutoff)},
      {"min_frequent_df", std::to_string(c.min_frequent_df)},
      {"tol", format_double(c.tol)},
      {"max_iter", std::to_string(c.max_iter)},
      {"embedding_dim", std::to_string(c.embedding_dim)},
      {"workers", std::to_string(c.workers)},
      {"corpus", c.corpus},
      {"stopwords", c.stopwords},
      {"embeddings", c.embeddings},
      {"gold", c.gold},
      {"out_dir", c.out_dir},
  };
}

inline void set_config_value(RunConfig& c, const std::string& key, std::string_view value) {
  using detail::parse_double;
  using detail::parse_int;
  const auto v = detail::trim(value);
  if (key == "eta") c.eta = parse_int<std::size_t>(v, "eta");
  else if (key == "delta") c.delta = parse_double(v, "delta");
  else if (key == "alpha") c.alpha = parse_double(v, "alpha");
  else if (key == "wl_iterations") c.wl_iterations = parse_int<int>(v, "wl_iterations");
  else if (key == "positive_time_exponent") c.positive_time_exponent = detail::parse_bool(v, "positive_time_exponent");
  else if (key == "sample_rate") c.sample_rate = parse_double(v, "sample_rate");
  else if (key == "min_split") c.min_split = parse_int<std::size_t>(v, "min_split");
  else if (key == "seed") c.seed = parse_int<std::uint64_t>(v, "seed");
  else if (key == "families") c.families = detail::families_from_string(v);
  else if (key == "bins") c.bins = parse_int<std::size_t>(v, "bins");
  else if (key == "mean_floor_fraction") c.mean_floor_fraction = parse_double(v, "mean_floor_fraction");
  else if (key == "freq_cutoff") c.freq_cutoff = parse_double(v, "freq_cutoff");
  else if (key == "min_frequent_df") c.min_frequent_df = parse_int<std::size_t>(v, "min_frequent_df");
  else if (key == "tol") c.tol = parse_double(v, "tol");
  else if (key == "max_iter") c.max_iter = parse_int<int>(v, "max_iter");
  else if (key == "embedding_dim") c.embedding_dim = parse_int<std::size_t>(v, "embedding_dim");
  else if (key == "workers") c.workers = parse_int<unsigned>(v, "workers");
  else if (key == "corpus") c.corpus = std::string(v);
  else if (key == "stopwords") c.stopwords = std::string(v);
  else if (key == "embeddings") c.embeddings = std::string(v);
  else if (key == "gold") c.gold = std::string(v);
  else if (key == "out_dir") c.out_dir = std::string(v);
  else throw FormatError("unknown config key '" + key + "'");
}

inline void write_config(std::ostream& out, const RunConfig& c) {
  for (const auto& [k, v] : config_entries(c)) out << k << " = " << v << '\n';
}

inline std::string config_to_string(const RunConfig& c) {
  std::ostringstream os;
  write_config(os, c);
  return os.str();
}

// Applies `key = value` lines on top of `base`.
inline RunConfig read_config(std::istream& in, RunConfig base = {}) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    auto body = detail::trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError("config line " + std::to_string(lineno) + " is not key = value");
    }
    try {
      set_config_value(base, std::string(detail::trim(body.substr(0, eq))), body.substr(eq + 1));
    } catch (const FormatError& e) {
      throw FormatError(std::string(e.what()) + " at config line " + std::to_string(lineno));
    }
  }
  return base;
}

inline RunConfig load_config(const std::string& path, RunConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config file: " + path);
  return read_config(in, std::move(base));
}

// FNV-1a of the canonical config text, hex.
inline std::string config_hash(const RunConfig& c) {
  auto h = detail::fnv1a(config_to_string(c));
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Shared stage helpers

inline StopwordSet stopwords_for(const RunConfig& c) {
  return c.stopwords.empty() ? default_stopwords() : load_stopwords(c.stopwords);
}

// The configured embedding file, or hashed unit vectors over the corpus vocabulary.
inline EmbeddingTable embeddings_for(const RunConfig& c, const CorpusIndex& index) {
  if (!c.embeddings.empty()) return load_embeddings(c.embeddings);
  std::vector<std::string> words;
  for (KeywordId k = 0; k < index.keyword_count(); ++k) words.push_back(index.keyword_text(k));
  return hashed_embeddings(words, c.embedding_dim, c.seed);
}

// A failed stage: its name and the process exit code it maps to.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, int code, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)), code_(code) {}
  const std::string& stage() const { return stage_; }
  int code() const { return code_; }

 private:
  std::string stage_;
  int code_;
};

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kIngest = 2;
inline constexpr int kBuildScn = 3;
inline constexpr int kFit = 4;
inline constexpr int kMerge = 5;
inline constexpr int kResolve = 6;
inline constexpr int kEvaluate = 7;
}  // namespace exit_code

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct RunReport {
  std::string config_hash;
  std::vector<StageTiming> timings;
  std::size_t papers = 0;
  std::size_t record_errors = 0;
  std::size_t scrs = 0;
  std::size_t scn_vertices = 0;
  std::size_t scn_edges = 0;
  std::size_t training_vectors = 0;
  int em_iterations = 0;
  std::size_t merges = 0;
  std::size_t skipped_pairs = 0;
  std::size_t gcn_vertices = 0;
  std::size_t gcn_edges = 0;
  std::size_t recovered_edges = 0;
  std::optional<MicroMetrics> scn_metrics;
  std::optional<MicroMetrics> gcn_metrics;
  std::map<std::string, std::string> artifacts;
  std::string failed_stage;
};

struct RunState {
  CorpusIndex index;
  CollabNetwork scn;
  CollabNetwork gcn;
  ModelParams params;
  EmbeddingTable embeddings;
  MergeReport merge;
  bool merged = false;
};

// Runs every stage in memory. `report` and `state` are filled as stages
// complete so a StageError leaves earlier results intact.
inline void run_pipeline(const RunConfig& c, const ParseResult* preloaded, RunReport& report, RunState& st,
                         const GoldLabels* gold = nullptr) {
  c.validate();
  report.config_hash = config_hash(c);
  auto timed = [&](const std::string& stage, int code, auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn();
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(stage, code, e.what());
    }
    report.timings.push_back({stage, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()});
  };

  timed("ingest", exit_code::kIngest, [&] {
    if (preloaded) {
      st.index = preloaded->index;
      report.record_errors = preloaded->errors.size();
    } else {
      auto parsed = load_corpus(c.corpus, stopwords_for(c), c.keyword_options());
      report.record_errors = parsed.errors.size();
      st.index = std::move(parsed.index);
    }
    report.papers = st.index.size();
    st.embeddings = embeddings_for(c, st.index);
  });
  timed("build-scn", exit_code::kBuildScn, [&] {
    auto scrs = mine_scrs(st.index, c.eta);
    report.scrs = scrs.size();
    st.scn = build_scn(scrs, st.index);
    report.scn_vertices = st.scn.vertex_count();
    report.scn_edges = st.scn.edge_count();
  });
  const SimilarityContext ctx(st.scn, st.index, &st.embeddings, c.similarity_options());
  timed("fit", exit_code::kFit, [&] {
    auto ts = sample_training_pairs(st.scn, ctx, c.sampling_options());
    report.training_vectors = ts.vectors.size();
    auto fit = em_fit(ts.vectors, c.fit_options());
    report.em_iterations = fit.trace.iterations;
    st.params = fit.params;
  });
  timed("merge", exit_code::kMerge, [&] {
    st.gcn = st.scn;
    MergeOptions mo;
    mo.workers = c.workers;
    st.merge = merge_pass(st.gcn, st.params, ctx.with_network(st.gcn), c.delta, mo);
    report.merges = st.merge.events.size();
    report.skipped_pairs = st.merge.skipped_pairs;
    auto rr = recover_relations(st.gcn, st.index, st.params, ctx.with_network(st.gcn), c.delta);
    report.recovered_edges = rr.edges_added;
    report.gcn_vertices = st.gcn.vertex_count();
    report.gcn_edges = st.gcn.edge_count();
    st.merged = true;
  });
  if (gold) {
    timed("evaluate", exit_code::kEvaluate, [&] {
      report.scn_metrics = micro_metrics(network_partition(st.scn, st.index), *gold);
      report.gcn_metrics = micro_metrics(network_partition(st.gcn, st.index), *gold);
    });
  }
}

inline nlohmann::ordered_json metrics_json(const MicroMetrics& m) {
  return {{"micro_a", m.micro_a}, {"micro_p", m.micro_p}, {"micro_r", m.micro_r}, {"micro_f", m.micro_f},
          {"tp", m.tp},           {"fp", m.fp},           {"fn", m.fn},           {"tn", m.tn}};
}

inline nlohmann::ordered_json manifest_json(const RunConfig& c, const RunReport& r) {
  nlohmann::ordered_json j;
  j["config_hash"] = r.config_hash;
  auto& cfg = j["config"];
  cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config_entries(c)) cfg[k] = v;
  auto& t = j["stage_seconds"];
  t = nlohmann::ordered_json::object();
  for (const auto& s : r.timings) t[s.stage] = s.seconds;
  j["counts"] = {{"papers", r.papers},
                 {"record_errors", r.record_errors},
                 {"scrs", r.scrs},
                 {"scn_vertices", r.scn_vertices},
                 {"scn_edges", r.scn_edges},
                 {"training_vectors", r.training_vectors},
                 {"em_iterations", r.em_iterations},
                 {"merges", r.merges},
                 {"skipped_pairs", r.skipped_pairs},
                 {"gcn_vertices", r.gcn_vertices},
                 {"gcn_edges", r.gcn_edges},
                 {"recovered_edges", r.recovered_edges}};
  if (r.scn_metrics) j["scn_metrics"] = metrics_json(*r.scn_metrics);
  if (r.gcn_metrics) j["gcn_metrics"] = metrics_json(*r.gcn_metrics);
  j["artifacts"] = r.artifacts;
  if (!r.failed_stage.empty()) j["failed_stage"] = r.failed_stage;
  return j;
}

// Full run from config paths. Artifacts land in c.out_dir: scn.tsv, model.txt,
// gcn.tsv, merge_log.tsv, gcn.tsv.timing.tsv, manifest.json. On a StageError
// the artifacts of completed stages and the manifest are still written.
inline RunReport run_full(const RunConfig& c) {
  namespace fs = std::filesystem;
  c.validate();
  RunReport report;
  RunState st;
  fs::create_directories(c.out_dir);
  const auto path = [&](const char* f) { return (fs::path(c.out_dir) / f).string(); };
  auto save_done = [&] {
    if (report.scn_vertices || st.scn.vertex_count()) {
      save_network(path("scn.tsv"), st.scn, st.index, c.corpus);
      report.artifacts["scn"] = path("scn.tsv");
    }
    if (report.training_vectors) {
      save_model(path("model.txt"), st.params);
      report.artifacts["model"] = path("model.txt");
    }
    if (st.merged) {
      save_network(path("gcn.tsv"), st.gcn, st.index, c.corpus);
      save_merge_log(path("merge_log.tsv"), st.merge.events);
      std::ofstream timing(path("gcn.tsv") + ".timing.tsv");
      write_timing(timing, st.merge.seconds_per_name);
      report.artifacts["gcn"] = path("gcn.tsv");
      report.artifacts["merge_log"] = path("merge_log.tsv");
      report.artifacts["timing"] = path("gcn.tsv") + ".timing.tsv";
    }
    report.artifacts["manifest"] = path("manifest.json");
    std::ofstream out(path("manifest.json"));
    out << manifest_json(c, report).dump(2) << '\n';
  };
  try {
    std::optional<GoldLabels> gold;
    if (!c.gold.empty()) {
      try {
        gold = load_gold(c.gold);
      } catch (const std::exception& e) {
        throw StageError("evaluate", exit_code::kEvaluate, e.what());
      }
    }
    run_pipeline(c, nullptr, report, st, gold ? &*gold : nullptr);
  } catch (const StageError& e) {
    report.failed_stage = e.stage();
    save_done();
    throw;
  }
  save_done();
  return report;
}

}  // namespace authnet
