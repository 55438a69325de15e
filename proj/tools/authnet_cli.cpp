// Command-line front end. Every subcommand reads an optional key = value
// config file; flags given on the command line override it.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "authnet/authnet.hpp"

namespace fs = std::filesystem;
using namespace authnet;
using json = nlohmann::ordered_json;

namespace {

struct Knob {
  const char* key;
  const char* help;
  const char* source;  // where the default comes from
};

// Knobs exposed as flags, by config key. "published" marks defaults taken
// from the literature; everything else is a chosen default.
const std::vector<Knob> kKnobs = {
    {"eta", "minimum co-occurrence count for a stable pair", "chosen"},
    {"delta", "merge threshold on the log posterior odds", "chosen"},
    {"alpha", "decay rate of the keyword time-gap weight", "published"},
    {"wl_iterations", "Weisfeiler-Lehman refinement iterations", "chosen"},
    {"positive_time_exponent", "use exp(+alpha*gap) instead of exp(-alpha*gap)", "chosen"},
    {"sample_rate", "fraction of same-name pairs sampled for training", "published"},
    {"min_split", "minimum half size when splitting a vertex into a synthetic pair", "chosen"},
    {"seed", "random seed", "chosen"},
    {"families", "comma-separated density family per feature", "chosen"},
    {"bins", "bins per multinomial feature", "chosen"},
    {"mean_floor_fraction", "exponential mean floor as a fraction of the pooled mean", "chosen"},
    {"freq_cutoff", "document-frequency fraction above which a word is dropped", "chosen"},
    {"min_frequent_df", "document frequency a dropped word must also exceed", "chosen"},
    {"tol", "relative EM convergence tolerance", "chosen"},
    {"max_iter", "EM iteration cap", "chosen"},
    {"embedding_dim", "dimension of hashed word vectors when no embedding file is given", "chosen"},
    {"workers", "worker threads", "chosen"},
    {"stopwords", "stopword file (one word per line)", "built-in list"},
    {"embeddings", "word vector file (word v1 v2 ...)", "hashed vectors"},
};

// Parsed flags for one subcommand, applied over the config file afterwards.
struct Binding {
  std::string config_file;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  void knob(CLI::App* app, const std::string& key, const std::string& help, const std::string& source) {
    const auto defaults = config_entries(RunConfig{});
    std::string def;
    for (const auto& [k, v] : defaults) {
      if (k == key) def = v;
    }
    auto dashed = key;
    std::replace(dashed.begin(), dashed.end(), '_', '-');
    std::string names = "--" + dashed;
    if (dashed != key) names += ",--" + key;
    std::string desc = help + " [default: " + (def.empty() ? "none" : def) + "; " + source + "]";
    options[key] = app->add_option(names, values[key], desc);
  }

  void all_knobs(CLI::App* app) {
    app->add_option("--config", config_file, "key = value config file; flags override it");
    for (const auto& k : kKnobs) knob(app, k.key, k.help, k.source);
  }

  RunConfig config() const {
    RunConfig c = config_file.empty() ? RunConfig{} : load_config(config_file);
    for (const auto& [key, opt] : options) {
      if (opt->count()) set_config_value(c, key, values.at(key));
    }
    c.validate();
    return c;
  }
};

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ParseResult ingest_corpus(const RunConfig& c) {
  if (c.corpus.empty()) throw Usage("no corpus given (--corpus or corpus = in the config)");
  return load_corpus(c.corpus, stopwords_for(c), c.keyword_options());
}

// A network dump and the corpus it refers to. `corpus_override` wins over the
// path recorded in the dump.
struct LoadedNetwork {
  std::string corpus_path;
  CorpusIndex index;
  CollabNetwork network;
};

LoadedNetwork load_with_corpus(const std::string& path, RunConfig c) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open network file: " + path);
  if (c.corpus.empty()) c.corpus = read_network_corpus_path(in);
  if (c.corpus.empty()) throw FormatError("network file records no corpus path; pass --corpus");
  LoadedNetwork out{c.corpus, ingest_corpus(c).index, {}};
  out.network = load_network(path, out.index);
  return out;
}

std::string absolute(const std::string& p) { return p.empty() ? p : fs::absolute(p).string(); }

void print_json(const json& j) { std::cout << j.dump() << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Author name disambiguation over collaboration networks"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  std::string corpus, scn, gcn, model, out, gold, paper_line, name, out_dir;
  bool timing = false;
  std::size_t gen_papers = 2400;
  std::uint64_t gen_seed = 7;

  Binding b_ingest, b_scn, b_fit, b_merge, b_resolve, b_eval, b_run;

  auto* ingest = app.add_subcommand("ingest", "parse a corpus and report its statistics");
  b_ingest.all_knobs(ingest);
  ingest->add_option("--corpus", corpus, "corpus file (id, year, venue, title, authors)");
  ingest->add_option("--out", out, "write the accepted records here");

  auto* build = app.add_subcommand("build-scn", "mine stable pairs and build the stable network");
  b_scn.all_knobs(build);
  build->add_option("--corpus", corpus, "corpus file");
  build->add_option("--out", out, "network dump to write")->required();

  auto* fit = app.add_subcommand("fit", "sample training pairs from a network and fit the mixture model");
  b_fit.all_knobs(fit);
  fit->add_option("--scn", scn, "stable network dump")->required();
  fit->add_option("--corpus", corpus, "corpus file (defaults to the one recorded in the dump)");
  fit->add_option("--out", out, "model file to write")->required();

  auto* merge = app.add_subcommand("merge", "merge same-name vertices and recover every co-author edge");
  b_merge.all_knobs(merge);
  merge->add_option("--scn", scn, "stable network dump")->required();
  merge->add_option("--model", model, "fitted model file")->required();
  merge->add_option("--corpus", corpus, "corpus file (defaults to the one recorded in the dump)");
  merge->add_option("--out", out, "merged network dump; <out>.merge_log.tsv and <out>.timing.tsv are written too")
      ->required();

  auto* resolve = app.add_subcommand("resolve", "attribute one new paper's name against a merged network");
  b_resolve.all_knobs(resolve);
  resolve->add_option("--gcn", gcn, "merged network dump")->required();
  resolve->add_option("--model", model, "fitted model file")->required();
  resolve->add_option("--paper", paper_line, "record line: id<TAB>year<TAB>venue<TAB>title<TAB>a;b;c")->required();
  resolve->add_option("--name", name, "author name on the paper to resolve")->required();
  resolve->add_option("--corpus", corpus, "corpus file (defaults to the one recorded in the dump)");
  resolve->add_option("--out", out, "write the updated network here");

  auto* evaluate = app.add_subcommand("evaluate", "pairwise micro metrics of a network against gold labels");
  b_eval.all_knobs(evaluate);
  evaluate->add_option("--gcn", gcn, "network dump to score")->required();
  evaluate->add_option("--gold", gold, "gold file (paper_id, name, author_id)")->required();
  evaluate->add_option("--corpus", corpus, "corpus file (defaults to the one recorded in the dump)");
  evaluate->add_flag("--timing", timing, "add per-name merge time aggregates from <gcn>.timing.tsv");

  auto* run = app.add_subcommand("run", "every stage end to end, artifacts in --out-dir");
  b_run.all_knobs(run);
  run->add_option("--corpus", corpus, "corpus file");
  run->add_option("--gold", gold, "gold file; adds metrics to the manifest");
  run->add_option("--out-dir,--out_dir", out_dir, "artifact directory [default: authnet_out]");

  auto* generate = app.add_subcommand("generate", "write a synthetic corpus with known authors");
  generate->add_option("--out-dir,--out_dir", out_dir, "directory for corpus.tsv and gold.tsv")->required();
  generate->add_option("--papers", gen_papers, "number of papers")->capture_default_str();
  generate->add_option("--seed", gen_seed, "generator seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_code::kOk : exit_code::kUsage;
  }

  // Resolves the config for the chosen subcommand; usage errors exit 1.
  auto configure = [&](const Binding& b) {
    RunConfig c = b.config();
    if (!corpus.empty()) c.corpus = corpus;
    if (!gold.empty()) c.gold = gold;
    if (!out_dir.empty()) c.out_dir = out_dir;
    c.corpus = absolute(c.corpus);
    return c;
  };
  auto stage = [&](int code, auto&& fn) -> int {
    try {
      fn();
      return exit_code::kOk;
    } catch (const Usage& e) {
      std::cerr << "error: " << e.what() << '\n';
      return exit_code::kUsage;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return code;
    }
  };

  RunConfig c;
  try {
    if (*ingest) c = configure(b_ingest);
    if (*build) c = configure(b_scn);
    if (*fit) c = configure(b_fit);
    if (*merge) c = configure(b_merge);
    if (*resolve) c = configure(b_resolve);
    if (*evaluate) c = configure(b_eval);
    if (*run) c = configure(b_run);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code::kUsage;
  }

  if (*ingest) {
    return stage(exit_code::kIngest, [&] {
      auto r = ingest_corpus(c);
      for (const auto& e : r.errors) std::cerr << "line " << e.line << ": " << e.message << '\n';
      if (!out.empty()) {
        std::ofstream os(out);
        if (!os) throw FormatError("cannot write " + out);
        write_corpus(os, r.index);
      }
      print_json({{"papers", r.index.size()},
                  {"rejected_lines", r.errors.size()},
                  {"names", r.index.name_index().size()},
                  {"keywords", r.index.keyword_count()},
                  {"venues", r.index.venue_frequency_table().size()}});
    });
  }

  if (*build) {
    int rc = exit_code::kOk;
    ParseResult r;
    rc = stage(exit_code::kIngest, [&] { r = ingest_corpus(c); });
    if (rc) return rc;
    return stage(exit_code::kBuildScn, [&] {
      auto scrs = mine_scrs(r.index, c.eta);
      auto g = build_scn(scrs, r.index);
      save_network(out, g, r.index, c.corpus);
      print_json({{"scrs", scrs.size()}, {"vertices", g.vertex_count()}, {"edges", g.edge_count()}});
    });
  }

  if (*fit) {
    return stage(exit_code::kFit, [&] {
      auto ln = load_with_corpus(scn, c);
      auto emb = embeddings_for(c, ln.index);
      SimilarityContext ctx(ln.network, ln.index, &emb, c.similarity_options());
      auto ts = sample_training_pairs(ln.network, ctx, c.sampling_options());
      auto r = em_fit(ts.vectors, c.fit_options());
      save_model(out, r.params);
      print_json({{"training_vectors", ts.vectors.size()},
                  {"synthetic_pairs", std::count_if(ts.provenance.begin(), ts.provenance.end(),
                                                    [](const TrainingPair& p) { return p.synthetic; })},
                  {"iterations", r.trace.iterations},
                  {"converged", r.trace.converged},
                  {"restarts", r.trace.restarts},
                  {"prior", r.params.prior}});
    });
  }

  if (*merge) {
    return stage(exit_code::kMerge, [&] {
      auto ln = load_with_corpus(scn, c);
      auto params = load_model(model);
      auto emb = embeddings_for(c, ln.index);
      SimilarityContext ctx(ln.network, ln.index, &emb, c.similarity_options());
      MergeOptions mo;
      mo.workers = c.workers;
      auto rep = merge_pass(ln.network, params, ctx, c.delta, mo);
      auto rec = recover_relations(ln.network, ln.index, params, ctx, c.delta);
      save_network(out, ln.network, ln.index, ln.corpus_path);
      save_merge_log(out + ".merge_log.tsv", rep.events);
      std::ofstream t(out + ".timing.tsv");
      write_timing(t, rep.seconds_per_name);
      print_json({{"merges", rep.events.size()},
                  {"sweeps", rep.sweeps},
                  {"skipped_pairs", rep.skipped_pairs},
                  {"recovered_edges", rec.edges_added},
                  {"vertices", ln.network.vertex_count()},
                  {"edges", ln.network.edge_count()}});
    });
  }

  if (*resolve) {
    return stage(exit_code::kResolve, [&] {
      auto ln = load_with_corpus(gcn, c);
      auto params = load_model(model);
      auto record = parse_record_line(paper_line);
      if (std::find(record.authors.begin(), record.authors.end(), name) == record.authors.end()) {
        throw DomainError("name '" + name + "' is not an author of the given paper");
      }
      const auto p = ln.index.append(record);
      auto emb = embeddings_for(c, ln.index);
      SimilarityContext ctx(ln.network, ln.index, &emb, c.similarity_options());
      auto d = disambiguate_paper(ln.network, params, ctx, p, name, c.delta);
      json cands = json::array();
      for (const auto& cs : d.candidates) {
        cands.push_back({{"instance", cs.instance}, {"score", cs.score ? json(*cs.score) : json(nullptr)}});
      }
      print_json({{"paper_id", d.paper_id},
                  {"name", d.name},
                  {"decision", d.attached ? "attached" : "new_vertex"},
                  {"instance", d.instance},
                  {"score", d.best_score ? json(*d.best_score) : json(nullptr)},
                  {"runner_up", d.runner_up_score ? json(*d.runner_up_score) : json(nullptr)},
                  {"candidates", cands}});
      if (!out.empty()) save_network(out, ln.network, ln.index, ln.corpus_path);
    });
  }

  if (*evaluate) {
    return stage(exit_code::kEvaluate, [&] {
      auto ln = load_with_corpus(gcn, c);
      auto labels = load_gold(gold);
      validate_gold(labels, ln.index);
      auto m = micro_metrics(network_partition(ln.network, ln.index), labels);
      json j = metrics_json(m);
      if (timing) {
        std::ifstream in(gcn + ".timing.tsv");
        if (!in) throw FormatError("no timing file next to " + gcn);
        auto t = summarize_timing(read_timing(in));
        j["timing"] = {{"names", t.names},
                       {"total_seconds", t.total_seconds},
                       {"mean_seconds_per_name", t.mean_seconds},
                       {"max_seconds", t.max_seconds}};
      }
      print_json(j);
    });
  }

  if (*run) {
    try {
      auto report = run_full(c);
      json j = {{"manifest", report.artifacts["manifest"]}, {"merges", report.merges}};
      if (report.scn_metrics) j["scn_micro_f"] = report.scn_metrics->micro_f;
      if (report.gcn_metrics) j["gcn_micro_f"] = report.gcn_metrics->micro_f;
      print_json(j);
      return exit_code::kOk;
    } catch (const StageError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return e.code();
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return exit_code::kUsage;
    }
  }

  if (*generate) {
    return stage(exit_code::kUsage, [&] {
      SyntheticOptions o;
      o.papers = gen_papers;
      o.seed = gen_seed;
      auto syn = generate_corpus(o);
      fs::create_directories(out_dir);
      std::ofstream cs(fs::path(out_dir) / "corpus.tsv");
      for (const auto& r : syn.records) cs << format_record_line(r) << '\n';
      std::ofstream gs(fs::path(out_dir) / "gold.tsv");
      write_gold(gs, syn.gold);
      print_json({{"papers", syn.records.size()}, {"gold_items", syn.gold.size()}});
    });
  }
  return exit_code::kUsage;
}
