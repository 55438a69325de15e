#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>

#include "fixtures.hpp"
#include "json.hpp"

using namespace authnet;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& tag) {
  auto p = fs::temp_directory_path() / ("authnet_test_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

RunConfig toy_config(const fs::path& out) {
  RunConfig c;
  c.corpus = fixtures::data_path("toy_corpus.tsv");
  c.gold = fixtures::data_path("toy_gold.tsv");
  c.sample_rate = 1.0;
  c.out_dir = out.string();
  return c;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(AUTHNET_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(RunConfigFile, RoundTripsLosslessly) {
  RunConfig c;
  c.eta = 4;
  c.delta = -1.25;
  c.alpha = 0.1 + 0.2;  // not exactly representable in short decimal
  c.positive_time_exponent = true;
  c.families[kVenue] = Family::Multinomial;
  c.seed = 123456789012345ULL;
  c.corpus = "some dir/corpus.tsv";
  std::istringstream in(config_to_string(c));
  auto back = read_config(in);
  EXPECT_EQ(config_to_string(back), config_to_string(c));
  EXPECT_EQ(back.alpha, c.alpha);
  EXPECT_EQ(back.corpus, c.corpus);
  EXPECT_EQ(config_hash(back), config_hash(c));
}

TEST(RunConfigFile, LaterValuesOverrideAndErrorsNameTheLine) {
  RunConfig base;
  base.delta = 3.0;
  std::istringstream in("# comment\n\neta = 5   # trailing\nseed=9\n");
  auto c = read_config(in, base);
  EXPECT_EQ(c.eta, 5u);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.delta, 3.0);
  std::istringstream unknown("eta = 3\nbogus = 1\n");
  try {
    read_config(unknown);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  std::istringstream noeq("eta 3\n");
  EXPECT_THROW(read_config(noeq), FormatError);
  std::istringstream badnum("delta = lots\n");
  EXPECT_THROW(read_config(badnum), FormatError);
}

TEST(RunConfigFile, OutOfRangeValuesAreRejected) {
  auto bad = [](auto mutate) {
    RunConfig c;
    mutate(c);
    EXPECT_THROW(c.validate(), DomainError);
  };
  bad([](RunConfig& c) { c.eta = 1; });
  bad([](RunConfig& c) { c.alpha = 0; });
  bad([](RunConfig& c) { c.wl_iterations = 0; });
  bad([](RunConfig& c) { c.sample_rate = 0; });
  bad([](RunConfig& c) { c.sample_rate = 1.5; });
  bad([](RunConfig& c) { c.min_split = 1; });
  bad([](RunConfig& c) { c.delta = std::numeric_limits<double>::infinity(); });
  bad([](RunConfig& c) { c.mean_floor_fraction = -0.1; });
  EXPECT_NO_THROW(RunConfig{}.validate());
}

TEST(RunConfigFile, DefaultsAreTheDocumentedOnes) {
  RunConfig c;
  EXPECT_EQ(c.eta, 3u);
  EXPECT_EQ(c.delta, 0.0);
  EXPECT_EQ(c.alpha, 0.62);
  EXPECT_EQ(c.wl_iterations, 2);
  EXPECT_EQ(c.sample_rate, 0.1);
  EXPECT_EQ(c.min_split, 5u);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.families, default_families());
}

TEST(RunFull, ToyCorpusIsDeterministic) {
  auto a = scratch_dir("det");
  const char* files[] = {"scn.tsv", "gcn.tsv", "model.txt", "merge_log.tsv"};
  auto ra = run_full(toy_config(a));
  std::map<std::string, std::string> first;
  for (const char* f : files) first[f] = fixtures::slurp((a / f).string());
  auto rb = run_full(toy_config(a));
  for (const char* f : files) EXPECT_EQ(fixtures::slurp((a / f).string()), first[f]) << f;
  EXPECT_EQ(ra.config_hash, rb.config_hash);
  EXPECT_EQ(ra.scn_vertices, 10u);
  EXPECT_EQ(ra.merges, rb.merges);
  ASSERT_TRUE(ra.gcn_metrics && rb.gcn_metrics);
  EXPECT_EQ(ra.gcn_metrics->micro_f, rb.gcn_metrics->micro_f);
  EXPECT_NE(first["scn.tsv"].find("V\tAlice Wang\t0\tP01;P02;P03;P05;P10\n"), std::string::npos);
  fs::remove_all(a);
}

TEST(RunFull, HugeThresholdKeepsTheStableNetworkAndOnlyAddsEdges) {
  auto dir = scratch_dir("nomerge");
  auto c = toy_config(dir);
  c.delta = 1e9;
  auto r = run_full(c);
  EXPECT_EQ(r.merges, 0u);
  EXPECT_EQ(r.gcn_vertices, r.scn_vertices);
  EXPECT_EQ(r.gcn_edges, r.scn_edges + r.recovered_edges);
  auto corpus = load_corpus(c.corpus);
  auto scn = load_network((dir / "scn.tsv").string(), corpus.index);
  auto gcn = load_network((dir / "gcn.tsv").string(), corpus.index);
  EXPECT_EQ(network_partition(scn, corpus.index), network_partition(gcn, corpus.index));
  auto same = [&](VertexId v) { return *gcn.find(scn.vertex(v).name, scn.vertex(v).instance_id); };
  for (auto u : scn.vertex_ids()) {
    for (auto v : scn.neighbors(u)) EXPECT_TRUE(gcn.has_edge(same(u), same(v)));
  }
  fs::remove_all(dir);
}

TEST(RunFull, ManifestListsEveryConfigValueStageAndArtifact) {
  auto dir = scratch_dir("manifest");
  auto c = toy_config(dir);
  run_full(c);
  auto j = nlohmann::json::parse(fixtures::slurp((dir / "manifest.json").string()));
  for (const auto& [k, v] : config_entries(c)) {
    ASSERT_TRUE(j["config"].contains(k)) << k;
    EXPECT_EQ(j["config"][k], v);
  }
  for (const char* s : {"ingest", "build-scn", "fit", "merge", "evaluate"}) EXPECT_TRUE(j["stage_seconds"].contains(s));
  for (const char* k : {"scn_vertices", "scn_edges", "merges", "gcn_vertices", "gcn_edges"}) {
    EXPECT_TRUE(j["counts"].contains(k)) << k;
  }
  EXPECT_EQ(j["config_hash"], config_hash(c));
  for (const auto& [k, path] : j["artifacts"].items()) EXPECT_TRUE(fs::exists(path.get<std::string>())) << k;
  EXPECT_TRUE(j.contains("gcn_metrics"));
  fs::remove_all(dir);
}

TEST(RunFull, FailedStageKeepsEarlierArtifacts) {
  auto dir = scratch_dir("fail");
  auto c = toy_config(dir);
  c.sample_rate = 0.1;  // one training vector: the fit cannot run
  try {
    run_full(c);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "fit");
    EXPECT_EQ(e.code(), exit_code::kFit);
  }
  EXPECT_TRUE(fs::exists(dir / "scn.tsv"));
  EXPECT_FALSE(fs::exists(dir / "gcn.tsv"));
  auto j = nlohmann::json::parse(fixtures::slurp((dir / "manifest.json").string()));
  EXPECT_EQ(j["failed_stage"], "fit");
  fs::remove_all(dir);
}

TEST(RunFull, MergingRaisesRecallOnAPlantedCorpus) {
  SyntheticOptions o;
  o.papers = 800;
  o.authors = 300;
  o.ambiguous_names = 40;
  auto syn = generate_corpus(o);
  RunConfig c;
  ParseResult pre{CorpusIndex::build(syn.records, default_stopwords(), c.keyword_options()), {}};
  RunReport report;
  RunState st;
  run_pipeline(c, &pre, report, st, &syn.gold);
  ASSERT_TRUE(report.scn_metrics && report.gcn_metrics);
  EXPECT_GT(report.gcn_metrics->micro_r, report.scn_metrics->micro_r);
  EXPECT_GT(report.merges, 0u);
}

TEST(Cli, StagesRunAndFailuresMapToDistinctExitCodes) {
  auto dir = scratch_dir("cli");
  const auto d = dir.string();
  const auto corpus = fixtures::data_path("toy_corpus.tsv");
  const auto gold = fixtures::data_path("toy_gold.tsv");
  EXPECT_EQ(cli("ingest --corpus " + corpus), 0);
  EXPECT_EQ(cli("build-scn --corpus " + corpus + " --out " + d + "/scn.tsv"), 0);
  EXPECT_EQ(fixtures::slurp(d + "/scn.tsv").substr(fixtures::slurp(d + "/scn.tsv").find("\nV\t")),
            fixtures::slurp(fixtures::data_path("toy_scn.tsv"))
                .substr(fixtures::slurp(fixtures::data_path("toy_scn.tsv")).find("\nV\t")));
  {
    std::ofstream cfg(d + "/run.cfg");
    cfg << "sample_rate = 0.1\n";
  }
  // The file says 0.1 (fit fails); the flag overrides it.
  EXPECT_EQ(cli("fit --config " + d + "/run.cfg --scn " + d + "/scn.tsv --out " + d + "/m.txt"), exit_code::kFit);
  EXPECT_EQ(cli("fit --config " + d + "/run.cfg --sample-rate 1 --scn " + d + "/scn.tsv --out " + d + "/m.txt"), 0);
  EXPECT_EQ(cli("merge --scn " + d + "/scn.tsv --model " + d + "/m.txt --out " + d + "/gcn.tsv"), 0);
  EXPECT_TRUE(fs::exists(d + "/gcn.tsv.merge_log.tsv"));
  EXPECT_EQ(cli("evaluate --timing --gcn " + d + "/gcn.tsv --gold " + gold), 0);
  EXPECT_EQ(cli("resolve --gcn " + d + "/gcn.tsv --model " + d + "/m.txt --name 'Alice Wang' --paper "
                "'N1\t2010\tKDD\tGraph mining\tAlice Wang;Bob Li'"),
            0);
  EXPECT_EQ(cli("run --sample-rate 1 --corpus " + corpus + " --gold " + gold + " --out-dir " + d + "/run"), 0);

  EXPECT_EQ(cli(""), exit_code::kUsage);
  EXPECT_EQ(cli("fit --eta 1 --scn x --out y"), exit_code::kUsage);
  EXPECT_EQ(cli("ingest --corpus " + d + "/missing.tsv"), exit_code::kIngest);
  EXPECT_EQ(cli("build-scn --corpus " + corpus + " --out " + d + "/no/such/dir/scn.tsv"), exit_code::kBuildScn);
  EXPECT_EQ(cli("merge --scn " + d + "/scn.tsv --model " + d + "/missing.txt --out " + d + "/g2.tsv"),
            exit_code::kMerge);
  EXPECT_EQ(cli("resolve --gcn " + d + "/gcn.tsv --model " + d + "/m.txt --name Nobody --paper "
                "'N1\t2010\tKDD\tGraph mining\tAlice Wang'"),
            exit_code::kResolve);
  EXPECT_EQ(cli("evaluate --gcn " + d + "/gcn.tsv --gold " + d + "/missing.tsv"), exit_code::kEvaluate);
  EXPECT_EQ(cli("run --corpus " + corpus + " --out-dir " + d + "/run2"), exit_code::kFit);
  fs::remove_all(dir);
}
