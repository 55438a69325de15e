#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace authnet;
using fixtures::rec;
using namespace oracles;

TEST(MicroMetrics, PerfectPredictionScoresOne) {
  GoldLabels gold = {{{"p1", "a"}, "A1"}, {{"p2", "a"}, "A1"}, {{"p3", "a"}, "A2"}};
  Partition pred = {{{"p1", "a"}, "x"}, {{"p2", "a"}, "x"}, {{"p3", "a"}, "y"}};
  auto m = micro_metrics(pred, gold);
  EXPECT_EQ(m.tp, 1u);
  EXPECT_EQ(m.tn, 2u);
  EXPECT_EQ(m.micro_a, 1.0);
  EXPECT_EQ(m.micro_p, 1.0);
  EXPECT_EQ(m.micro_r, 1.0);
  EXPECT_EQ(m.micro_f, 1.0);
}

TEST(MicroMetrics, AllSingletonsHavePerfectPrecisionAndZeroRecall) {
  GoldLabels gold = {{{"p1", "a"}, "A"}, {{"p2", "a"}, "A"}, {{"p3", "a"}, "A"}};
  Partition pred = {{{"p1", "a"}, "1"}, {{"p2", "a"}, "2"}, {{"p3", "a"}, "3"}};
  auto m = micro_metrics(pred, gold);
  EXPECT_EQ(m.fn, 3u);
  EXPECT_EQ(m.micro_p, 1.0);  // no predicted pairs
  EXPECT_EQ(m.micro_r, 0.0);
  EXPECT_EQ(m.micro_f, 0.0);
  EXPECT_EQ(m.micro_a, 0.0);
}

TEST(MicroMetrics, PairsAcrossNamesAreNotCounted) {
  GoldLabels gold = {{{"p1", "a"}, "A"}, {{"p1", "b"}, "A"}};
  Partition pred = {{{"p1", "a"}, "x"}, {{"p1", "b"}, "x"}};
  EXPECT_EQ(micro_metrics(pred, gold).pairs(), 0u);
}

TEST(MicroMetrics, MatchBruteForcePairEnumeration) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    auto [pred, gold] = random_labelling(rng);
    auto fast = micro_metrics(pred, gold);
    auto slow = brute_force_metrics(pred, gold);
    EXPECT_EQ(fast.tp, slow.tp);
    EXPECT_EQ(fast.fp, slow.fp);
    EXPECT_EQ(fast.fn, slow.fn);
    EXPECT_EQ(fast.tn, slow.tn);
    EXPECT_EQ(fast.micro_f, slow.micro_f);
    for (double v : {fast.micro_a, fast.micro_p, fast.micro_r, fast.micro_f}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(MicroMetrics, InvariantUnderRelabelling) {
  std::mt19937_64 rng(18);
  for (int trial = 0; trial < 20; ++trial) {
    auto [pred, gold] = random_labelling(rng);
    Partition pred2;
    GoldLabels gold2;
    for (auto& [k, c] : pred) pred2[k] = "renamed_" + c + "_z";
    for (auto& [k, a] : gold) gold2[k] = a + "#";
    auto x = micro_metrics(pred, gold), y = micro_metrics(pred2, gold2);
    EXPECT_EQ(x.tp, y.tp);
    EXPECT_EQ(x.fp, y.fp);
    EXPECT_EQ(x.tn, y.tn);
  }
}

TEST(MicroMetrics, UnpredictedLabelledItemIsDomainError) {
  GoldLabels gold = {{{"p1", "a"}, "A"}, {{"p9", "a"}, "A"}};
  Partition pred = {{{"p1", "a"}, "x"}};
  try {
    micro_metrics(pred, gold);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("p9"), std::string::npos);
  }
}

TEST(MicroMetrics, EmptyCountsFollowTheConvention) {
  auto m = metrics_from_counts(0, 0, 0, 0);
  EXPECT_EQ(m.micro_a, 1.0);
  EXPECT_EQ(m.micro_f, 1.0);
  auto h = metrics_from_counts(2, 2, 0, 0);
  EXPECT_DOUBLE_EQ(h.micro_p, 0.5);
  EXPECT_DOUBLE_EQ(h.micro_f, 2.0 * 0.5 / 1.5);
}

TEST(GoldFile, RoundTripAndValidation) {
  auto gold = load_gold(fixtures::data_path("toy_gold.tsv"));
  EXPECT_EQ(gold.size(), 9u);
  std::ostringstream os;
  write_gold(os, gold);
  std::istringstream in(os.str());
  EXPECT_EQ(read_gold(in), gold);
  auto corpus = load_corpus(fixtures::data_path("toy_corpus.tsv"));
  EXPECT_NO_THROW(validate_gold(gold, corpus.index));
  GoldLabels stray = {{{"P99", "Alice Wang"}, "A1"}};
  EXPECT_THROW(validate_gold(stray, corpus.index), DomainError);
  GoldLabels wrong_name = {{{"P01", "Nobody"}, "A1"}};
  EXPECT_THROW(validate_gold(wrong_name, corpus.index), DomainError);
  std::istringstream dup("p\ta\tA\np\ta\tB\n");
  EXPECT_THROW(read_gold(dup), FormatError);
  std::istringstream shortrow("p\ta\n");
  EXPECT_THROW(read_gold(shortrow), FormatError);
}

TEST(GoldFile, ToyPipelinePartitionScoresAgainstGold) {
  auto corpus = load_corpus(fixtures::data_path("toy_corpus.tsv"));
  auto g = build_scn(mine_scrs(corpus.index, 3), corpus.index);
  auto gold = load_gold(fixtures::data_path("toy_gold.tsv"));
  auto part = network_partition(g, corpus.index);
  auto m = micro_metrics(part, gold);
  // The SCN splits nothing that belongs together and joins nothing apart.
  EXPECT_EQ(m.fp, 0u);
  EXPECT_EQ(m.micro_p, 1.0);
}
