#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "patentrec/eval.hpp"
#include "test_util.hpp"

namespace patentrec {
namespace {

using Ids = std::vector<PatentId>;

TEST(PerQuery, RecallPrecisionAtK) {
  const Ids ranked = {"a", "b", "c"};
  const RelevantSet rel = {"b", "d"};
  EXPECT_EQ(recall_at_k(ranked, rel, 2), 0.5);
  EXPECT_EQ(precision_at_k(ranked, rel, 2), 0.5);
  EXPECT_EQ(recall_at_k(ranked, rel, 1), 0.0);
  // Precision divides by the items actually returned.
  EXPECT_NEAR(precision_at_k(ranked, rel, 10), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(precision_at_k(Ids{}, rel, 5), 0.0);
  EXPECT_THROW(recall_at_k(ranked, rel, 0), ValidationError);
  EXPECT_THROW(recall_at_k(ranked, RelevantSet{}, 3), ValidationError);
}

TEST(PerQuery, ReciprocalRankAndMrr) {
  const RelevantSet rel = {"x"};
  EXPECT_EQ(reciprocal_rank(Ids{"a", "x"}, rel), 0.5);
  EXPECT_EQ(reciprocal_rank(Ids{"a", "b"}, rel), 0.0);
  const std::vector<Ids> lists = {{"a", "x"}, {"a", "b", "c", "x"}};
  EXPECT_NEAR(mrr(lists, {rel, rel}), 0.375, 1e-15);
  // Queries without relevant items are skipped, not counted as zero.
  EXPECT_NEAR(mrr({{"a", "x"}, {"x"}}, {rel, RelevantSet{}}), 0.5, 1e-15);
}

TEST(F1, HarmonicMeanProperties) {
  EXPECT_EQ(f1_at_k(0.0, 0.0), 0.0);
  EXPECT_NEAR(f1_at_k(0.4, 0.4), 0.4, 1e-15);
  EXPECT_NEAR(f1_at_k(0.2232, 0.1429), 0.1742, 5e-4);
  EXPECT_NEAR(f1_at_k(0.2979, 0.1280), 0.179, 5e-4);
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const double r = rng.uniform(0.0, 1.0);
    const double p = rng.uniform(0.0, 1.0);
    EXPECT_EQ(f1_at_k(r, p), f1_at_k(p, r));
    EXPECT_LE(f1_at_k(r, p), (r + p) / 2.0 + 1e-15);
    EXPECT_GE(f1_at_k(r, p), std::min(r, p) - 1e-15);
  }
}

TEST(EvaluateRun, MacroAveragesAndExcludesEmptyTruth) {
  const std::vector<RankedList> runs = {{"q1", {{"a", 0.9}, {"b", 0.8}}},
                                        {"q2", {{"c", 0.9}, {"d", 0.1}}},
                                        {"q3", {{"a", 0.5}}}};
  const GroundTruth truth = {{"q1", {"a"}}, {"q2", {"d", "e"}}, {"q3", {}}};
  const std::vector<std::size_t> ks = {1, 2};
  const MetricsReport report = evaluate_run("m", runs, truth, ks);
  EXPECT_EQ(report.method, "m");
  EXPECT_EQ(report.n_queries, 2u);
  EXPECT_EQ(report.n_excluded, 1u);
  EXPECT_NEAR(report.at_k.at(1).recall, 0.5, 1e-15);
  EXPECT_NEAR(report.at_k.at(2).recall, 0.75, 1e-15);
  EXPECT_NEAR(report.at_k.at(2).precision, 0.5, 1e-15);
  EXPECT_NEAR(report.at_k.at(2).f1, 0.6, 1e-15);
  EXPECT_NEAR(report.mrr, 0.75, 1e-15);
  EXPECT_THROW(evaluate_run("m", {{"zz", {}}}, truth, ks), ValidationError);
}

RankedList random_run(Rng& rng, const std::string& qid, std::size_t n_candidates) {
  RankedList run{qid, {}};
  const std::size_t len = rng.uniform_index(n_candidates + 1);
  std::vector<std::size_t> ids(n_candidates);
  for (std::size_t i = 0; i < n_candidates; ++i) ids[i] = i;
  rng.shuffle(ids);
  for (std::size_t i = 0; i < len; ++i) {
    run.items.push_back({"c" + std::to_string(ids[i]), 1.0 / static_cast<double>(i + 1)});
  }
  return run;
}

void expect_reports_close(const MetricsReport& a, const MetricsReport& b, double tol) {
  EXPECT_EQ(a.n_queries, b.n_queries);
  EXPECT_EQ(a.n_excluded, b.n_excluded);
  EXPECT_NEAR(a.mrr, b.mrr, tol);
  ASSERT_EQ(a.at_k.size(), b.at_k.size());
  for (const auto& [k, m] : a.at_k) {
    EXPECT_NEAR(m.recall, b.at_k.at(k).recall, tol) << "k=" << k;
    EXPECT_NEAR(m.precision, b.at_k.at(k).precision, tol) << "k=" << k;
    EXPECT_NEAR(m.f1, b.at_k.at(k).f1, tol) << "k=" << k;
  }
}

TEST(EvaluateRun, MatchesCountingOracle) {
  Rng rng(41);
  const std::vector<std::size_t> ks = {1, 5, 10, 20, 50, 100};
  for (int instance = 0; instance < 30; ++instance) {
    const std::size_t n_queries = 1 + rng.uniform_index(100);
    const std::size_t n_candidates = 1 + rng.uniform_index(200);
    std::vector<RankedList> runs;
    GroundTruth truth;
    for (std::size_t q = 0; q < n_queries; ++q) {
      const std::string qid = "q" + std::to_string(q);
      runs.push_back(random_run(rng, qid, n_candidates));
      RelevantSet rel;
      const std::size_t n_rel = rng.uniform_index(6);
      for (std::size_t r = 0; r < n_rel; ++r) {
        rel.insert("c" + std::to_string(rng.uniform_index(n_candidates + 10)));
      }
      truth[qid] = rel;
    }
    expect_reports_close(evaluate_run("m", runs, truth, ks),
                         testing::naive_metrics(runs, truth, ks), 1e-12);
  }
}

TEST(EvaluateRun, RecallNeverDecreasesWithK) {
  Rng rng(5);
  std::vector<RankedList> runs;
  GroundTruth truth;
  for (int q = 0; q < 40; ++q) {
    const std::string qid = "q" + std::to_string(q);
    runs.push_back(random_run(rng, qid, 80));
    truth[qid] = {"c1", "c7", "c30"};
  }
  const std::vector<std::size_t> ks = {1, 2, 5, 10, 20, 30, 40, 50, 80};
  const MetricsReport report = evaluate_run("m", runs, truth, ks);
  double previous = 0.0;
  for (const auto& [k, m] : report.at_k) {
    EXPECT_GE(m.recall, previous);
    previous = m.recall;
  }
}

TEST(GroundTruthTest, FromCitations) {
  const CorpusStore store({testing::make_record("A", "t", "a", {}, {"B", "C"}),
                           testing::make_record("B", "t", "a"), testing::make_record("C", "t", "a")});
  const std::vector<PatentId> queries = {"A", "B"};
  const GroundTruth truth = ground_truth(store, queries);
  EXPECT_EQ(truth.at("A"), (RelevantSet{"B", "C"}));
  EXPECT_TRUE(truth.at("B").empty());
}

TEST(RandomExpectation, MinKOverN) {
  EXPECT_NEAR(random_recall_expectation(100, 20), 0.2, 1e-15);
  EXPECT_EQ(random_recall_expectation(10, 20), 1.0);
}

MetricsReport sample_report(const std::string& name, double base) {
  MetricsReport r;
  r.method = name;
  for (std::size_t k : kDefaultEvalKs) {
    r.at_k[k] = {base + 0.01 * static_cast<double>(k), 0.1, f1_at_k(base + 0.01 * static_cast<double>(k), 0.1)};
  }
  r.mrr = 0.25;
  return r;
}

TEST(Formatting, ComparisonTableLayout) {
  const std::string table =
      format_comparison_table({sample_report("BM25", 0.0), sample_report("CRNet with CPC", 0.1)}, 20);
  std::istringstream in(table);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header.rfind("Method", 0), 0u);
  EXPECT_NE(header.find("Recall@20"), std::string::npos);
  EXPECT_NE(header.find("Precision@20"), std::string::npos);
  EXPECT_NE(header.find("F1-Score@20"), std::string::npos);
  EXPECT_NE(header.find("MRR"), std::string::npos);
  std::string row;
  std::getline(in, row);
  EXPECT_EQ(row.rfind("BM25", 0), 0u);
  EXPECT_NE(row.find("0.2"), std::string::npos);
  EXPECT_NE(row.find("0.25"), std::string::npos);
}

TEST(Formatting, MetricTablesAndRows) {
  const std::vector<MetricsReport> reports = {sample_report("A", 0.0)};
  const std::string recall = format_metric_table(reports, "recall");
  EXPECT_NE(recall.find("Recall@10"), std::string::npos);
  EXPECT_NE(recall.find("Recall@50"), std::string::npos);
  EXPECT_NE(format_metric_table(reports, "f1").find("F1-score@30"), std::string::npos);
  EXPECT_THROW(format_metric_table(reports, "auc"), ValidationError);
  const std::string rows = format_metric_rows(reports);
  EXPECT_EQ(rows.rfind("method\tmetric\tk\tvalue\n", 0), 0u);
  EXPECT_NE(rows.find("A\trecall\t10\t0.100000\n"), std::string::npos);
  EXPECT_NE(rows.find("A\tmrr\t0\t0.250000\n"), std::string::npos);
  const std::string plot = format_plot_data(reports);
  EXPECT_EQ(plot.rfind("method\tk\trecall\n", 0), 0u);
  EXPECT_NE(plot.find("A\t50\t0.500000\n"), std::string::npos);
}

}  // namespace
}  // namespace patentrec
