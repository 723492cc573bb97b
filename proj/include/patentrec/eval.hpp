#pragma once

#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "patentrec/common.hpp"
#include "patentrec/corpus.hpp"

namespace patentrec {

using RelevantSet = std::unordered_set<PatentId>;
// Query id -> cited ids.
using GroundTruth = std::unordered_map<PatentId, RelevantSet>;

inline const std::vector<std::size_t> kDefaultEvalKs = {10, 20, 30, 40, 50};

// |top-k ∩ relevant| / |relevant|
double recall_at_k(std::span<const PatentId> ranked, const RelevantSet& relevant, std::size_t k);
// |top-k ∩ relevant| / min(k, |ranked|); 0 for an empty list.
double precision_at_k(std::span<const PatentId> ranked, const RelevantSet& relevant, std::size_t k);
// Harmonic mean; 0 when both are 0.
double f1_at_k(double recall, double precision);
// 1 / rank of the first relevant item, 0 if none.
double reciprocal_rank(std::span<const PatentId> ranked, const RelevantSet& relevant);
double mrr(const std::vector<std::vector<PatentId>>& ranked_lists,
           const std::vector<RelevantSet>& relevant);

struct KMetrics {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;

  bool operator==(const KMetrics&) const = default;
};

struct MetricsReport {
  std::string method;
  std::map<std::size_t, KMetrics> at_k;
  double mrr = 0.0;
  std::size_t n_queries = 0;
  // Queries dropped because they have no relevant items.
  std::size_t n_excluded = 0;

  bool operator==(const MetricsReport&) const = default;
};

// Recall, precision and MRR are macro-averaged over queries; F1@K is the
// harmonic mean of the averaged recall and precision at K.
MetricsReport evaluate_run(const std::string& method, const std::vector<RankedList>& ranked,
                           const GroundTruth& truth,
                           std::span<const std::size_t> ks = kDefaultEvalKs);

GroundTruth ground_truth(const CorpusStore& store, std::span<const PatentId> queries);

// Expected Recall@K of a uniformly random ranking over `pool_size`
// candidates: min(K, N) / N for every query.
double random_recall_expectation(std::size_t pool_size, std::size_t k);

// Method | Recall@K | Precision@K | F1-Score@K | MRR
std::string format_comparison_table(const std::vector<MetricsReport>& reports, std::size_t k);
// Method | <metric>@K1 ... for metric in {recall, precision, f1}
std::string format_metric_table(const std::vector<MetricsReport>& reports,
                                const std::string& metric);
// method <TAB> metric <TAB> k <TAB> value; MRR rows carry k = 0.
std::string format_metric_rows(const std::vector<MetricsReport>& reports);
// method <TAB> K <TAB> recall
std::string format_plot_data(const std::vector<MetricsReport>& reports);

}  // namespace patentrec
