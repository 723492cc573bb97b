#pragma once

// Deliberately simple reference implementations used to cross-check the
// optimized code paths.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "patentrec/bm25.hpp"
#include "patentrec/eval.hpp"
#include "patentrec/knn.hpp"
#include "patentrec/text.hpp"

namespace patentrec::testing {

// Scores every eligible entry and fully sorts.
inline CandidateSet naive_top_k(const EmbeddingIndex& index, const PatentId& query_id,
                                std::span<const double> query, std::size_t k,
                                const std::unordered_set<PatentId>& exclude = {}) {
  std::vector<ScoredId> all;
  for (std::size_t i = 0; i < index.size(); ++i) {
    const PatentId& id = index.ids()[i];
    if (id == query_id || exclude.count(id)) continue;
    all.push_back({id, cosine_sim(query, index.row(i))});
  }
  std::sort(all.begin(), all.end(), ranks_before);
  if (all.size() > k) all.resize(k);
  return {query_id, all};
}

// Okapi BM25 straight from the formula, one document at a time.
inline RankedList naive_bm25_rank(const CorpusStore& store, std::span<const PatentId> pool,
                                  const PatentRecord& query, std::size_t k,
                                  Bm25Params params = {}) {
  auto doc_tokens = [](const PatentRecord& r) {
    auto t = tokenize_text(r.title);
    auto a = tokenize_text(r.abstract_text);
    t.insert(t.end(), a.begin(), a.end());
    return t;
  };
  std::vector<std::vector<std::string>> docs;
  double total = 0.0;
  for (const auto& id : pool) {
    docs.push_back(doc_tokens(store.record(id)));
    total += static_cast<double>(docs.back().size());
  }
  const double n = static_cast<double>(docs.size());
  const double avgdl = total / n;
  const auto q = doc_tokens(query);
  const std::set<std::string> terms(q.begin(), q.end());
  std::vector<ScoredId> scored;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    if (pool[d] == query.id) continue;
    double score = 0.0;
    for (const auto& term : terms) {
      double df = 0.0;
      for (const auto& doc : docs) {
        if (std::find(doc.begin(), doc.end(), term) != doc.end()) df += 1.0;
      }
      if (df == 0.0) continue;
      const double tf = static_cast<double>(std::count(docs[d].begin(), docs[d].end(), term));
      if (tf == 0.0) continue;
      const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
      const double len = static_cast<double>(docs[d].size());
      score += idf * tf * (params.k1 + 1.0) /
               (tf + params.k1 * (1.0 - params.b + params.b * len / avgdl));
    }
    scored.push_back({pool[d], score});
  }
  std::sort(scored.begin(), scored.end(), ranks_before);
  if (scored.size() > k) scored.resize(k);
  return {query.id, scored};
}

// Metrics by direct counting over each query's list.
inline MetricsReport naive_metrics(const std::vector<RankedList>& runs, const GroundTruth& truth,
                                   std::span<const std::size_t> ks) {
  MetricsReport report;
  std::map<std::size_t, double> recall;
  std::map<std::size_t, double> precision;
  double rr = 0.0;
  for (const auto& run : runs) {
    const RelevantSet& rel = truth.at(run.query_id);
    if (rel.empty()) {
      ++report.n_excluded;
      continue;
    }
    ++report.n_queries;
    for (std::size_t k : ks) {
      std::size_t hits = 0;
      std::size_t seen = 0;
      for (const auto& item : run.items) {
        if (seen == k) break;
        ++seen;
        if (rel.count(item.id)) ++hits;
      }
      recall[k] += static_cast<double>(hits) / static_cast<double>(rel.size());
      precision[k] += seen == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(seen);
    }
    for (std::size_t i = 0; i < run.items.size(); ++i) {
      if (rel.count(run.items[i].id)) {
        rr += 1.0 / static_cast<double>(i + 1);
        break;
      }
    }
  }
  const double n = report.n_queries == 0 ? 1.0 : static_cast<double>(report.n_queries);
  for (std::size_t k : ks) {
    KMetrics m;
    m.recall = recall[k] / n;
    m.precision = precision[k] / n;
    m.f1 = m.recall + m.precision == 0.0 ? 0.0
                                         : 2.0 * m.recall * m.precision / (m.recall + m.precision);
    report.at_k[k] = m;
  }
  report.mrr = rr / n;
  return report;
}

}  // namespace patentrec::testing
