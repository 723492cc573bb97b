#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "patentrec/common.hpp"
#include "patentrec/corpus.hpp"

namespace patentrec {

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

// ln(1 + (N - df + 0.5) / (df + 0.5)); always positive for df <= N.
double bm25_idf(std::size_t n_docs, std::size_t doc_freq);

// Okapi BM25 over title + abstract tokens of the pool documents.
class Bm25Index {
 public:
  struct Posting {
    std::uint32_t doc = 0;
    std::uint32_t tf = 0;
  };

  Bm25Index(const CorpusStore& store, std::span<const PatentId> pool, Bm25Params params = {});

  std::size_t size() const { return ids_.size(); }
  const std::vector<PatentId>& ids() const { return ids_; }
  const Bm25Params& params() const { return params_; }
  std::size_t doc_length(std::size_t doc) const { return doc_length_[doc]; }
  double average_length() const { return avgdl_; }
  std::size_t doc_freq(const std::string& term) const;
  std::size_t term_count(std::size_t doc, const std::string& term) const;
  const std::vector<Posting>* postings(const std::string& term) const;

 private:
  Bm25Params params_;
  std::vector<PatentId> ids_;
  std::vector<std::size_t> doc_length_;
  double avgdl_ = 0.0;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
};

Bm25Index build_bm25(const CorpusStore& store, std::span<const PatentId> pool,
                     Bm25Params params = {});

// Query terms are the distinct title + abstract tokens of `query`. Every pool
// document outside `exclude` and other than the query itself is eligible;
// the first `k` by (score desc, id asc) are returned.
RankedList bm25_rank(const Bm25Index& index, const PatentRecord& query, std::size_t k,
                     const std::unordered_set<PatentId>& exclude = {});

}  // namespace patentrec
