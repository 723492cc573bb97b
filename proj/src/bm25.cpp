#include "patentrec/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "patentrec/text.hpp"

namespace patentrec {
namespace {

std::vector<std::string> document_tokens(const PatentRecord& record) {
  std::vector<std::string> tokens = tokenize_text(record.title);
  for (auto& token : tokenize_text(record.abstract_text)) tokens.push_back(std::move(token));
  return tokens;
}

}  // namespace

double bm25_idf(std::size_t n_docs, std::size_t doc_freq) {
  const double n = static_cast<double>(n_docs);
  const double df = static_cast<double>(doc_freq);
  return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

Bm25Index::Bm25Index(const CorpusStore& store, std::span<const PatentId> pool, Bm25Params params)
    : params_(params) {
  if (pool.empty()) throw ValidationError("empty bm25 pool");
  std::size_t total = 0;
  for (const auto& id : pool) {
    const auto doc = static_cast<std::uint32_t>(ids_.size());
    ids_.push_back(id);
    const auto tokens = document_tokens(store.record(id));
    std::map<std::string, std::uint32_t> counts;
    for (const auto& token : tokens) ++counts[token];
    for (const auto& [term, tf] : counts) postings_[term].push_back({doc, tf});
    doc_length_.push_back(tokens.size());
    total += tokens.size();
  }
  avgdl_ = static_cast<double>(total) / static_cast<double>(ids_.size());
}

std::size_t Bm25Index::doc_freq(const std::string& term) const {
  auto it = postings_.find(term);
  return it == postings_.end() ? 0 : it->second.size();
}

std::size_t Bm25Index::term_count(std::size_t doc, const std::string& term) const {
  auto it = postings_.find(term);
  if (it == postings_.end()) return 0;
  auto pos = std::lower_bound(it->second.begin(), it->second.end(), doc,
                              [](const Posting& p, std::size_t d) { return p.doc < d; });
  return pos != it->second.end() && pos->doc == doc ? pos->tf : 0;
}

const std::vector<Bm25Index::Posting>* Bm25Index::postings(const std::string& term) const {
  auto it = postings_.find(term);
  return it == postings_.end() ? nullptr : &it->second;
}

Bm25Index build_bm25(const CorpusStore& store, std::span<const PatentId> pool, Bm25Params params) {
  return Bm25Index(store, pool, params);
}

RankedList bm25_rank(const Bm25Index& index, const PatentRecord& query, std::size_t k,
                     const std::unordered_set<PatentId>& exclude) {
  if (k == 0) throw ValidationError("k must be at least 1");
  const auto tokens = document_tokens(query);
  const std::set<std::string> terms(tokens.begin(), tokens.end());
  const Bm25Params& p = index.params();
  std::vector<double> scores(index.size(), 0.0);
  for (const auto& term : terms) {
    const auto* postings = index.postings(term);
    if (postings == nullptr) continue;
    const double idf = bm25_idf(index.size(), postings->size());
    for (const auto& posting : *postings) {
      const double tf = posting.tf;
      const double norm =
          p.k1 * (1.0 - p.b + p.b * static_cast<double>(index.doc_length(posting.doc)) /
                                  index.average_length());
      scores[posting.doc] += idf * tf * (p.k1 + 1.0) / (tf + norm);
    }
  }
  std::vector<ScoredId> ranked;
  ranked.reserve(index.size());
  for (std::size_t d = 0; d < index.size(); ++d) {
    const PatentId& id = index.ids()[d];
    if (id == query.id || exclude.count(id) > 0) continue;
    ranked.push_back({id, scores[d]});
  }
  const std::size_t keep = std::min(k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep), ranked.end(),
                    ranks_before);
  ranked.resize(keep);
  return RankedList{query.id, std::move(ranked)};
}

}  // namespace patentrec
