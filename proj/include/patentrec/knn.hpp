#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "patentrec/common.hpp"
#include "patentrec/corpus.hpp"
#include "patentrec/csnet.hpp"
#include "patentrec/text.hpp"

namespace patentrec {

inline constexpr std::size_t kDefaultCandidateCount = 100;

// Pool embeddings from one CSNet model, one row per patent.
class EmbeddingIndex {
 public:
  EmbeddingIndex() = default;
  EmbeddingIndex(std::vector<PatentId> ids, std::vector<double> vectors, std::size_t dim,
                 std::string model_fingerprint);

  std::size_t size() const { return ids_.size(); }
  std::size_t dim() const { return dim_; }
  const std::vector<PatentId>& ids() const { return ids_; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(vectors_).subspan(i * dim_, dim_);
  }
  const std::string& model_fingerprint() const { return model_fingerprint_; }

  void save(std::ostream& out) const;
  // Refuses an index built from a different model.
  static EmbeddingIndex load(std::istream& in, const std::string& expected_fingerprint);

  bool operator==(const EmbeddingIndex&) const = default;

 private:
  std::vector<PatentId> ids_;
  std::vector<double> vectors_;
  std::size_t dim_ = 0;
  std::string model_fingerprint_;
};

EmbeddingIndex build_index(const CsnetModel& model, const CorpusStore& store,
                           const std::vector<TokenizedPatent>& tokens,
                           std::span<const PatentId> pool);

// The `k` most cosine-similar pool entries outside `exclude` and other than
// `query_id`, ordered by (similarity desc, id asc). Bounded-heap selection.
CandidateSet top_k(const EmbeddingIndex& index, const PatentId& query_id,
                   std::span<const double> query, std::size_t k,
                   const std::unordered_set<PatentId>& exclude = {});

}  // namespace patentrec
