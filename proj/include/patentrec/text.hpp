#pragma once

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "patentrec/common.hpp"
#include "patentrec/corpus.hpp"

namespace patentrec {

// Version of the tokenization rule, recorded in vocabulary headers.
inline constexpr int kTokenizerVersion = 1;

// Lowercases ASCII, splits on non-alphanumeric bytes, drops tokens shorter than
// two bytes and pure-digit tokens. Bytes >= 0x80 count as alphanumeric so UTF-8
// words stay whole.
std::vector<std::string> tokenize_text(std::string_view text);

// Dense token ids assigned in lexicographic token order.
class Vocabulary {
 public:
  Vocabulary() = default;
  // `doc_freq` holds the document count of every candidate token.
  Vocabulary(const std::map<std::string, std::size_t>& doc_freq, std::size_t n_docs,
             std::size_t min_df);

  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  std::optional<TokenId> find(std::string_view token) const;
  const std::string& token(TokenId id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  std::size_t doc_freq(TokenId id) const { return doc_freq_.at(static_cast<std::size_t>(id)); }
  std::size_t n_docs() const { return n_docs_; }
  std::size_t min_df() const { return min_df_; }
  // Stable hash of (tokens, min_df, tokenizer version).
  std::string fingerprint() const;

  void save(std::ostream& out) const;
  static Vocabulary load(std::istream& in);

  bool operator==(const Vocabulary& other) const {
    return tokens_ == other.tokens_ && doc_freq_ == other.doc_freq_ &&
           n_docs_ == other.n_docs_ && min_df_ == other.min_df_;
  }

 private:
  std::vector<std::string> tokens_;
  std::vector<std::size_t> doc_freq_;
  std::unordered_map<std::string, TokenId> ids_;
  std::size_t n_docs_ = 0;
  std::size_t min_df_ = 1;
};

struct Vocabularies {
  Vocabulary words;
  Vocabulary cpc;
};

// Word vocabulary over title+abstract of the given documents with document
// frequency >= min_df; CPC vocabulary over their subclass codes (min_df 1).
Vocabularies build_vocabulary(const CorpusStore& store, std::span<const PatentId> documents,
                              std::size_t min_df);
// Convenience overload over every record in the store.
Vocabularies build_vocabulary(const CorpusStore& store, std::size_t min_df);

struct TokenizedPatent {
  std::vector<TokenId> title_ids;
  std::vector<TokenId> abstract_ids;
  std::vector<TokenId> cpc_ids;  // sorted, distinct

  bool operator==(const TokenizedPatent&) const = default;
};

// Out-of-vocabulary tokens are dropped.
TokenizedPatent tokenize_patent(const PatentRecord& record, const Vocabularies& vocab);
// Aligned with store record indices.
std::vector<TokenizedPatent> tokenize_corpus(const CorpusStore& store, const Vocabularies& vocab);

// Sparse token-id -> count map; only positive counts are stored.
using BowVector = std::map<TokenId, int>;

BowVector to_bow(std::span<const TokenId> ids);
BowVector merge_bow(const BowVector& a, const BowVector& b);
// Cosine over raw counts; 0 if either side is empty.
double bow_cosine(const BowVector& a, const BowVector& b);

}  // namespace patentrec
