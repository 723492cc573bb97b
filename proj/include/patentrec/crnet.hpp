#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "patentrec/common.hpp"
#include "patentrec/corpus.hpp"
#include "patentrec/csnet.hpp"
#include "patentrec/nn.hpp"
#include "patentrec/text.hpp"

namespace patentrec {

enum class Field { kTitle, kAbstract, kCpc };

struct FeatureOptions {
  bool use_cpc = true;
  // Cosine over raw token counts instead of per-field CSNet embeddings.
  bool raw_bow_similarity = false;

  bool operator==(const FeatureOptions&) const = default;
};

// Width of x = x_num ++ x_int ++ x_emb: (3 or 2) + 2 + 2 * dim.
std::size_t feature_width(std::size_t dim, const FeatureOptions& options);

// Cosine between the query and candidate field vectors, where a field vector
// is the sum of g(token) over that field (field weights not applied). Empty
// fields give 0.
double field_similarity(const CsnetModel& model, const TokenizedPatent& q,
                        const TokenizedPatent& c, Field field);

// Sum of magnitudes over the distinct tokens the two fields share.
double intersection_weight(std::span<const TokenId> q_field, std::span<const TokenId> c_field,
                           const EmbeddingTableView& table);

// Everything about one patent that feature construction needs.
struct PreparedPatent {
  FieldSums sums;
  std::vector<double> embedding;
  std::vector<TokenId> title_set;     // sorted distinct
  std::vector<TokenId> abstract_set;  // sorted distinct
  BowVector title_bow;
  BowVector abstract_bow;
  BowVector cpc_bow;
};

PreparedPatent prepare_patent(const CsnetModel& model, const TokenizedPatent& patent);

// Prepared patents aligned with store record indices.
class PreparedCorpus {
 public:
  PreparedCorpus(const CsnetModel& model, const std::vector<TokenizedPatent>& tokens);
  const PreparedPatent& operator[](RecordIndex r) const { return patents_.at(r); }
  std::size_t size() const { return patents_.size(); }

 private:
  std::vector<PreparedPatent> patents_;
};

std::vector<double> build_features(const CsnetModel& model, const PreparedPatent& q,
                                   const PreparedPatent& c, const FeatureOptions& options);
// e_q and e_c must come from `model`.
std::vector<double> build_features(const CsnetModel& model, const TokenizedPatent& q,
                                   const TokenizedPatent& c, std::span<const double> e_q,
                                   std::span<const double> e_c, const FeatureOptions& options);

// Reranker: (5 + 2E) -> 20 -> 20 -> 20 -> 1, elu hidden, sigmoid output.
struct CrnetModel {
  nn::Mlp mlp;
  std::size_t dim = 0;
  FeatureOptions options;
  std::string csnet_fingerprint;

  double score(std::span<const double> features) const;
  void save(std::ostream& out, std::uint64_t seed = 0) const;
  // Refuses a model trained on top of a different CSNet.
  static CrnetModel load(std::istream& in, const CsnetModel& csnet);

  bool operator==(const CrnetModel&) const = default;
};

inline constexpr std::size_t kCrnetHiddenWidth = 20;

CrnetModel initialize_crnet(const CsnetModel& csnet, const FeatureOptions& options,
                            std::uint64_t seed);

struct CrnetTrainConfig {
  std::size_t epochs = 400;
  double lr = 1e-2;
  // Mini-batch size; a free choice.
  std::size_t batch_size = 256;
  std::uint64_t seed = 0;
  std::size_t k = 100;
  // Add cited patents missing from a training query's candidate set.
  bool inject_positives = false;
  // Loss weight of positive pairs; 1 keeps the natural class ratio.
  double positive_weight = 1.0;
  FeatureOptions features;
};

struct CrnetTrainResult {
  CrnetModel model;
  double initial_loss = 0.0;
  std::vector<double> epoch_losses;
};

// Labels a candidate 1 iff the query cites it. Minimizes mean BCE with Adam.
CrnetTrainResult train_crnet(const CorpusStore& store, const std::vector<CandidateSet>& candsets,
                             const CsnetModel& csnet, const PreparedCorpus& prepared,
                             const CrnetTrainConfig& config);

// Scores every candidate; output ordered by (score desc, id asc).
RankedList rerank(const CrnetModel& model, const CsnetModel& csnet, const PreparedPatent& query,
                  const CandidateSet& candidates, const CorpusStore& store,
                  const PreparedCorpus& prepared);

}  // namespace patentrec
