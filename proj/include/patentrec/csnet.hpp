#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "patentrec/common.hpp"
#include "patentrec/corpus.hpp"
#include "patentrec/text.hpp"

namespace patentrec {

inline constexpr std::size_t kDefaultEmbeddingDim = 75;

// Read-only view of one weight-normalized token table. Token w maps to
// g(w) = magnitude[w] * direction[w] / |direction[w]|.
struct EmbeddingTableView {
  std::span<const double> direction;  // [size x dim], row-major
  std::span<const double> magnitude;  // [size]
  std::size_t dim = 0;

  std::size_t size() const { return magnitude.size(); }
  std::span<const double> row(TokenId id) const {
    return direction.subspan(static_cast<std::size_t>(id) * dim, dim);
  }
  // out += scale * g(id)
  void add_token_vector(TokenId id, double scale, std::span<double> out) const;
  std::vector<double> token_vector(TokenId id) const;
};

struct FieldWeights {
  double title = 1.0;
  double abstract_text = 1.0;
  double cpc = 1.0;
};

// Candidate selection network. All trainable values live in one flat vector:
//   [word directions | word magnitudes | cpc directions | cpc magnitudes |
//    lambda_title, lambda_abstract, lambda_cpc]
// Without CPC the cpc table is empty and lambda_cpc is unused.
class CsnetModel {
 public:
  CsnetModel() = default;
  CsnetModel(std::size_t n_words, std::size_t n_codes, std::size_t dim, bool use_cpc,
             std::string word_vocab_fingerprint, std::string cpc_vocab_fingerprint);

  // Random directions, unit magnitudes, field weights uniform in [0.5, 1.5].
  static CsnetModel initialize(const Vocabularies& vocab, std::size_t dim, bool use_cpc,
                               std::uint64_t seed);

  std::size_t dim() const { return dim_; }
  bool use_cpc() const { return use_cpc_; }
  std::size_t n_words() const { return n_words_; }
  std::size_t n_codes() const { return n_codes_; }
  const std::string& word_vocab_fingerprint() const { return word_vocab_fp_; }
  const std::string& cpc_vocab_fingerprint() const { return cpc_vocab_fp_; }

  EmbeddingTableView word_table() const;
  EmbeddingTableView cpc_table() const;
  FieldWeights field_weights() const;
  void set_field_weights(const FieldWeights& weights);

  std::span<const double> parameters() const { return params_; }
  std::span<double> mutable_parameters() { return params_; }
  std::span<double> mutable_direction(bool cpc, TokenId id);
  double& mutable_magnitude(bool cpc, TokenId id);

  // Offsets into the flat parameter vector.
  std::size_t word_direction_offset() const { return 0; }
  std::size_t word_magnitude_offset() const { return n_words_ * dim_; }
  std::size_t cpc_direction_offset() const { return word_magnitude_offset() + n_words_; }
  std::size_t cpc_magnitude_offset() const { return cpc_direction_offset() + n_codes_ * dim_; }
  std::size_t lambda_offset() const { return cpc_magnitude_offset() + n_codes_; }

  // Keeps magnitudes nonnegative and directions away from zero norm.
  void project();

  std::string fingerprint() const;
  void save(std::ostream& out, std::uint64_t seed = 0) const;
  // Refuses files built against a different vocabulary.
  static CsnetModel load(std::istream& in, const Vocabularies& vocab);

  bool operator==(const CsnetModel&) const = default;

 private:
  std::size_t dim_ = 0;
  std::size_t n_words_ = 0;
  std::size_t n_codes_ = 0;
  bool use_cpc_ = true;
  std::string word_vocab_fp_;
  std::string cpc_vocab_fp_;
  std::vector<double> params_;
};

// Per-field sums of g(token), before the field weights are applied.
struct FieldSums {
  std::vector<double> title;
  std::vector<double> abstract_text;
  std::vector<double> cpc;
};

FieldSums field_sums(const CsnetModel& model, const TokenizedPatent& patent);
std::vector<double> combine_fields(const CsnetModel& model, const FieldSums& sums);
// lambda_t * sum g(title) + lambda_a * sum g(abstract) + lambda_c * sum g(cpc)
std::vector<double> embed_patent(const CsnetModel& model, const TokenizedPatent& patent);

// Cosine similarity; 0 when either vector is zero.
double cosine_sim(std::span<const double> a, std::span<const double> b);

// Reads "CODE v1 ... vE" rows into the cpc table (direction = vector,
// magnitude = its norm). Returns the number of codes set.
std::size_t load_cpc_vectors(std::istream& in, const Vocabulary& cpc_vocab, CsnetModel& model);

struct Triplet {
  RecordIndex query = 0;
  RecordIndex positive = 0;
  RecordIndex negative = 0;

  bool operator==(const Triplet&) const = default;
};

struct CsnetTrainConfig {
  std::size_t dim = kDefaultEmbeddingDim;
  bool use_cpc = true;
  std::size_t epochs = 50;
  double lr = 1e-4;
  double margin = 1.0;
  double beta = 1e-4;
  // 128 trains stably at desk scale.
  std::size_t batch_size = 128;
  std::size_t negatives_per_positive = 1;
  // Draw negatives from the current nearest non-cited neighbours instead.
  bool hard_negatives = false;
  std::size_t hard_negative_pool = 10;
  bool freeze_cpc = false;
  std::uint64_t seed = 0;
};

// One triplet per (train query, cited patent, negative draw); negatives are
// uniform over the pool minus the query and its citations. Seeded by
// (seed, epoch) and shuffled.
std::vector<Triplet> sample_triplets(const CorpusStore& store, const DatasetSplit& split,
                                     const CsnetTrainConfig& config, std::size_t epoch);

// Same stream shape, but negatives come from the `hard_negative_pool`
// nearest non-cited pool members under `model`.
std::vector<Triplet> sample_hard_triplets(const CorpusStore& store, const DatasetSplit& split,
                                          const CsnetTrainConfig& config, std::size_t epoch,
                                          const CsnetModel& model,
                                          const std::vector<TokenizedPatent>& tokens);

// Mean hinge loss over `batch` plus beta * sum of squared parameters. When
// `grad` is nonempty it receives the full gradient (overwritten).
double triplet_objective(const CsnetModel& model, const std::vector<TokenizedPatent>& tokens,
                         std::span<const Triplet> batch, double margin, double beta,
                         std::span<double> grad = {});

struct CsnetTrainResult {
  CsnetModel model;
  std::vector<double> epoch_losses;
};

CsnetTrainResult train_csnet(const CorpusStore& store, const DatasetSplit& split,
                             const Vocabularies& vocab, const std::vector<TokenizedPatent>& tokens,
                             const CsnetTrainConfig& config,
                             const CsnetModel* initial = nullptr);

}  // namespace patentrec
