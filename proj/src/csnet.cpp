#include "patentrec/csnet.hpp"

#include "patentrec/nn.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace patentrec {
namespace {

constexpr double kMinDirectionNorm = 1e-12;
// Sub-stream for per-epoch triplet sampling, apart from the init streams.
constexpr std::uint64_t kTripletStream = 100;

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// out += scale * d cos(a, b) / da
void add_cosine_grad(std::span<const double> a, std::span<const double> b, double scale,
                     std::span<double> out) {
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) return;
  const double s = dot(a, b) / (na * nb);
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] += scale * (b[i] / (na * nb) - s * a[i] / (na * na));
  }
}

void add_tokens(const EmbeddingTableView& table, std::span<const TokenId> ids,
                std::span<double> out) {
  for (TokenId id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= table.size()) {
      throw ValidationError("unknown token id " + std::to_string(id));
    }
    table.add_token_vector(id, 1.0, out);
  }
}

struct PatentState {
  FieldSums sums;
  std::vector<double> embedding;
  std::vector<double> grad;  // dLoss / dEmbedding
};

void accumulate_token_grads(const TokenizedPatent& patent, const std::vector<double>& grad,
                            const FieldWeights& weights, bool use_cpc,
                            std::map<TokenId, std::vector<double>>& word_dg,
                            std::map<TokenId, std::vector<double>>& cpc_dg) {
  auto add = [&grad](std::map<TokenId, std::vector<double>>& dg, TokenId id, double scale) {
    auto& row = dg[id];
    if (row.empty()) row.assign(grad.size(), 0.0);
    for (std::size_t i = 0; i < grad.size(); ++i) row[i] += scale * grad[i];
  };
  for (TokenId id : patent.title_ids) add(word_dg, id, weights.title);
  for (TokenId id : patent.abstract_ids) add(word_dg, id, weights.abstract_text);
  if (use_cpc) {
    for (TokenId id : patent.cpc_ids) add(cpc_dg, id, weights.cpc);
  }
}

// Chains dLoss/dg(w) through g(w) = magnitude * direction / |direction|.
void chain_weight_norm(const std::map<TokenId, std::vector<double>>& dg,
                       const EmbeddingTableView& table, std::size_t direction_offset,
                       std::size_t magnitude_offset, std::span<double> grad) {
  const std::size_t dim = table.dim;
  for (const auto& [id, g] : dg) {
    auto v = table.row(id);
    const double n = norm(v);
    const double magnitude = table.magnitude[static_cast<std::size_t>(id)];
    double projected = 0.0;
    for (std::size_t i = 0; i < dim; ++i) projected += g[i] * v[i] / n;
    grad[magnitude_offset + static_cast<std::size_t>(id)] += projected;
    double* dv = grad.data() + direction_offset + static_cast<std::size_t>(id) * dim;
    for (std::size_t i = 0; i < dim; ++i) {
      dv[i] += magnitude / n * (g[i] - projected * v[i] / n);
    }
  }
}

std::vector<char> pool_mask(const CorpusStore& store, const DatasetSplit& split,
                            std::vector<RecordIndex>& pool) {
  std::vector<char> mask(store.size(), 0);
  pool.clear();
  for (const auto& id : split.candidate_pool_ids) {
    RecordIndex index = store.index_of(id);
    if (!mask[index]) pool.push_back(index);
    mask[index] = 1;
  }
  return mask;
}

}  // namespace

void EmbeddingTableView::add_token_vector(TokenId id, double scale, std::span<double> out) const {
  auto v = row(id);
  const double n = norm(v);
  const double factor = scale * magnitude[static_cast<std::size_t>(id)] / n;
  for (std::size_t i = 0; i < dim; ++i) out[i] += factor * v[i];
}

std::vector<double> EmbeddingTableView::token_vector(TokenId id) const {
  std::vector<double> out(dim, 0.0);
  add_token_vector(id, 1.0, out);
  return out;
}

CsnetModel::CsnetModel(std::size_t n_words, std::size_t n_codes, std::size_t dim, bool use_cpc,
                       std::string word_vocab_fingerprint, std::string cpc_vocab_fingerprint)
    : dim_(dim),
      n_words_(n_words),
      n_codes_(use_cpc ? n_codes : 0),
      use_cpc_(use_cpc),
      word_vocab_fp_(std::move(word_vocab_fingerprint)),
      cpc_vocab_fp_(std::move(cpc_vocab_fingerprint)) {
  if (dim == 0) throw ValidationError("embedding dimension must be positive");
  params_.assign(lambda_offset() + 3, 0.0);
}

CsnetModel CsnetModel::initialize(const Vocabularies& vocab, std::size_t dim, bool use_cpc,
                                  std::uint64_t seed) {
  CsnetModel model(vocab.words.size(), vocab.cpc.size(), dim, use_cpc, vocab.words.fingerprint(),
                   vocab.cpc.fingerprint());
  const double limit = std::sqrt(3.0 / static_cast<double>(dim));
  // Separate streams keep the word table identical with and without CPC.
  Rng word_rng(Rng::derive(seed, 1));
  Rng lambda_rng(Rng::derive(seed, 2));
  Rng cpc_rng(Rng::derive(seed, 3));
  auto params = model.mutable_parameters();
  for (std::size_t i = 0; i < model.n_words_ * dim; ++i) params[i] = word_rng.uniform(-limit, limit);
  for (std::size_t i = 0; i < model.n_words_; ++i) params[model.word_magnitude_offset() + i] = 1.0;
  for (std::size_t i = 0; i < model.n_codes_ * dim; ++i) {
    params[model.cpc_direction_offset() + i] = cpc_rng.uniform(-limit, limit);
  }
  for (std::size_t i = 0; i < model.n_codes_; ++i) params[model.cpc_magnitude_offset() + i] = 1.0;
  for (std::size_t i = 0; i < 3; ++i) {
    params[model.lambda_offset() + i] = lambda_rng.uniform(0.5, 1.5);
  }
  model.project();
  return model;
}

EmbeddingTableView CsnetModel::word_table() const {
  std::span<const double> p(params_);
  return {p.subspan(word_direction_offset(), n_words_ * dim_),
          p.subspan(word_magnitude_offset(), n_words_), dim_};
}

EmbeddingTableView CsnetModel::cpc_table() const {
  std::span<const double> p(params_);
  return {p.subspan(cpc_direction_offset(), n_codes_ * dim_),
          p.subspan(cpc_magnitude_offset(), n_codes_), dim_};
}

FieldWeights CsnetModel::field_weights() const {
  const std::size_t o = lambda_offset();
  return {params_[o], params_[o + 1], params_[o + 2]};
}

void CsnetModel::set_field_weights(const FieldWeights& weights) {
  const std::size_t o = lambda_offset();
  params_[o] = weights.title;
  params_[o + 1] = weights.abstract_text;
  params_[o + 2] = weights.cpc;
}

std::span<double> CsnetModel::mutable_direction(bool cpc, TokenId id) {
  const std::size_t base = cpc ? cpc_direction_offset() : word_direction_offset();
  const std::size_t rows = cpc ? n_codes_ : n_words_;
  if (id < 0 || static_cast<std::size_t>(id) >= rows) throw ValidationError("token id out of range");
  return std::span<double>(params_).subspan(base + static_cast<std::size_t>(id) * dim_, dim_);
}

double& CsnetModel::mutable_magnitude(bool cpc, TokenId id) {
  const std::size_t base = cpc ? cpc_magnitude_offset() : word_magnitude_offset();
  const std::size_t rows = cpc ? n_codes_ : n_words_;
  if (id < 0 || static_cast<std::size_t>(id) >= rows) throw ValidationError("token id out of range");
  return params_[base + static_cast<std::size_t>(id)];
}

void CsnetModel::project() {
  auto fix_table = [this](std::size_t dir_offset, std::size_t mag_offset, std::size_t rows) {
    for (std::size_t r = 0; r < rows; ++r) {
      double& magnitude = params_[mag_offset + r];
      if (magnitude < 0.0) magnitude = 0.0;
      std::span<double> v(params_.data() + dir_offset + r * dim_, dim_);
      if (norm(v) < kMinDirectionNorm) {
        std::fill(v.begin(), v.end(), 1.0 / std::sqrt(static_cast<double>(dim_)));
      }
    }
  };
  fix_table(word_direction_offset(), word_magnitude_offset(), n_words_);
  fix_table(cpc_direction_offset(), cpc_magnitude_offset(), n_codes_);
}

std::string CsnetModel::fingerprint() const {
  Fingerprint fp;
  fp.add(static_cast<std::uint64_t>(dim_));
  fp.add(static_cast<std::uint64_t>(use_cpc_));
  fp.add(static_cast<std::uint64_t>(n_words_));
  fp.add(static_cast<std::uint64_t>(n_codes_));
  fp.add(word_vocab_fp_);
  fp.add(cpc_vocab_fp_);
  fp.add(std::span<const double>(params_));
  return fp.hex();
}

void CsnetModel::save(std::ostream& out, std::uint64_t seed) const {
  ArtifactHeader header{"csnet", 1, {}};
  header.fields["dim"] = std::to_string(dim_);
  header.fields["use_cpc"] = use_cpc_ ? "1" : "0";
  header.fields["n_words"] = std::to_string(n_words_);
  header.fields["n_codes"] = std::to_string(n_codes_);
  header.fields["word_vocab"] = word_vocab_fp_;
  header.fields["cpc_vocab"] = cpc_vocab_fp_;
  header.fields["fingerprint"] = fingerprint();
  header.fields["seed"] = std::to_string(seed);
  write_header(out, header);
  const FieldWeights w = field_weights();
  out << "lambda " << format_hex(w.title) << ' ' << format_hex(w.abstract_text) << ' '
      << format_hex(w.cpc) << '\n';
  auto write_table = [&out](const char* tag, const EmbeddingTableView& table) {
    for (std::size_t r = 0; r < table.size(); ++r) {
      out << tag << ' ' << format_hex(table.magnitude[r]);
      for (double v : table.row(static_cast<TokenId>(r))) out << ' ' << format_hex(v);
      out << '\n';
    }
  };
  write_table("word", word_table());
  write_table("cpc", cpc_table());
}

CsnetModel CsnetModel::load(std::istream& in, const Vocabularies& vocab) {
  ArtifactHeader header = read_header(in, "csnet", 1);
  if (header.at("word_vocab") != vocab.words.fingerprint() ||
      header.at("cpc_vocab") != vocab.cpc.fingerprint()) {
    throw ArtifactError("fingerprint mismatch: csnet model was built against another vocabulary");
  }
  const bool use_cpc = header.at("use_cpc") == "1";
  CsnetModel model(std::stoull(header.at("n_words")), vocab.cpc.size(),
                   std::stoull(header.at("dim")), use_cpc, header.at("word_vocab"),
                   header.at("cpc_vocab"));
  if (model.n_words_ != vocab.words.size() || model.n_codes_ != std::stoull(header.at("n_codes"))) {
    throw ArtifactError("csnet table sizes do not match the vocabulary");
  }
  std::string line;
  auto expect_row = [&](const char* tag, std::size_t width) {
    if (!std::getline(in, line)) throw ArtifactError("truncated csnet artifact");
    auto parts = split_whitespace(line);
    if (parts.size() != width + 1 || parts[0] != tag) {
      throw ArtifactError(std::string("malformed csnet row, expected ") + tag);
    }
    std::vector<double> values;
    for (std::size_t i = 1; i < parts.size(); ++i) values.push_back(parse_hex(parts[i]));
    return values;
  };
  auto lambdas = expect_row("lambda", 3);
  model.set_field_weights({lambdas[0], lambdas[1], lambdas[2]});
  auto read_table = [&](const char* tag, std::size_t rows, std::size_t dir_offset,
                        std::size_t mag_offset) {
    for (std::size_t r = 0; r < rows; ++r) {
      auto values = expect_row(tag, model.dim_ + 1);
      model.params_[mag_offset + r] = values[0];
      std::copy(values.begin() + 1, values.end(), model.params_.begin() + dir_offset + r * model.dim_);
    }
  };
  read_table("word", model.n_words_, model.word_direction_offset(), model.word_magnitude_offset());
  read_table("cpc", model.n_codes_, model.cpc_direction_offset(), model.cpc_magnitude_offset());
  if (model.fingerprint() != header.at("fingerprint")) {
    throw ArtifactError("csnet parameters do not match header fingerprint");
  }
  return model;
}

FieldSums field_sums(const CsnetModel& model, const TokenizedPatent& patent) {
  FieldSums sums;
  sums.title.assign(model.dim(), 0.0);
  sums.abstract_text.assign(model.dim(), 0.0);
  sums.cpc.assign(model.dim(), 0.0);
  add_tokens(model.word_table(), patent.title_ids, sums.title);
  add_tokens(model.word_table(), patent.abstract_ids, sums.abstract_text);
  if (model.use_cpc()) add_tokens(model.cpc_table(), patent.cpc_ids, sums.cpc);
  return sums;
}

std::vector<double> combine_fields(const CsnetModel& model, const FieldSums& sums) {
  const FieldWeights w = model.field_weights();
  std::vector<double> e(model.dim());
  for (std::size_t i = 0; i < e.size(); ++i) {
    e[i] = w.title * sums.title[i] + w.abstract_text * sums.abstract_text[i];
    if (model.use_cpc()) e[i] += w.cpc * sums.cpc[i];
  }
  return e;
}

std::vector<double> embed_patent(const CsnetModel& model, const TokenizedPatent& patent) {
  return combine_fields(model, field_sums(model, patent));
}

double cosine_sim(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("cosine_sim: dimension mismatch");
  const double na = std::sqrt(dot(a, a));
  const double nb = std::sqrt(dot(b, b));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

std::size_t load_cpc_vectors(std::istream& in, const Vocabulary& cpc_vocab, CsnetModel& model) {
  if (!model.use_cpc()) throw ValidationError("model has no cpc table");
  if (cpc_vocab.fingerprint() != model.cpc_vocab_fingerprint()) {
    throw ArtifactError("fingerprint mismatch: cpc vocabulary");
  }
  std::size_t loaded = 0;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    auto parts = split_whitespace(line);
    if (parts.empty() || parts[0][0] == '#') continue;
    if (parts.size() != model.dim() + 1) throw ParseError("cpc vector has the wrong dimension", line_number);
    auto id = cpc_vocab.find(normalize_code(parts[0]));
    if (!id) continue;
    std::vector<double> v;
    for (std::size_t i = 1; i < parts.size(); ++i) v.push_back(std::stod(std::string(parts[i])));
    const double n = norm(v);
    if (n == 0.0) throw ParseError("zero cpc vector", line_number);
    auto dir = model.mutable_direction(true, *id);
    std::copy(v.begin(), v.end(), dir.begin());
    model.mutable_magnitude(true, *id) = n;
    ++loaded;
  }
  return loaded;
}

std::vector<Triplet> sample_triplets(const CorpusStore& store, const DatasetSplit& split,
                                     const CsnetTrainConfig& config, std::size_t epoch) {
  std::vector<RecordIndex> pool;
  const std::vector<char> in_pool = pool_mask(store, split, pool);
  Rng rng(Rng::derive(Rng::derive(config.seed, kTripletStream), epoch));
  std::vector<Triplet> triplets;
  for (const auto& query_id : split.train_query_ids) {
    const RecordIndex q = store.index_of(query_id);
    const PatentRecord& record = store.record(q);
    std::vector<char> excluded(store.size(), 0);
    excluded[q] = 1;
    std::size_t blocked = in_pool[q] ? 1 : 0;
    std::vector<RecordIndex> positives;
    for (const auto& cited : record.cited) {
      RecordIndex c = store.index_of(cited);
      positives.push_back(c);
      if (!excluded[c] && in_pool[c]) ++blocked;
      excluded[c] = 1;
    }
    if (positives.empty()) continue;
    if (blocked >= pool.size()) throw ValidationError("no valid negative for query " + query_id);
    for (RecordIndex positive : positives) {
      for (std::size_t n = 0; n < config.negatives_per_positive; ++n) {
        RecordIndex negative = pool[rng.uniform_index(pool.size())];
        while (excluded[negative]) negative = pool[rng.uniform_index(pool.size())];
        triplets.push_back({q, positive, negative});
      }
    }
  }
  rng.shuffle(triplets);
  return triplets;
}

std::vector<Triplet> sample_hard_triplets(const CorpusStore& store, const DatasetSplit& split,
                                          const CsnetTrainConfig& config, std::size_t epoch,
                                          const CsnetModel& model,
                                          const std::vector<TokenizedPatent>& tokens) {
  std::vector<RecordIndex> pool;
  pool_mask(store, split, pool);
  std::vector<std::vector<double>> pool_vectors;
  pool_vectors.reserve(pool.size());
  for (RecordIndex r : pool) pool_vectors.push_back(embed_patent(model, tokens[r]));

  Rng rng(Rng::derive(Rng::derive(config.seed, kTripletStream), epoch));
  std::vector<Triplet> triplets;
  for (const auto& query_id : split.train_query_ids) {
    const RecordIndex q = store.index_of(query_id);
    const PatentRecord& record = store.record(q);
    if (record.cited.empty()) continue;
    std::vector<char> excluded(store.size(), 0);
    excluded[q] = 1;
    std::vector<RecordIndex> positives;
    for (const auto& cited : record.cited) {
      positives.push_back(store.index_of(cited));
      excluded[positives.back()] = 1;
    }
    const auto e_q = embed_patent(model, tokens[q]);
    std::vector<std::pair<double, RecordIndex>> scored;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (excluded[pool[i]]) continue;
      scored.emplace_back(cosine_sim(e_q, pool_vectors[i]), pool[i]);
    }
    if (scored.empty()) throw ValidationError("no valid negative for query " + query_id);
    const std::size_t keep = std::min(std::max<std::size_t>(config.hard_negative_pool, 1), scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(),
                      [](const auto& a, const auto& b) {
                        return a.first != b.first ? a.first > b.first : a.second < b.second;
                      });
    for (RecordIndex positive : positives) {
      for (std::size_t n = 0; n < config.negatives_per_positive; ++n) {
        triplets.push_back({q, positive, scored[rng.uniform_index(keep)].second});
      }
    }
  }
  rng.shuffle(triplets);
  return triplets;
}

double triplet_objective(const CsnetModel& model, const std::vector<TokenizedPatent>& tokens,
                         std::span<const Triplet> batch, double margin, double beta,
                         std::span<double> grad) {
  const bool want_grad = !grad.empty();
  if (want_grad && grad.size() != model.parameters().size()) {
    throw ValidationError("triplet_objective: gradient size mismatch");
  }
  std::map<RecordIndex, PatentState> states;
  auto state_of = [&](RecordIndex r) -> PatentState& {
    auto it = states.find(r);
    if (it != states.end()) return it->second;
    if (r >= tokens.size()) throw ValidationError("triplet refers to an unknown record");
    PatentState state;
    state.sums = field_sums(model, tokens[r]);
    state.embedding = combine_fields(model, state.sums);
    state.grad.assign(model.dim(), 0.0);
    return states.emplace(r, std::move(state)).first->second;
  };

  const double scale = batch.empty() ? 0.0 : 1.0 / static_cast<double>(batch.size());
  double hinge_sum = 0.0;
  for (const Triplet& t : batch) {
    PatentState& q = state_of(t.query);
    PatentState& p = state_of(t.positive);
    PatentState& n = state_of(t.negative);
    const double sim_pos = cosine_sim(q.embedding, p.embedding);
    const double sim_neg = cosine_sim(q.embedding, n.embedding);
    const nn::TripletLoss h = nn::triplet_hinge(sim_pos, sim_neg, margin);
    hinge_sum += h.loss;
    if (!want_grad || h.loss == 0.0) continue;
    add_cosine_grad(q.embedding, p.embedding, scale * h.d_pos, q.grad);
    add_cosine_grad(p.embedding, q.embedding, scale * h.d_pos, p.grad);
    add_cosine_grad(q.embedding, n.embedding, scale * h.d_neg, q.grad);
    add_cosine_grad(n.embedding, q.embedding, scale * h.d_neg, n.grad);
  }

  const auto params = model.parameters();
  double sq = 0.0;
  for (double v : params) sq += v * v;
  const double loss = hinge_sum * scale + beta * sq;
  if (!want_grad) return loss;

  for (std::size_t i = 0; i < params.size(); ++i) grad[i] = 2.0 * beta * params[i];
  const FieldWeights weights = model.field_weights();
  std::map<TokenId, std::vector<double>> word_dg;
  std::map<TokenId, std::vector<double>> cpc_dg;
  const std::size_t lambda = model.lambda_offset();
  for (const auto& [record, state] : states) {
    if (std::all_of(state.grad.begin(), state.grad.end(), [](double g) { return g == 0.0; })) continue;
    grad[lambda] += dot(state.grad, state.sums.title);
    grad[lambda + 1] += dot(state.grad, state.sums.abstract_text);
    if (model.use_cpc()) grad[lambda + 2] += dot(state.grad, state.sums.cpc);
    accumulate_token_grads(tokens[record], state.grad, weights, model.use_cpc(), word_dg, cpc_dg);
  }
  chain_weight_norm(word_dg, model.word_table(), model.word_direction_offset(),
                    model.word_magnitude_offset(), grad);
  chain_weight_norm(cpc_dg, model.cpc_table(), model.cpc_direction_offset(),
                    model.cpc_magnitude_offset(), grad);
  return loss;
}

CsnetTrainResult train_csnet(const CorpusStore& store, const DatasetSplit& split,
                             const Vocabularies& vocab, const std::vector<TokenizedPatent>& tokens,
                             const CsnetTrainConfig& config, const CsnetModel* initial) {
  if (split.train_query_ids.empty()) throw ValidationError("empty training split");
  if (tokens.size() != store.size()) throw ValidationError("tokenized corpus does not match store");
  if (config.batch_size == 0 || config.negatives_per_positive == 0) {
    throw ValidationError("batch size and negatives per positive must be positive");
  }
  CsnetTrainResult result{initial != nullptr
                              ? *initial
                              : CsnetModel::initialize(vocab, config.dim, config.use_cpc, config.seed),
                          {}};
  CsnetModel& model = result.model;
  if (model.dim() != config.dim || model.use_cpc() != config.use_cpc) {
    throw ValidationError("initial csnet model does not match the training config");
  }
  if (config.epochs == 0) return result;

  nn::Adam adam(model.parameters().size(), nn::AdamConfig{config.lr, 0.9, 0.999, 1e-8});
  std::vector<double> grad(model.parameters().size());
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const std::vector<Triplet> triplets =
        config.hard_negatives ? sample_hard_triplets(store, split, config, epoch, model, tokens)
                              : sample_triplets(store, split, config, epoch);
    if (triplets.empty()) throw ValidationError("no training triplets: train queries cite nothing");
    double weighted = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < triplets.size(); start += config.batch_size, ++batch_index) {
      const std::size_t end = std::min(triplets.size(), start + config.batch_size);
      std::span<const Triplet> batch(triplets.data() + start, end - start);
      const double loss = triplet_objective(model, tokens, batch, config.margin, config.beta, grad);
      if (!std::isfinite(loss)) {
        throw NumericError("csnet diverged at epoch " + std::to_string(epoch) + " batch " +
                           std::to_string(batch_index));
      }
      if (config.freeze_cpc) {
        std::fill(grad.begin() + static_cast<std::ptrdiff_t>(model.cpc_direction_offset()),
                  grad.begin() + static_cast<std::ptrdiff_t>(model.lambda_offset()), 0.0);
      }
      adam.step(model.mutable_parameters(), grad);
      model.project();
      weighted += loss * static_cast<double>(batch.size());
    }
    result.epoch_losses.push_back(weighted / static_cast<double>(triplets.size()));
  }
  return result;
}

}  // namespace patentrec
